#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mtgan/tensor.hpp"

namespace mtgan {

struct EpisodeConfig {
  std::size_t shots = 5;         // K: support samples per domain
  std::size_t query_size = 10;   // L
  std::size_t meta_batch = 2;    // J
  std::size_t num_train_tasks = 9;  // N
  std::size_t meta_batches = 2000;

  void validate() const;
};

// One K-shot translation episode: unpaired support/query sample sets from two
// domains. No index correspondence between x and y samples exists.
struct TranslationTask {
  std::string task_id;
  Tensor support_x;
  Tensor support_y;
  Tensor query_x;
  Tensor query_y;
};

enum class TaskFamily { Affine2d, Ring2d, GlyphIdentity, FileBacked };

TaskFamily task_family_from_string(const std::string& s);
std::string to_string(TaskFamily f);

// A seed-indexed distribution over translation tasks. Each task id owns a
// hidden transform (affine families) or an identity pair (glyph family);
// episode draws are pure functions of (seed, draw index).
struct TaskDistribution {
  TaskFamily family = TaskFamily::Affine2d;
  std::uint64_t seed = 0;
  std::size_t num_tasks = 10;
  std::vector<int> allowed;  // task ids eligible for sampling; empty = all
  double noise = 0.05;

  // Transform parameter ranges (affine families). Rotation is uniform in
  // [0, rot_range), per-axis scale in [scale_min, scale_max], translation in
  // [-trans_range, trans_range]^2.
  double rot_range = 6.283185307179586;
  double scale_min = 0.5;
  double scale_max = 2.0;
  double trans_range = 2.0;

  std::size_t num_identities = 16;  // glyph pool size

  std::string root;  // file_backed: directory of task subdirectories

  std::size_t sample_dim() const;
};

// Deterministic episode draw: picks an eligible task id and fresh disjoint
// support/query point sets.
TranslationTask sample_task(const TaskDistribution& dist, std::size_t index,
                            const EpisodeConfig& cfg);

// Episode draw pinned to one task id.
TranslationTask sample_task_for(const TaskDistribution& dist, int task_id,
                                std::size_t index, const EpisodeConfig& cfg);

// Test-time episode: when disjoint is false, every draw reuses episode 0's
// support set and only the query varies.
TranslationTask test_episode(const TaskDistribution& dist, int task_id,
                             std::size_t index, const EpisodeConfig& cfg,
                             bool disjoint);

// Seeded shuffle then prefix split of raw per-domain sample matrices.
TranslationTask split_support_query(const Tensor& raw_x, const Tensor& raw_y,
                                    const EpisodeConfig& cfg, std::uint64_t seed,
                                    const std::string& task_id = "split");

// Hold-one-out folds: for each task, (all others, that task).
struct Fold {
  std::vector<int> train;
  int test = 0;
};
std::vector<Fold> holdout_folds(const std::vector<int>& tasks);

// file_backed support: CSV with header f0,f1,..., one sample per row.
Tensor load_sample_csv(const std::string& path, std::size_t min_rows);
void write_sample_csv(const std::string& path, const Tensor& samples);
std::vector<std::string> list_file_tasks(const std::string& root);

}  // namespace mtgan
