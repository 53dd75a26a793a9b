#include "mtgan/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace mtgan {

namespace fs = std::filesystem;

void EpisodeConfig::validate() const {
  if (shots == 0 || query_size == 0 || meta_batch == 0 || num_train_tasks == 0)
    throw std::invalid_argument("EpisodeConfig: K, L, J, N must be positive");
}

TaskFamily task_family_from_string(const std::string& s) {
  if (s == "affine2d") return TaskFamily::Affine2d;
  if (s == "ring2d") return TaskFamily::Ring2d;
  if (s == "glyph_identity") return TaskFamily::GlyphIdentity;
  if (s == "file_backed") return TaskFamily::FileBacked;
  throw std::invalid_argument("unknown task family: " + s);
}

std::string to_string(TaskFamily f) {
  switch (f) {
    case TaskFamily::Affine2d: return "affine2d";
    case TaskFamily::Ring2d: return "ring2d";
    case TaskFamily::GlyphIdentity: return "glyph_identity";
    case TaskFamily::FileBacked: return "file_backed";
  }
  return "?";
}

std::size_t TaskDistribution::sample_dim() const {
  switch (family) {
    case TaskFamily::Affine2d:
    case TaskFamily::Ring2d: return 2;
    case TaskFamily::GlyphIdentity: return 64;
    case TaskFamily::FileBacked: {
      auto tasks = list_file_tasks(root);
      if (tasks.empty()) throw std::runtime_error("file_backed: no tasks under " + root);
      Tensor t = load_sample_csv(tasks[0] + "/domain_x.csv", 1);
      return t.cols;
    }
  }
  return 0;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  return splitmix64(splitmix64(seed ^ (tag * 0x9e3779b97f4a7c15ULL)) ^ index);
}

struct Affine2d {
  double rot = 0.0;
  double sx = 1.0, sy = 1.0;
  double tx = 0.0, ty = 0.0;

  void apply(double& x, double& y) const {
    const double c = std::cos(rot), s = std::sin(rot);
    const double rx = c * x - s * y;
    const double ry = s * x + c * y;
    x = sx * rx + tx;
    y = sy * ry + ty;
  }
};

Affine2d task_transform(const TaskDistribution& dist, int task_id) {
  std::mt19937_64 rng(mix(dist.seed, 0xA11E, static_cast<std::uint64_t>(task_id)));
  Affine2d t;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  t.rot = u01(rng) * dist.rot_range;
  t.sx = dist.scale_min + u01(rng) * (dist.scale_max - dist.scale_min);
  t.sy = dist.scale_min + u01(rng) * (dist.scale_max - dist.scale_min);
  t.tx = (2.0 * u01(rng) - 1.0) * dist.trans_range;
  t.ty = (2.0 * u01(rng) - 1.0) * dist.trans_range;
  return t;
}

// Base point cloud for the 2-D families.
Tensor draw_base_cloud(const TaskDistribution& dist, std::mt19937_64& rng, std::size_t n) {
  Tensor out(n, 2);
  std::normal_distribution<double> gauss(0.0, 1.0);
  if (dist.family == TaskFamily::Ring2d) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = angle(rng);
      const double r = 1.0 + 0.1 * gauss(rng);
      out.at(i, 0) = r * std::cos(a);
      out.at(i, 1) = r * std::sin(a);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      out.at(i, 0) = gauss(rng);
      out.at(i, 1) = gauss(rng);
    }
  }
  return out;
}

Tensor glyph_pattern(const TaskDistribution& dist, int identity) {
  std::mt19937_64 rng(mix(dist.seed, 0x61F9, static_cast<std::uint64_t>(identity)));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Tensor g(1, 64);
  for (auto& v : g.data) v = u01(rng) < 0.4 ? 1.0 : 0.0;
  return g;
}

Tensor draw_glyph_samples(const TaskDistribution& dist, const Tensor& glyph,
                          std::mt19937_64& rng, std::size_t n) {
  Tensor out(n, 64);
  std::normal_distribution<double> jitter(0.0, dist.noise > 0.0 ? dist.noise : 1e-12);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < 64; ++j)
      out.at(i, j) = glyph.data[j] + (dist.noise > 0.0 ? jitter(rng) : 0.0);
  return out;
}

int pick_task_id(const TaskDistribution& dist, std::size_t index) {
  std::mt19937_64 rng(mix(dist.seed, 0x7A5C, index));
  if (!dist.allowed.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, dist.allowed.size() - 1);
    return dist.allowed[pick(rng)];
  }
  std::uniform_int_distribution<std::size_t> pick(0, dist.num_tasks - 1);
  return static_cast<int>(pick(rng));
}

Tensor vstack(const Tensor& a, const Tensor& b) {
  Tensor out(a.rows + b.rows, a.cols);
  std::copy(a.data.begin(), a.data.end(), out.data.begin());
  std::copy(b.data.begin(), b.data.end(), out.data.begin() + a.data.size());
  return out;
}

}  // namespace

TranslationTask sample_task_for(const TaskDistribution& dist, int task_id,
                                std::size_t index, const EpisodeConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.shots + cfg.query_size;
  TranslationTask task;
  std::mt19937_64 rng(mix(dist.seed, 0xD4A7, index * 1000003ULL +
                                                  static_cast<std::uint64_t>(task_id)));
  switch (dist.family) {
    case TaskFamily::Affine2d:
    case TaskFamily::Ring2d: {
      task.task_id = to_string(dist.family) + "/t" + std::to_string(task_id);
      Tensor x = draw_base_cloud(dist, rng, n);
      Tensor y = draw_base_cloud(dist, rng, n);
      const Affine2d tr = task_transform(dist, task_id);
      std::normal_distribution<double> obs(0.0, dist.noise > 0.0 ? dist.noise : 1e-12);
      for (std::size_t i = 0; i < n; ++i) {
        double a = y.at(i, 0), b = y.at(i, 1);
        tr.apply(a, b);
        if (dist.noise > 0.0) {
          a += obs(rng);
          b += obs(rng);
        }
        y.at(i, 0) = a;
        y.at(i, 1) = b;
      }
      task.support_x = Tensor(cfg.shots, 2);
      task.query_x = Tensor(cfg.query_size, 2);
      task.support_y = Tensor(cfg.shots, 2);
      task.query_y = Tensor(cfg.query_size, 2);
      std::copy_n(x.data.begin(), cfg.shots * 2, task.support_x.data.begin());
      std::copy_n(x.data.begin() + cfg.shots * 2, cfg.query_size * 2,
                  task.query_x.data.begin());
      std::copy_n(y.data.begin(), cfg.shots * 2, task.support_y.data.begin());
      std::copy_n(y.data.begin() + cfg.shots * 2, cfg.query_size * 2,
                  task.query_y.data.begin());
      return task;
    }
    case TaskFamily::GlyphIdentity: {
      // A task is a pair of distinct identities from the pool.
      std::mt19937_64 prng(mix(dist.seed, 0x1D9A, static_cast<std::uint64_t>(task_id)));
      std::uniform_int_distribution<std::size_t> pick(0, dist.num_identities - 1);
      const int a = static_cast<int>(pick(prng));
      int b = static_cast<int>(pick(prng));
      while (b == a) b = static_cast<int>(pick(prng));
      task.task_id = "glyph_identity/t" + std::to_string(task_id) + "(" +
                     std::to_string(a) + "->" + std::to_string(b) + ")";
      const Tensor ga = glyph_pattern(dist, a);
      const Tensor gb = glyph_pattern(dist, b);
      Tensor x = draw_glyph_samples(dist, ga, rng, n);
      Tensor y = draw_glyph_samples(dist, gb, rng, n);
      return split_support_query(x, y, cfg, mix(dist.seed, 0x5A11, index), task.task_id);
    }
    case TaskFamily::FileBacked: {
      auto dirs = list_file_tasks(dist.root);
      if (dirs.empty()) throw std::runtime_error("file_backed: no tasks under " + dist.root);
      const auto& dir = dirs[static_cast<std::size_t>(task_id) % dirs.size()];
      Tensor x = load_sample_csv(dir + "/domain_x.csv", n);
      Tensor y = load_sample_csv(dir + "/domain_y.csv", n);
      return split_support_query(x, y, cfg, mix(dist.seed, 0xF11E, index),
                                 "file_backed/" + fs::path(dir).filename().string());
    }
  }
  throw std::logic_error("sample_task_for: unhandled family");
}

TranslationTask sample_task(const TaskDistribution& dist, std::size_t index,
                            const EpisodeConfig& cfg) {
  return sample_task_for(dist, pick_task_id(dist, index), index, cfg);
}

TranslationTask test_episode(const TaskDistribution& dist, int task_id,
                             std::size_t index, const EpisodeConfig& cfg,
                             bool disjoint) {
  TranslationTask t = sample_task_for(dist, task_id, index, cfg);
  if (!disjoint && index != 0) {
    TranslationTask base = sample_task_for(dist, task_id, 0, cfg);
    t.support_x = base.support_x;
    t.support_y = base.support_y;
  }
  return t;
}

TranslationTask split_support_query(const Tensor& raw_x, const Tensor& raw_y,
                                    const EpisodeConfig& cfg, std::uint64_t seed,
                                    const std::string& task_id) {
  cfg.validate();
  const std::size_t need = cfg.shots + cfg.query_size;
  auto split_one = [&](const Tensor& raw, std::uint64_t s, Tensor& support, Tensor& query,
                       const char* which) {
    if (raw.rows < need)
      throw std::invalid_argument("split_support_query: domain " + std::string(which) +
                                  " has " + std::to_string(raw.rows) +
                                  " samples, need at least " + std::to_string(need));
    std::vector<std::size_t> idx(raw.rows);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(s);
    std::shuffle(idx.begin(), idx.end(), rng);
    support = Tensor(cfg.shots, raw.cols);
    query = Tensor(cfg.query_size, raw.cols);
    for (std::size_t i = 0; i < cfg.shots; ++i)
      for (std::size_t j = 0; j < raw.cols; ++j) support.at(i, j) = raw.at(idx[i], j);
    for (std::size_t i = 0; i < cfg.query_size; ++i)
      for (std::size_t j = 0; j < raw.cols; ++j)
        query.at(i, j) = raw.at(idx[cfg.shots + i], j);
  };
  TranslationTask t;
  t.task_id = task_id;
  split_one(raw_x, splitmix64(seed ^ 1), t.support_x, t.query_x, "x");
  split_one(raw_y, splitmix64(seed ^ 2), t.support_y, t.query_y, "y");
  return t;
}

std::vector<Fold> holdout_folds(const std::vector<int>& tasks) {
  if (tasks.size() < 2)
    throw std::invalid_argument("holdout_folds: need at least 2 tasks");
  std::vector<Fold> folds;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    Fold f;
    f.test = tasks[i];
    for (std::size_t j = 0; j < tasks.size(); ++j)
      if (j != i) f.train.push_back(tasks[j]);
    folds.push_back(std::move(f));
  }
  return folds;
}

Tensor load_sample_csv(const std::string& path, std::size_t min_rows) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sample file: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty sample file: " + path);
  // Header row f0,f1,...
  std::size_t cols = std::count(line.begin(), line.end(), ',') + 1;
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      values.push_back(std::stod(cell));
      ++c;
    }
    if (c != cols)
      throw std::runtime_error("ragged row in " + path + ": expected " +
                               std::to_string(cols) + " fields, got " + std::to_string(c));
    ++rows;
  }
  if (rows < min_rows)
    throw std::runtime_error("sample file " + path + " has " + std::to_string(rows) +
                             " samples, need at least " + std::to_string(min_rows));
  return Tensor(rows, cols, std::move(values));
}

void write_sample_csv(const std::string& path, const Tensor& samples) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write sample file: " + path);
  for (std::size_t j = 0; j < samples.cols; ++j) out << (j ? "," : "") << "f" << j;
  out << "\n";
  out.precision(17);
  for (std::size_t i = 0; i < samples.rows; ++i) {
    for (std::size_t j = 0; j < samples.cols; ++j)
      out << (j ? "," : "") << samples.at(i, j);
    out << "\n";
  }
}

std::vector<std::string> list_file_tasks(const std::string& root) {
  std::vector<std::string> dirs;
  if (!fs::is_directory(root)) return dirs;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory() && fs::exists(e.path() / "domain_x.csv"))
      dirs.push_back(e.path().string());
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

}  // namespace mtgan
