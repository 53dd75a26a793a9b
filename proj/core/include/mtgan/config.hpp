#pragma once

#include <string>

#include "mtgan/meta.hpp"

namespace mtgan {

// Flat key=value experiment configuration; unknown keys are rejected.
struct RunConfig {
  Hyperparams hp = Hyperparams::desk_defaults();
  TaskDistribution dist;
  std::string output_dir = "run";
  std::size_t checkpoint_every = 500;
  bool test_batches_disjoint = true;

  void validate() const;
  // Canonical serialization (sorted keys); also the digest input.
  std::string serialize() const;
  std::string digest() const;

  static RunConfig parse_file(const std::string& path);
  static RunConfig parse_text(const std::string& text);
};

std::string config_digest_of(const std::string& text);

}  // namespace mtgan
