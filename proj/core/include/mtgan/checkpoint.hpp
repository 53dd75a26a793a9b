#pragma once

#include <string>

#include "mtgan/meta.hpp"

namespace mtgan {

// Text checkpoint: versioned header, net specs, then parameter and optimizer
// arrays printed at full precision so the round trip is value-exact.
struct Checkpoint {
  int format_version = 1;
  NetSpec gen_spec;
  NetSpec disc_spec;
  MetaState state;
  std::string config_digest;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

// Loading against a mismatched spec fails loudly.
void require_spec_match(const Checkpoint& ckpt, const NetSpec& gen, const NetSpec& disc);

}  // namespace mtgan
