#pragma once

#include "mtgan/nn.hpp"

namespace mtgan {

enum class Direction { Descent, Ascent };

// One SGD update as a tracked combine, so later losses can differentiate
// through it. Ascent adds the gradient (discriminators), descent subtracts.
ParamSet sgd_step(const ParamSet& params, const GradMap& grads, double lr,
                  Direction direction);

struct AdamState {
  ParamValues m;
  ParamValues v;
  std::int64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState like(const ParamValues& params);
};

// Bias-corrected Adam on plain values; returns fresh (params, state).
std::pair<ParamValues, AdamState> adam_step(const ParamValues& params,
                                            const ParamValues& grads,
                                            const AdamState& state, double lr,
                                            Direction direction);

}  // namespace mtgan
