#include "mtgan/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace mtgan {

ParamSet sgd_step(const ParamSet& params, const GradMap& grads, double lr,
                  Direction direction) {
  if (!(lr > 0.0)) throw std::invalid_argument("sgd_step: lr must be positive");
  const double scale = direction == Direction::Ascent ? lr : -lr;
  return combine(params, grads, scale);
}

AdamState AdamState::like(const ParamValues& params) {
  AdamState s;
  for (const auto& [n, t] : params.entries) {
    s.m.entries.emplace_back(n, Tensor::zeros(t.rows, t.cols));
    s.v.entries.emplace_back(n, Tensor::zeros(t.rows, t.cols));
  }
  return s;
}

std::pair<ParamValues, AdamState> adam_step(const ParamValues& params,
                                            const ParamValues& grads,
                                            const AdamState& state, double lr,
                                            Direction direction) {
  if (!(lr > 0.0)) throw std::invalid_argument("adam_step: lr must be positive");
  if (!state.m.same_layout(params))
    throw std::invalid_argument("adam_step: state layout does not match params");
  AdamState next = state;
  next.t = state.t + 1;
  ParamValues out = params;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(next.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(next.t));
  const double sign = direction == Direction::Ascent ? 1.0 : -1.0;
  for (std::size_t e = 0; e < params.entries.size(); ++e) {
    const Tensor& g = grads.get(params.entries[e].first);
    if (!g.same_shape(params.entries[e].second))
      throw std::invalid_argument("adam_step: gradient shape mismatch for " +
                                  params.entries[e].first);
    Tensor& m = next.m.entries[e].second;
    Tensor& v = next.v.entries[e].second;
    Tensor& p = out.entries[e].second;
    for (std::size_t i = 0; i < p.data.size(); ++i) {
      m.data[i] = state.beta1 * m.data[i] + (1.0 - state.beta1) * g.data[i];
      v.data[i] = state.beta2 * v.data[i] + (1.0 - state.beta2) * g.data[i] * g.data[i];
      const double mhat = m.data[i] / bc1;
      const double vhat = v.data[i] / bc2;
      p.data[i] += sign * lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
  return {std::move(out), std::move(next)};
}

}  // namespace mtgan
