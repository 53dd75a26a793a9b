#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mtgan/autodiff.hpp"

namespace mtgan {

enum class Activation { Tanh, Relu };
enum class OutputActivation { Identity, SigmoidProb };

struct NetSpec {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden_dims;
  std::size_t output_dim = 0;
  Activation activation = Activation::Tanh;
  OutputActivation output = OutputActivation::Identity;

  void validate() const;
  std::size_t param_count() const;
  bool operator==(const NetSpec&) const = default;
};

// Plain named tensors: the serializable / persistent form of a parameter set.
struct ParamValues {
  std::vector<std::pair<std::string, Tensor>> entries;

  const Tensor& get(const std::string& name) const;
  bool same_layout(const ParamValues& o) const;
};

bool value_equal(const ParamValues& a, const ParamValues& b);

// Tracked form: the same layout with Var entries, bound to some tape (or all
// constants). The unit that is cloned, detached, stepped and differentiated.
struct ParamSet {
  std::vector<std::pair<std::string, Var>> entries;

  const Var& get(const std::string& name) const;
};

// Gradients of some scalar loss, one tensor-valued Var per parameter name.
using GradMap = std::vector<std::pair<std::string, Var>>;

// Scaled-uniform weights with bound sqrt(6/(fan_in+fan_out)); zero biases.
// Layer i contributes entries "w<i>" ([in,out]) and "b<i>" ([1,out]).
ParamValues init_params(const NetSpec& spec, std::uint64_t seed);

// Bind plain values onto a tape (requires_grad=true) or as constants.
ParamSet lift(Tape& tape, const ParamValues& values);
ParamSet lift_const(const ParamValues& values);
ParamValues lower(const ParamSet& params);

// Value-equal copy with no graph history: fresh constants.
ParamSet clone_detached(const ParamSet& params);
// Value-equal copy as fresh tape leaves: receives its own gradients but is cut
// from whatever graph produced `params`.
ParamSet clone_as_leaves(Tape& tape, const ParamSet& params);

// Entry-wise params + scale * delta, as a new tracked ParamSet.
ParamSet combine(const ParamSet& params, const GradMap& delta, double scale);

GradMap grads_for(const Gradients& grads, const ParamSet& params);

Var forward(const NetSpec& spec, const ParamSet& params, const Var& batch);
// Discriminator pre-sigmoid output; losses compose log-sigmoid on this.
Var forward_logits(const NetSpec& spec, const ParamSet& params, const Var& batch);

}  // namespace mtgan
