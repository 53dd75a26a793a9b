#include "mtgan/nn.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace mtgan {

void NetSpec::validate() const {
  if (input_dim == 0 || output_dim == 0)
    throw std::invalid_argument("NetSpec: dims must be positive");
  if (hidden_dims.empty())
    throw std::invalid_argument("NetSpec: at least one hidden layer required");
  for (std::size_t h : hidden_dims)
    if (h == 0) throw std::invalid_argument("NetSpec: hidden dims must be positive");
}

std::size_t NetSpec::param_count() const {
  std::size_t n = 0;
  std::size_t prev = input_dim;
  for (std::size_t h : hidden_dims) {
    n += prev * h + h;
    prev = h;
  }
  n += prev * output_dim + output_dim;
  return n;
}

const Tensor& ParamValues::get(const std::string& name) const {
  for (const auto& [n, t] : entries)
    if (n == name) return t;
  throw std::invalid_argument("ParamValues: no entry named " + name);
}

bool ParamValues::same_layout(const ParamValues& o) const {
  if (entries.size() != o.entries.size()) return false;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].first != o.entries[i].first) return false;
    if (!entries[i].second.same_shape(o.entries[i].second)) return false;
  }
  return true;
}

bool value_equal(const ParamValues& a, const ParamValues& b) {
  if (a.entries.size() != b.entries.size()) return false;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    if (a.entries[i].first != b.entries[i].first) return false;
    if (!value_equal(a.entries[i].second, b.entries[i].second)) return false;
  }
  return true;
}

const Var& ParamSet::get(const std::string& name) const {
  for (const auto& [n, v] : entries)
    if (n == name) return v;
  throw std::invalid_argument("ParamSet: no entry named " + name);
}

ParamValues init_params(const NetSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  ParamValues out;
  std::vector<std::size_t> dims;
  dims.push_back(spec.input_dim);
  for (std::size_t h : spec.hidden_dims) dims.push_back(h);
  dims.push_back(spec.output_dim);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const std::size_t fan_in = dims[l], fan_out = dims[l + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Tensor w(fan_in, fan_out);
    for (auto& v : w.data) v = dist(rng);
    out.entries.emplace_back("w" + std::to_string(l), std::move(w));
    out.entries.emplace_back("b" + std::to_string(l), Tensor::zeros(1, fan_out));
  }
  return out;
}

ParamSet lift(Tape& tape, const ParamValues& values) {
  ParamSet out;
  for (const auto& [n, t] : values.entries) out.entries.emplace_back(n, tape.leaf(t));
  return out;
}

ParamSet lift_const(const ParamValues& values) {
  ParamSet out;
  for (const auto& [n, t] : values.entries)
    out.entries.emplace_back(n, Var::constant(t));
  return out;
}

ParamValues lower(const ParamSet& params) {
  ParamValues out;
  for (const auto& [n, v] : params.entries) out.entries.emplace_back(n, v.value());
  return out;
}

ParamSet clone_detached(const ParamSet& params) {
  ParamSet out;
  for (const auto& [n, v] : params.entries) out.entries.emplace_back(n, detach(v));
  return out;
}

ParamSet clone_as_leaves(Tape& tape, const ParamSet& params) {
  ParamSet out;
  for (const auto& [n, v] : params.entries) out.entries.emplace_back(n, tape.leaf(v.value()));
  return out;
}

ParamSet combine(const ParamSet& params, const GradMap& delta, double scale) {
  ParamSet out;
  for (const auto& [name, v] : params.entries) {
    const Var* d = nullptr;
    for (const auto& [dn, dv] : delta)
      if (dn == name) {
        d = &dv;
        break;
      }
    if (d == nullptr) {
      // Missing entries are treated as zero delta.
      out.entries.emplace_back(name, v);
      continue;
    }
    if (!d->value().same_shape(v.value()))
      throw std::invalid_argument("combine: shape mismatch for " + name + ": " +
                                  v.value().shape_str() + " vs " +
                                  d->value().shape_str());
    out.entries.emplace_back(name, add(v, smul(*d, scale)));
  }
  return out;
}

GradMap grads_for(const Gradients& grads, const ParamSet& params) {
  GradMap out;
  for (const auto& [n, v] : params.entries) out.emplace_back(n, grads.grad(v));
  return out;
}

namespace {

Var body(const NetSpec& spec, const ParamSet& params, const Var& batch) {
  spec.validate();
  if (batch.value().cols != spec.input_dim)
    throw std::invalid_argument("forward: batch width " +
                                std::to_string(batch.value().cols) +
                                " does not match input_dim " +
                                std::to_string(spec.input_dim));
  Var h = batch;
  const std::size_t layers = spec.hidden_dims.size() + 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const Var& w = params.get("w" + std::to_string(l));
    const Var& b = params.get("b" + std::to_string(l));
    h = add_row(matmul(h, w), b);
    if (l + 1 < layers)
      h = spec.activation == Activation::Tanh ? vtanh(h) : vrelu(h);
  }
  return h;
}

}  // namespace

Var forward(const NetSpec& spec, const ParamSet& params, const Var& batch) {
  Var h = body(spec, params, batch);
  if (spec.output == OutputActivation::SigmoidProb) h = vsigmoid(h);
  return h;
}

Var forward_logits(const NetSpec& spec, const ParamSet& params, const Var& batch) {
  return body(spec, params, batch);
}

}  // namespace mtgan
