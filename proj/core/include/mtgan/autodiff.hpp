#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "mtgan/tensor.hpp"

namespace mtgan {

class Tape;

// Tracked value. A Var with node id -1 is a constant: it never receives
// gradient and carries no tape history.
class Var {
 public:
  Var() = default;

  static Var constant(Tensor t) {
    Var v;
    v.value_ = std::make_shared<Tensor>(std::move(t));
    return v;
  }

  const Tensor& value() const { return *value_; }
  std::shared_ptr<const Tensor> value_ptr() const { return value_; }
  bool requires_grad() const { return id_ >= 0; }
  std::int64_t id() const { return id_; }
  Tape* tape() const { return tape_; }
  bool defined() const { return value_ != nullptr; }

 private:
  friend class Tape;
  std::shared_ptr<const Tensor> value_;
  Tape* tape_ = nullptr;
  std::int64_t id_ = -1;
};

// Result of one backward pass: gradients keyed by node id. Vars that were not
// reached (or do not require grad) read as zeros of their own shape.
class Gradients {
 public:
  Var grad(const Var& v) const;
  bool reached(const Var& v) const { return v.requires_grad() && by_id_.count(v.id()) > 0; }

 private:
  friend class Tape;
  std::unordered_map<std::int64_t, Var> by_id_;
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // New leaf that accumulates gradient.
  Var leaf(Tensor t);

  std::size_t size() const { return nodes_.size(); }
  // Drops every node past n. Vars created after the checkpoint must not be
  // used afterwards.
  void truncate(std::size_t n);

  // Reverse sweep from a scalar loss. Gradient values are built from tracked
  // primitives, so the returned Vars stay differentiable for higher-order use.
  Gradients backward(const Var& loss);

 private:
  friend Var record(Tape* tape, Tensor value, std::vector<Var> parents,
                    std::function<std::vector<Var>(const Var&)> vjp);
  struct Node {
    std::vector<std::int64_t> parents;
    std::function<std::vector<Var>(const Var&)> vjp;  // empty for leaves
  };
  std::vector<Node> nodes_;
};

// Primitive operations. Mixing Vars from two different tapes is a usage error.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);          // elementwise
Var smul(const Var& a, double c);             // scalar multiply
Var neg(const Var& a);
Var matmul(const Var& a, const Var& b);
Var add_row(const Var& a, const Var& bias);   // broadcast bias over batch rows
Var transpose(const Var& a);
Var vtanh(const Var& a);
Var vrelu(const Var& a);
Var vsigmoid(const Var& a);
Var vlog_sigmoid(const Var& a);               // stable branch form
Var vabs(const Var& a);
Var sum_all(const Var& a);                    // -> [1,1]
Var mean_all(const Var& a);                   // -> [1,1]
Var sum_axis0(const Var& a);                  // [B,n] -> [1,n]
Var mean_axis0(const Var& a);                 // [B,n] -> [1,n]
Var repeat_rows(const Var& a, std::size_t n); // [1,n] -> [B,n]
Var broadcast_scalar(const Var& s, std::size_t r, std::size_t c);
Var concat_cols(const Var& a, const Var& b);  // concatenate along last axis
Var slice_cols(const Var& a, std::size_t c0, std::size_t c1);

// Value copy with no graph linkage; gradient through any use of the result
// contributes exactly zero to v.
Var detach(const Var& v);

// Central-difference check of backward() for a scalar function of a flat
// parameter vector. Returns the worst relative error with denominator
// max(|a|,|b|,1e-8).
struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
};
GradCheckResult grad_check(
    const std::function<Var(Tape&, const std::vector<Var>&)>& f,
    const std::vector<Tensor>& params, double h);

}  // namespace mtgan
