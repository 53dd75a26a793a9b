#include "mtgan/autodiff.hpp"

#include <cmath>
#include <stdexcept>

namespace mtgan {

Var Gradients::grad(const Var& v) const {
  if (v.requires_grad()) {
    auto it = by_id_.find(v.id());
    if (it != by_id_.end()) return it->second;
  }
  return Var::constant(Tensor::zeros(v.value().rows, v.value().cols));
}

Var Tape::leaf(Tensor t) {
  Var v;
  v.value_ = std::make_shared<Tensor>(std::move(t));
  v.tape_ = this;
  v.id_ = static_cast<std::int64_t>(nodes_.size());
  nodes_.push_back(Node{});
  return v;
}

void Tape::truncate(std::size_t n) {
  if (n < nodes_.size()) nodes_.resize(n);
}

Var record(Tape* tape, Tensor value, std::vector<Var> parents,
           std::function<std::vector<Var>(const Var&)> vjp) {
  Var v;
  v.value_ = std::make_shared<Tensor>(std::move(value));
  v.tape_ = tape;
  v.id_ = static_cast<std::int64_t>(tape->nodes_.size());
  Tape::Node node;
  node.parents.reserve(parents.size());
  for (const Var& p : parents) node.parents.push_back(p.id());
  node.vjp = std::move(vjp);
  tape->nodes_.push_back(std::move(node));
  return v;
}

Gradients Tape::backward(const Var& loss) {
  if (!loss.value().is_scalar())
    throw std::invalid_argument("backward: loss must be scalar, got " +
                                loss.value().shape_str());
  Gradients g;
  if (!loss.requires_grad()) return g;
  if (loss.tape() != this)
    throw std::invalid_argument("backward: loss lies on a different tape");
  g.by_id_[loss.id()] = Var::constant(Tensor::scalar(1.0));
  for (std::int64_t i = loss.id(); i >= 0; --i) {
    auto it = g.by_id_.find(i);
    if (it == g.by_id_.end()) continue;
    // Copy: the vjp may append nodes and reallocate nodes_.
    const Node node = nodes_[static_cast<std::size_t>(i)];
    if (!node.vjp) continue;
    const Var upstream = it->second;
    std::vector<Var> pg = node.vjp(upstream);
    for (std::size_t k = 0; k < node.parents.size(); ++k) {
      const std::int64_t pid = node.parents[k];
      if (pid < 0 || !pg[k].defined()) continue;
      auto pit = g.by_id_.find(pid);
      if (pit == g.by_id_.end())
        g.by_id_.emplace(pid, pg[k]);
      else
        pit->second = add(pit->second, pg[k]);
    }
  }
  return g;
}

namespace {

Tape* tape_of(const Var& a) { return a.requires_grad() ? a.tape() : nullptr; }

Tape* tape_of(const Var& a, const Var& b) {
  Tape* ta = tape_of(a);
  Tape* tb = tape_of(b);
  if (ta && tb && ta != tb)
    throw std::invalid_argument("autodiff: operands recorded on different tapes");
  return ta ? ta : tb;
}

using VjpFn = std::function<std::vector<Var>(const Var&)>;

Var emit(Tape* tape, Tensor value, std::vector<Var> parents, VjpFn vjp) {
  if (!tape) return Var::constant(std::move(value));
  return record(tape, std::move(value), std::move(parents), std::move(vjp));
}

}  // namespace

Var add(const Var& a, const Var& b) {
  Tensor out = tmath::add(a.value(), b.value());
  return emit(tape_of(a, b), std::move(out), {a, b},
              [](const Var& g) { return std::vector<Var>{g, g}; });
}

Var sub(const Var& a, const Var& b) {
  Tensor out = tmath::sub(a.value(), b.value());
  return emit(tape_of(a, b), std::move(out), {a, b},
              [](const Var& g) { return std::vector<Var>{g, neg(g)}; });
}

Var mul(const Var& a, const Var& b) {
  Tensor out = tmath::mul(a.value(), b.value());
  Var av = a, bv = b;
  return emit(tape_of(a, b), std::move(out), {a, b}, [av, bv](const Var& g) {
    return std::vector<Var>{mul(g, bv), mul(g, av)};
  });
}

Var smul(const Var& a, double c) {
  Tensor out = tmath::smul(a.value(), c);
  return emit(tape_of(a), std::move(out), {a},
              [c](const Var& g) { return std::vector<Var>{smul(g, c)}; });
}

Var neg(const Var& a) { return smul(a, -1.0); }

Var matmul(const Var& a, const Var& b) {
  Tensor out = tmath::matmul(a.value(), b.value());
  Var av = a, bv = b;
  return emit(tape_of(a, b), std::move(out), {a, b}, [av, bv](const Var& g) {
    return std::vector<Var>{matmul(g, transpose(bv)), matmul(transpose(av), g)};
  });
}

Var add_row(const Var& a, const Var& bias) {
  Tensor out = tmath::add_row(a.value(), bias.value());
  return emit(tape_of(a, bias), std::move(out), {a, bias}, [](const Var& g) {
    return std::vector<Var>{g, sum_axis0(g)};
  });
}

Var transpose(const Var& a) {
  Tensor out = tmath::transpose(a.value());
  return emit(tape_of(a), std::move(out), {a},
              [](const Var& g) { return std::vector<Var>{transpose(g)}; });
}

namespace {

// Unary elementwise op whose vjp is g ⊙ factor, where the factor is built from
// the saved input/output Vars so higher-order differentiation stays exact.
template <typename Fwd, typename MakeFactor>
Var elementwise(const Var& a, Fwd fwd, MakeFactor make_factor) {
  const Tensor& x = a.value();
  Tensor out = x;
  for (auto& v : out.data) v = fwd(v);
  Tape* tape = tape_of(a);
  if (!tape) return Var::constant(std::move(out));
  // Record with a placeholder vjp, then close over the result Var.
  struct Hole {
    VjpFn fn;
  };
  auto hole = std::make_shared<Hole>();
  Var result = record(tape, std::move(out), {a},
                      [hole](const Var& g) { return hole->fn(g); });
  Var in = a;
  hole->fn = [in, result, make_factor](const Var& g) {
    return std::vector<Var>{mul(g, make_factor(in, result))};
  };
  return result;
}

}  // namespace

Var vtanh(const Var& a) {
  return elementwise(
      a, [](double v) { return std::tanh(v); },
      [](const Var&, const Var& y) {
        Var ones = Var::constant(Tensor::full(y.value().rows, y.value().cols, 1.0));
        return sub(ones, mul(y, y));
      });
}

Var vrelu(const Var& a) {
  return elementwise(
      a, [](double v) { return v > 0.0 ? v : 0.0; },
      [](const Var& x, const Var&) {
        Tensor step = x.value();
        for (auto& v : step.data) v = v > 0.0 ? 1.0 : 0.0;
        return Var::constant(std::move(step));
      });
}

Var vsigmoid(const Var& a) {
  return elementwise(
      a,
      [](double v) {
        // Stable in both tails.
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](const Var&, const Var& y) {
        Var ones = Var::constant(Tensor::full(y.value().rows, y.value().cols, 1.0));
        return mul(y, sub(ones, y));
      });
}

Var vlog_sigmoid(const Var& a) {
  return elementwise(
      a,
      [](double v) {
        // log σ(v) = -log(1+e^{-v}) = v - log(1+e^{v}); pick the branch that
        // never overflows.
        if (v >= 0.0) return -std::log1p(std::exp(-v));
        return v - std::log1p(std::exp(v));
      },
      [](const Var& x, const Var&) { return vsigmoid(neg(x)); });
}

Var vabs(const Var& a) {
  return elementwise(
      a, [](double v) { return std::fabs(v); },
      [](const Var& x, const Var&) {
        Tensor sign = x.value();
        for (auto& v : sign.data) v = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
        return Var::constant(std::move(sign));
      });
}

Var sum_all(const Var& a) {
  const Tensor& x = a.value();
  Tensor out = Tensor::scalar(tmath::sum(x));
  const std::size_t r = x.rows, c = x.cols;
  return emit(tape_of(a), std::move(out), {a}, [r, c](const Var& g) {
    return std::vector<Var>{broadcast_scalar(g, r, c)};
  });
}

Var mean_all(const Var& a) {
  const double n = static_cast<double>(a.value().size());
  return smul(sum_all(a), 1.0 / n);
}

Var sum_axis0(const Var& a) {
  const Tensor& x = a.value();
  Tensor out(1, x.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) out.data[j] += x.data[i * x.cols + j];
  const std::size_t r = x.rows;
  return emit(tape_of(a), std::move(out), {a}, [r](const Var& g) {
    return std::vector<Var>{repeat_rows(g, r)};
  });
}

Var mean_axis0(const Var& a) {
  const double b = static_cast<double>(a.value().rows);
  return smul(sum_axis0(a), 1.0 / b);
}

Var repeat_rows(const Var& a, std::size_t n) {
  const Tensor& x = a.value();
  if (x.rows != 1) shape_error("repeat_rows", x);
  Tensor out(n, x.cols);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) out.data[i * x.cols + j] = x.data[j];
  return emit(tape_of(a), std::move(out), {a},
              [](const Var& g) { return std::vector<Var>{sum_axis0(g)}; });
}

Var broadcast_scalar(const Var& s, std::size_t r, std::size_t c) {
  const Tensor& x = s.value();
  if (!x.is_scalar()) shape_error("broadcast_scalar", x);
  Tensor out = Tensor::full(r, c, x.data[0]);
  return emit(tape_of(s), std::move(out), {s},
              [](const Var& g) { return std::vector<Var>{sum_all(g)}; });
}

Var concat_cols(const Var& a, const Var& b) {
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  if (x.rows != y.rows) shape_error("concat_cols", x, y);
  Tensor out(x.rows, x.cols + y.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t j = 0; j < x.cols; ++j) out.at(i, j) = x.at(i, j);
    for (std::size_t j = 0; j < y.cols; ++j) out.at(i, x.cols + j) = y.at(i, j);
  }
  const std::size_t split = x.cols, total = x.cols + y.cols;
  return emit(tape_of(a, b), std::move(out), {a, b}, [split, total](const Var& g) {
    return std::vector<Var>{slice_cols(g, 0, split), slice_cols(g, split, total)};
  });
}

Var slice_cols(const Var& a, std::size_t c0, std::size_t c1) {
  const Tensor& x = a.value();
  if (c0 >= c1 || c1 > x.cols) shape_error("slice_cols", x);
  Tensor out(x.rows, c1 - c0);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = c0; j < c1; ++j) out.at(i, j - c0) = x.at(i, j);
  const std::size_t cols = x.cols;
  return emit(tape_of(a), std::move(out), {a}, [c0, cols](const Var& g) {
    const Tensor& gv = g.value();
    // Embed back into the full width as a concat with zero blocks, so the
    // result stays tracked.
    std::vector<Var> parts;
    if (c0 > 0) parts.push_back(Var::constant(Tensor::zeros(gv.rows, c0)));
    parts.push_back(g);
    if (c0 + gv.cols < cols)
      parts.push_back(Var::constant(Tensor::zeros(gv.rows, cols - c0 - gv.cols)));
    Var acc = parts[0];
    for (std::size_t k = 1; k < parts.size(); ++k) acc = concat_cols(acc, parts[k]);
    return std::vector<Var>{acc};
  });
}

Var detach(const Var& v) { return Var::constant(v.value()); }

GradCheckResult grad_check(
    const std::function<Var(Tape&, const std::vector<Var>&)>& f,
    const std::vector<Tensor>& params, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("grad_check: h must be positive");

  auto eval = [&](const std::vector<Tensor>& p) {
    Tape tape;
    std::vector<Var> leaves;
    leaves.reserve(p.size());
    for (const Tensor& t : p) leaves.push_back(tape.leaf(t));
    Var loss = f(tape, leaves);
    const double v = loss.value().item();
    if (!std::isfinite(v)) throw std::runtime_error("grad_check: non-finite loss value");
    return v;
  };

  // Analytic gradients once at the base point.
  Tape tape;
  std::vector<Var> leaves;
  for (const Tensor& t : params) leaves.push_back(tape.leaf(t));
  Var loss = f(tape, leaves);
  if (!std::isfinite(loss.value().item()))
    throw std::runtime_error("grad_check: non-finite loss value");
  Gradients grads = tape.backward(loss);

  GradCheckResult result;
  std::size_t flat = 0;
  std::vector<Tensor> work = params;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    const Var g = grads.grad(leaves[pi]);
    for (std::size_t i = 0; i < params[pi].data.size(); ++i, ++flat) {
      const double orig = work[pi].data[i];
      work[pi].data[i] = orig + h;
      const double fp = eval(work);
      work[pi].data[i] = orig - h;
      const double fm = eval(work);
      work[pi].data[i] = orig;
      const double numeric = (fp - fm) / (2.0 * h);
      const double analytic = g.value().data[i];
      const double denom =
          std::max({std::fabs(numeric), std::fabs(analytic), 1e-8});
      const double rel = std::fabs(numeric - analytic) / denom;
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_index = flat;
      }
    }
  }
  return result;
}

}  // namespace mtgan
