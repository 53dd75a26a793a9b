#include "mtgan/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace mtgan {

void LossWeights::validate() const {
  if (!(lambda_cyc >= 0.0) || !(lambda_idt >= 0.0) || !std::isfinite(lambda_cyc) ||
      !std::isfinite(lambda_idt))
    throw std::invalid_argument("LossWeights: lambdas must be finite and >= 0");
}

bool LossValues::finite() const {
  return std::isfinite(adv_forward) && std::isfinite(adv_backward) &&
         std::isfinite(cyc) && std::isfinite(idt) && std::isfinite(total);
}

LossValues LossBreakdown::values() const {
  LossValues v;
  v.adv_forward = adv_forward.value().item();
  v.adv_backward = adv_backward.value().item();
  v.cyc = cyc.value().item();
  v.idt = idt.value().item();
  v.total = total.value().item();
  return v;
}

namespace {

void check_nonempty(const Var& batch, const char* which) {
  if (batch.value().rows == 0)
    throw std::invalid_argument(std::string("loss: empty ") + which + " batch");
}

// Batch-mean of per-sample L1 distance between a and b.
Var mean_l1(const Var& a, const Var& b) {
  if (!a.value().same_shape(b.value())) shape_error("mean_l1", a.value(), b.value());
  const double n = static_cast<double>(a.value().rows);
  return smul(sum_all(vabs(sub(a, b))), 1.0 / n);
}

}  // namespace

Var adversarial_loss(const GenFn& gen, const DiscFn& disc, const Var& x_batch,
                     const Var& y_batch) {
  check_nonempty(x_batch, "x");
  check_nonempty(y_batch, "y");
  Var real_term = mean_all(vlog_sigmoid(disc(y_batch)));
  // log(1-σ(l)) == log σ(-l)
  Var fake_term = mean_all(vlog_sigmoid(neg(disc(gen(x_batch)))));
  return add(real_term, fake_term);
}

Var cycle_loss(const GenFn& g1, const GenFn& g2, const Var& x_batch, const Var& y_batch) {
  check_nonempty(x_batch, "x");
  check_nonempty(y_batch, "y");
  Var forward = mean_l1(g2(g1(x_batch)), x_batch);
  Var backward = mean_l1(g1(g2(y_batch)), y_batch);
  return add(forward, backward);
}

Var identity_loss(const GenFn& g1, const GenFn& g2, const Var& x_batch, const Var& y_batch) {
  check_nonempty(x_batch, "x");
  check_nonempty(y_batch, "y");
  if (x_batch.value().cols != y_batch.value().cols)
    throw std::invalid_argument("identity loss inapplicable: domain dims " +
                                std::to_string(x_batch.value().cols) + " vs " +
                                std::to_string(y_batch.value().cols));
  Var x_term = mean_l1(g2(x_batch), x_batch);
  Var y_term = mean_l1(g1(y_batch), y_batch);
  return add(x_term, y_term);
}

LossBreakdown composite_objective(const GenFn& F, const GenFn& H, const DiscFn& D_X,
                                  const DiscFn& D_Y, const Var& x_batch,
                                  const Var& y_batch, const LossWeights& w) {
  w.validate();
  LossBreakdown out;
  out.weights = w;
  out.adv_forward = adversarial_loss(F, D_Y, x_batch, y_batch);
  out.adv_backward = adversarial_loss(H, D_X, y_batch, x_batch);
  out.cyc = cycle_loss(F, H, x_batch, y_batch);
  if (x_batch.value().cols == y_batch.value().cols) {
    out.idt = identity_loss(F, H, x_batch, y_batch);
  } else {
    out.idt = Var::constant(Tensor::scalar(0.0));
    out.idt_applied = false;
  }
  const double lidt = out.idt_applied ? w.lambda_idt : 0.0;
  out.total = add(add(out.adv_forward, out.adv_backward),
                  add(smul(out.cyc, w.lambda_cyc), smul(out.idt, lidt)));
  return out;
}

}  // namespace mtgan
