#pragma once

#include <functional>

#include "mtgan/autodiff.hpp"

namespace mtgan {

struct LossWeights {
  double lambda_cyc = 10.0;
  double lambda_idt = 5.0;

  void validate() const;
};

// Maps a batch to generated samples.
using GenFn = std::function<Var(const Var&)>;
// Maps a batch to discriminator pre-sigmoid scores [B,1]; probabilities are
// σ(logits), so log D and log(1-D) reduce to the stable log-sigmoid.
using DiscFn = std::function<Var(const Var&)>;

struct LossValues {
  double adv_forward = 0.0;
  double adv_backward = 0.0;
  double cyc = 0.0;
  double idt = 0.0;
  double total = 0.0;
  bool finite() const;
};

struct LossBreakdown {
  Var adv_forward;
  Var adv_backward;
  Var cyc;
  Var idt;
  Var total;
  LossWeights weights;
  bool idt_applied = true;

  LossValues values() const;
};

// E[log D(y)] + E[log(1-D(G(x)))], means over the given batches.
Var adversarial_loss(const GenFn& gen, const DiscFn& disc, const Var& x_batch,
                     const Var& y_batch);

// E[ |g2(g1(x))-x|_1 ] + E[ |g1(g2(y))-y|_1 ], L1 summed per sample.
Var cycle_loss(const GenFn& g1, const GenFn& g2, const Var& x_batch, const Var& y_batch);

// E[ |g2(x)-x|_1 ] + E[ |g1(y)-y|_1 ]; requires equal domain dims.
Var identity_loss(const GenFn& g1, const GenFn& g2, const Var& x_batch, const Var& y_batch);

// Full objective: adv(F,D_Y,X->Y) + adv(H,D_X,Y->X) + λ_cyc·cyc + λ_idt·idt.
// If the two domains differ in width, the identity term is dropped (λ_idt
// treated as 0) and idt_applied is false.
LossBreakdown composite_objective(const GenFn& F, const GenFn& H, const DiscFn& D_X,
                                  const DiscFn& D_Y, const Var& x_batch,
                                  const Var& y_batch, const LossWeights& w);

}  // namespace mtgan
