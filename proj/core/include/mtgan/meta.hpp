#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtgan/losses.hpp"
#include "mtgan/nn.hpp"
#include "mtgan/optim.hpp"
#include "mtgan/tasks.hpp"

namespace mtgan {

struct Hyperparams {
  double alpha = 1e-4;        // inner SGD learning rate
  double beta = 2e-4;         // meta / adaptation Adam learning rate
  LossWeights weights;        // lambda_cyc=10, lambda_idt=5
  std::size_t inner_iters = 100;  // I
  EpisodeConfig episode;
  bool second_order = false;
  std::uint64_t seed = 0;

  NetSpec gen_spec;
  NetSpec disc_spec;

  bool alternating = false;   // alternate D/G updates instead of simultaneous
  double grad_clip = 0.0;     // 0 = off
  bool skip_diverged = false;
  double max_skip_fraction = 0.2;
  double divergence_param_norm = 1e6;

  void validate() const;
  std::string mode_name() const { return second_order ? "second_order" : "first_order"; }

  static Hyperparams desk_defaults();
};

struct MetaState {
  ParamValues theta_g;
  ParamValues theta_d;
  AdamState adam_g;
  AdamState adam_d;
  std::int64_t step = 0;

  static MetaState init(const Hyperparams& hp);
};

// The four task-local networks, tracked on some tape.
struct FineTuneState {
  ParamSet f;
  ParamSet h;
  ParamSet d_x;
  ParamSet d_y;
  std::size_t iter = 0;
};

// Plain-value form used by adaptation and checkpoint-free evaluation.
struct FineTuneValues {
  ParamValues f;
  ParamValues h;
  ParamValues d_x;
  ParamValues d_y;
  std::size_t iter = 0;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& task_id, const LossValues& loss,
                  std::vector<LossValues> partial_curve = {});
  std::string task_id;
  LossValues loss;
  std::vector<LossValues> partial_curve;
};

// One task's fine-tuning rollout plus the leaves the meta-gradient of the
// query objective should be taken against.
struct TaskRollout {
  FineTuneState state;
  ParamSet grad_target_g;  // maps onto theta_g
  ParamSet grad_target_d;  // maps onto theta_d
};

// Initialization update: support loss with the forward nets live and the
// backward nets as detached weight copies; each of the four nets takes one
// signed SGD step from its own gradient.
FineTuneState init_step(Tape& tape, const ParamSet& theta_g, const ParamSet& theta_d,
                        const TranslationTask& task, const Hyperparams& hp);

// One simultaneous fine-tuning update of all four nets from a single support
// loss evaluation: generators descend, discriminators ascend.
FineTuneState inner_step(Tape& tape, const FineTuneState& state,
                         const TranslationTask& task, const Hyperparams& hp);

// init_step followed by exactly inner_iters inner_steps. In second-order mode
// everything stays on `tape` and grad targets are the meta-parameter leaves;
// in first-order mode updates run on short-lived internal tapes and the grad
// targets are the final forward nets re-bound as leaves of `tape`.
TaskRollout fine_tune(Tape& tape, const MetaState& meta, const TranslationTask& task,
                      const Hyperparams& hp);

LossBreakdown query_objective(const FineTuneState& state, const TranslationTask& task,
                              const Hyperparams& hp);

// Support-loss breakdown for an arbitrary tracked state (used for metrics).
LossBreakdown support_objective(const FineTuneState& state, const TranslationTask& task,
                                const Hyperparams& hp);

struct MetricsRow {
  std::int64_t step = 0;
  std::string task_id;
  LossValues loss;
  std::string mode;
};

// Meta-optimization over one batch of tasks: sum of query losses, Adam descent
// on theta_g and ascent on theta_d. Tasks contribute in list order.
std::pair<MetaState, std::vector<MetricsRow>> meta_update(
    const MetaState& meta, const std::vector<TranslationTask>& tasks,
    const Hyperparams& hp);

struct TrainSinks {
  std::function<void(const MetricsRow&)> metrics;
  std::function<void(const MetaState&, std::int64_t step, bool final)> checkpoint;
  std::size_t checkpoint_every = 0;  // 0 = final only
};

MetaState meta_train(const TaskDistribution& dist, const Hyperparams& hp,
                     const TrainSinks& sinks);

// Inference-time adaptation: `steps` Adam updates of four task nets seeded
// from the given initial values; fresh optimizer states, lr = hp.beta. The
// curve holds the support loss at each step before its update.
std::pair<FineTuneValues, std::vector<LossValues>> adapt_from(
    const ParamValues& f0, const ParamValues& h0, const ParamValues& dx0,
    const ParamValues& dy0, const TranslationTask& task, const Hyperparams& hp,
    std::size_t steps);

std::pair<FineTuneValues, std::vector<LossValues>> adapt(
    const MetaState& meta, const TranslationTask& task, const Hyperparams& hp,
    std::size_t steps);

// Closure helpers shared across modules.
GenFn make_gen(const NetSpec& spec, const ParamSet& params);
DiscFn make_disc(const NetSpec& spec, const ParamSet& params);

}  // namespace mtgan
