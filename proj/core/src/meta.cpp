#include "mtgan/meta.hpp"

#include <cmath>
#include <stdexcept>

namespace mtgan {

void Hyperparams::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw std::invalid_argument("Hyperparams: alpha and beta must be positive");
  weights.validate();
  episode.validate();
  gen_spec.validate();
  disc_spec.validate();
  if (disc_spec.output != OutputActivation::SigmoidProb)
    throw std::invalid_argument("Hyperparams: discriminator must use sigmoid output");
}

Hyperparams Hyperparams::desk_defaults() {
  Hyperparams hp;
  hp.gen_spec = NetSpec{2, {64, 64}, 2, Activation::Tanh, OutputActivation::Identity};
  hp.disc_spec = NetSpec{2, {64, 64}, 1, Activation::Tanh, OutputActivation::SigmoidProb};
  return hp;
}

MetaState MetaState::init(const Hyperparams& hp) {
  MetaState s;
  s.theta_g = init_params(hp.gen_spec, hp.seed);
  s.theta_d = init_params(hp.disc_spec, hp.seed + 1);
  s.adam_g = AdamState::like(s.theta_g);
  s.adam_d = AdamState::like(s.theta_d);
  return s;
}

DivergenceError::DivergenceError(const std::string& tid, const LossValues& lv,
                                 std::vector<LossValues> curve)
    : std::runtime_error("training divergence on task " + tid),
      task_id(tid),
      loss(lv),
      partial_curve(std::move(curve)) {}

GenFn make_gen(const NetSpec& spec, const ParamSet& params) {
  return [spec, params](const Var& batch) { return forward(spec, params, batch); };
}

DiscFn make_disc(const NetSpec& spec, const ParamSet& params) {
  return [spec, params](const Var& batch) { return forward_logits(spec, params, batch); };
}

namespace {

LossBreakdown objective(const FineTuneState& st, const Var& x, const Var& y,
                        const Hyperparams& hp) {
  return composite_objective(make_gen(hp.gen_spec, st.f), make_gen(hp.gen_spec, st.h),
                             make_disc(hp.disc_spec, st.d_x),
                             make_disc(hp.disc_spec, st.d_y), x, y, hp.weights);
}

void check_finite(const LossBreakdown& lb, const std::string& task_id) {
  const LossValues v = lb.values();
  if (!v.finite()) throw DivergenceError(task_id, v);
}

double param_norm(const FineTuneState& st) {
  double s = 0.0;
  for (const ParamSet* p : {&st.f, &st.h, &st.d_x, &st.d_y})
    for (const auto& [n, v] : p->entries) {
      const double l = tmath::l2_norm(v.value());
      s += l * l;
    }
  return std::sqrt(s);
}

void check_norm(const FineTuneState& st, const std::string& task_id,
                const Hyperparams& hp, const LossValues& last) {
  if (param_norm(st) > hp.divergence_param_norm) throw DivergenceError(task_id, last);
}

FineTuneValues lower_state(const FineTuneState& st) {
  return FineTuneValues{lower(st.f), lower(st.h), lower(st.d_x), lower(st.d_y), st.iter};
}

FineTuneState lift_state(Tape& tape, const FineTuneValues& v) {
  return FineTuneState{lift(tape, v.f), lift(tape, v.h), lift(tape, v.d_x),
                       lift(tape, v.d_y), v.iter};
}

void accumulate(ParamValues& acc, const GradMap& g) {
  if (acc.entries.empty()) {
    for (const auto& [n, v] : g) acc.entries.emplace_back(n, v.value());
    return;
  }
  for (std::size_t i = 0; i < g.size(); ++i)
    acc.entries[i].second = tmath::add(acc.entries[i].second, g[i].second.value());
}

void clip(ParamValues& g, double max_norm) {
  if (max_norm <= 0.0) return;
  double s = 0.0;
  for (const auto& [n, t] : g.entries) {
    const double l = tmath::l2_norm(t);
    s += l * l;
  }
  s = std::sqrt(s);
  if (s > max_norm) {
    const double scale = max_norm / s;
    for (auto& [n, t] : g.entries) t = tmath::smul(t, scale);
  }
}

}  // namespace

FineTuneState init_step(Tape& tape, const ParamSet& theta_g, const ParamSet& theta_d,
                        const TranslationTask& task, const Hyperparams& hp) {
  if (task.support_x.rows == 0 || task.support_y.rows == 0)
    throw std::invalid_argument("init_step: empty support batch");
  // Backward-direction nets are weight copies cut from the meta-parameters:
  // they receive their own gradients but pass nothing back to theta.
  ParamSet wc_g = clone_as_leaves(tape, theta_g);
  ParamSet wc_d = clone_as_leaves(tape, theta_d);

  Var x = Var::constant(task.support_x);
  Var y = Var::constant(task.support_y);
  FineTuneState nets{theta_g, wc_g, wc_d, theta_d, 0};
  LossBreakdown lb = objective(nets, x, y, hp);
  check_finite(lb, task.task_id);
  Gradients grads = tape.backward(lb.total);

  FineTuneState out;
  out.f = combine(theta_g, grads_for(grads, theta_g), -hp.alpha);
  out.d_y = combine(theta_d, grads_for(grads, theta_d), +hp.alpha);
  out.h = combine(wc_g, grads_for(grads, wc_g), -hp.alpha);
  out.d_x = combine(wc_d, grads_for(grads, wc_d), +hp.alpha);
  out.iter = 0;
  check_norm(out, task.task_id, hp, lb.values());
  return out;
}

FineTuneState inner_step(Tape& tape, const FineTuneState& state,
                         const TranslationTask& task, const Hyperparams& hp) {
  Var x = Var::constant(task.support_x);
  Var y = Var::constant(task.support_y);

  FineTuneState out;
  LossValues last;
  if (!hp.alternating) {
    LossBreakdown lb = objective(state, x, y, hp);
    check_finite(lb, task.task_id);
    last = lb.values();
    Gradients grads = tape.backward(lb.total);
    out.f = combine(state.f, grads_for(grads, state.f), -hp.alpha);
    out.h = combine(state.h, grads_for(grads, state.h), -hp.alpha);
    out.d_x = combine(state.d_x, grads_for(grads, state.d_x), +hp.alpha);
    out.d_y = combine(state.d_y, grads_for(grads, state.d_y), +hp.alpha);
  } else {
    LossBreakdown lb_d = objective(state, x, y, hp);
    check_finite(lb_d, task.task_id);
    last = lb_d.values();
    Gradients gd = tape.backward(lb_d.total);
    FineTuneState mid = state;
    mid.d_x = combine(state.d_x, grads_for(gd, state.d_x), +hp.alpha);
    mid.d_y = combine(state.d_y, grads_for(gd, state.d_y), +hp.alpha);
    LossBreakdown lb_g = objective(mid, x, y, hp);
    check_finite(lb_g, task.task_id);
    Gradients gg = tape.backward(lb_g.total);
    out = mid;
    out.f = combine(state.f, grads_for(gg, state.f), -hp.alpha);
    out.h = combine(state.h, grads_for(gg, state.h), -hp.alpha);
  }
  out.iter = state.iter + 1;
  check_norm(out, task.task_id, hp, last);
  return out;
}

TaskRollout fine_tune(Tape& tape, const MetaState& meta, const TranslationTask& task,
                      const Hyperparams& hp) {
  TaskRollout out;
  if (hp.second_order) {
    out.grad_target_g = lift(tape, meta.theta_g);
    out.grad_target_d = lift(tape, meta.theta_d);
    FineTuneState st = init_step(tape, out.grad_target_g, out.grad_target_d, task, hp);
    for (std::size_t i = 0; i < hp.inner_iters; ++i) st = inner_step(tape, st, task, hp);
    out.state = std::move(st);
    return out;
  }
  // First-order: each update on its own short-lived tape, values carried over.
  FineTuneValues vals;
  {
    Tape t0;
    ParamSet tg = lift(t0, meta.theta_g);
    ParamSet td = lift(t0, meta.theta_d);
    vals = lower_state(init_step(t0, tg, td, task, hp));
  }
  for (std::size_t i = 0; i < hp.inner_iters; ++i) {
    Tape ti;
    FineTuneState st = lift_state(ti, vals);
    vals = lower_state(inner_step(ti, st, task, hp));
  }
  // Query-loss gradients w.r.t. the final forward nets map onto the meta
  // parameters; the dual-direction nets stay constant and their gradients are
  // discarded.
  out.state.f = lift(tape, vals.f);
  out.state.d_y = lift(tape, vals.d_y);
  out.state.h = lift_const(vals.h);
  out.state.d_x = lift_const(vals.d_x);
  out.state.iter = vals.iter;
  out.grad_target_g = out.state.f;
  out.grad_target_d = out.state.d_y;
  return out;
}

LossBreakdown query_objective(const FineTuneState& state, const TranslationTask& task,
                              const Hyperparams& hp) {
  Var x = Var::constant(task.query_x);
  Var y = Var::constant(task.query_y);
  return objective(state, x, y, hp);
}

LossBreakdown support_objective(const FineTuneState& state, const TranslationTask& task,
                                const Hyperparams& hp) {
  Var x = Var::constant(task.support_x);
  Var y = Var::constant(task.support_y);
  return objective(state, x, y, hp);
}

std::pair<MetaState, std::vector<MetricsRow>> meta_update(
    const MetaState& meta, const std::vector<TranslationTask>& tasks,
    const Hyperparams& hp) {
  if (tasks.empty()) throw std::invalid_argument("meta_update: need at least one task");
  ParamValues sum_g, sum_d;
  std::vector<MetricsRow> rows;
  for (const TranslationTask& task : tasks) {
    Tape tape;
    TaskRollout roll = fine_tune(tape, meta, task, hp);
    LossBreakdown lb = query_objective(roll.state, task, hp);
    check_finite(lb, task.task_id);
    Gradients grads = tape.backward(lb.total);
    accumulate(sum_g, grads_for(grads, roll.grad_target_g));
    accumulate(sum_d, grads_for(grads, roll.grad_target_d));
    rows.push_back(MetricsRow{meta.step, task.task_id, lb.values(), hp.mode_name()});
  }
  clip(sum_g, hp.grad_clip);
  clip(sum_d, hp.grad_clip);
  MetaState next = meta;
  std::tie(next.theta_g, next.adam_g) =
      adam_step(meta.theta_g, sum_g, meta.adam_g, hp.beta, Direction::Descent);
  std::tie(next.theta_d, next.adam_d) =
      adam_step(meta.theta_d, sum_d, meta.adam_d, hp.beta, Direction::Ascent);
  next.step = meta.step + 1;
  return {std::move(next), std::move(rows)};
}

MetaState meta_train(const TaskDistribution& dist, const Hyperparams& hp,
                     const TrainSinks& sinks) {
  MetaState state = MetaState::init(hp);
  const std::size_t batches = hp.episode.meta_batches;
  std::size_t skipped = 0;
  for (std::size_t b = 0; b < batches; ++b) {
    std::vector<TranslationTask> tasks;
    tasks.reserve(hp.episode.meta_batch);
    for (std::size_t j = 0; j < hp.episode.meta_batch; ++j)
      tasks.push_back(sample_task(dist, b * hp.episode.meta_batch + j, hp.episode));
    try {
      auto [next, rows] = meta_update(state, tasks, hp);
      state = std::move(next);
      if (sinks.metrics)
        for (const auto& r : rows) sinks.metrics(r);
    } catch (const DivergenceError& e) {
      if (!hp.skip_diverged) throw;
      ++skipped;
      if (static_cast<double>(skipped) >
          hp.max_skip_fraction * static_cast<double>(batches))
        throw std::runtime_error("meta_train aborted: " + std::to_string(skipped) +
                                 " of " + std::to_string(batches) +
                                 " meta-batches diverged (last task " + e.task_id + ")");
      state.step += 1;  // keep the step count aligned with the batch index
    }
    if (sinks.checkpoint && sinks.checkpoint_every > 0 &&
        (b + 1) % sinks.checkpoint_every == 0 && b + 1 < batches)
      sinks.checkpoint(state, state.step, false);
  }
  if (sinks.checkpoint) sinks.checkpoint(state, state.step, true);
  return state;
}

std::pair<FineTuneValues, std::vector<LossValues>> adapt_from(
    const ParamValues& f0, const ParamValues& h0, const ParamValues& dx0,
    const ParamValues& dy0, const TranslationTask& task, const Hyperparams& hp,
    std::size_t steps) {
  if (steps < 1) throw std::invalid_argument("adapt: steps must be >= 1");
  FineTuneValues vals{f0, h0, dx0, dy0, 0};
  AdamState af = AdamState::like(f0), ah = AdamState::like(h0);
  AdamState adx = AdamState::like(dx0), ady = AdamState::like(dy0);
  std::vector<LossValues> curve;
  curve.reserve(steps);
  for (std::size_t s = 0; s < steps; ++s) {
    Tape tape;
    FineTuneState st = lift_state(tape, vals);
    Var x = Var::constant(task.support_x);
    Var y = Var::constant(task.support_y);
    LossBreakdown lb = objective(st, x, y, hp);
    const LossValues lv = lb.values();
    if (!lv.finite()) throw DivergenceError(task.task_id, lv, curve);
    curve.push_back(lv);
    Gradients grads = tape.backward(lb.total);
    auto value_grads = [&](const ParamSet& p) {
      ParamValues g;
      for (const auto& [n, v] : grads_for(grads, p)) g.entries.emplace_back(n, v.value());
      return g;
    };
    std::tie(vals.f, af) =
        adam_step(vals.f, value_grads(st.f), af, hp.beta, Direction::Descent);
    std::tie(vals.h, ah) =
        adam_step(vals.h, value_grads(st.h), ah, hp.beta, Direction::Descent);
    std::tie(vals.d_x, adx) =
        adam_step(vals.d_x, value_grads(st.d_x), adx, hp.beta, Direction::Ascent);
    std::tie(vals.d_y, ady) =
        adam_step(vals.d_y, value_grads(st.d_y), ady, hp.beta, Direction::Ascent);
    vals.iter = s + 1;
    double norm = 0.0;
    for (const ParamValues* p : {&vals.f, &vals.h, &vals.d_x, &vals.d_y})
      for (const auto& [n, t] : p->entries) {
        const double l = tmath::l2_norm(t);
        norm += l * l;
      }
    if (std::sqrt(norm) > hp.divergence_param_norm)
      throw DivergenceError(task.task_id, lv, curve);
  }
  return {std::move(vals), std::move(curve)};
}

std::pair<FineTuneValues, std::vector<LossValues>> adapt(
    const MetaState& meta, const TranslationTask& task, const Hyperparams& hp,
    std::size_t steps) {
  return adapt_from(meta.theta_g, meta.theta_g, meta.theta_d, meta.theta_d, task, hp,
                    steps);
}

}  // namespace mtgan
