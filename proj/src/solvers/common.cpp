#include "run_state.hpp"

#include <algorithm>
#include <cmath>

namespace saddle {

namespace detail {

RunState::RunState(const OperatorProblem& p, const SolverConfig& cfg, const RunHooks& hooks)
    : cost(p.forward ? p.forward->data_size() : 1), problem_(p), cfg_(cfg), hooks_(hooks) {
  if (!p.forward || !p.resolvent) throw std::invalid_argument("operator problem is incomplete");
  if (cfg.batch == 0) throw std::invalid_argument("mini-batch size must be at least 1");
  if (cfg.batch > p.forward->distribution().support_size())
    throw std::invalid_argument("mini-batch size exceeds the number of components");
  if (cfg.step && !(*cfg.step > 0.0)) throw std::invalid_argument("step-size override must be positive");
  if (cfg.tau && !(*cfg.tau >= 0.0)) throw std::invalid_argument("acceleration parameter must be nonnegative");
  if (cfg.checkpoint_stride < 0.0) throw std::invalid_argument("checkpoint stride must be nonnegative");
  const Index d = p.forward->primal_dim();
  const Index n = p.forward->dual_dim();
  p.geometry.require_shape(PrimalDualPoint(d, n));
  z = hooks.start ? rescale(p.geometry, *hooks.start) : PrimalDualPoint(d, n);
  if (hooks.reference) reference_ = rescale(p.geometry, *hooks.reference);
  if (cfg.target_eps && !reference_) throw std::invalid_argument("a target accuracy needs a reference point");
  verify_split(*p.forward, cfg.seed ^ 0x51u);
  started_ = std::chrono::steady_clock::now();
}

double RunState::distance_sq() const {
  if (reference_) return (z - *reference_).squared_norm();
  return (z - start_).squared_norm();
}

void RunState::begin() {
  start_ = z;
  initial_dist_sq_ = distance_sq();
  if (reference_) {
    divergence_base_ = std::max(initial_dist_sq_, 1e-12 * std::max(reference_->squared_norm(), 1.0));
  } else {
    // No reference: |z - z0| <= |z - z*| + R with R the residual bound at z0.
    const double r = fixed_point_distance_bound(problem_, z);
    divergence_base_ = std::max(4.0 * r * r, 1e-12 * std::max(z.squared_norm(), 1.0));
  }
  next_checkpoint_ = cfg_.checkpoint_stride;
  record();
}

void RunState::record() {
  Checkpoint c;
  c.iteration = iteration;
  c.epoch = epoch;
  c.refreshes = refreshes;
  c.passes = cost.passes();
  if (reference_) {
    c.dist_sq = distance_sq();
    c.eps = initial_dist_sq_ > 0.0 ? c.dist_sq / initial_dist_sq_ : (c.dist_sq == 0.0 ? 0.0 : INFINITY);
  }
  if (hooks_.evaluate) hooks_.evaluate(unrescale(problem_.geometry, z), c);
  c.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started_).count();
  auto& recs = result.trace.records;
  if (!recs.empty() && !(c.passes > recs.back().passes)) return;
  recs.push_back(c);
}

bool RunState::step_done() {
  ++iteration;
  if (!z.all_finite()) throw DivergenceError("non-finite iterate", iteration, result.trace);
  const double d = distance_sq();
  if (d > cfg_.divergence_factor * divergence_base_)
    throw DivergenceError("iterate diverged: squared distance grew by more than the divergence factor", iteration,
                          result.trace);

  bool want_record = cfg_.checkpoint_stride == 0.0 ||
                     (cfg_.checkpoint_every != 0 && iteration % cfg_.checkpoint_every == 0);
  if (!want_record && cost.passes() >= next_checkpoint_) {
    want_record = true;
    next_checkpoint_ = (std::floor(cost.passes() / cfg_.checkpoint_stride) + 1.0) * cfg_.checkpoint_stride;
  }
  if (cfg_.target_eps && d <= *cfg_.target_eps * initial_dist_sq_) {
    result.reached_target = true;
    stop_ = true;
    want_record = true;
  }
  if (want_record) record();
  if (!budget_left()) stop_ = true;
  return !stop_;
}

void RunState::epoch_done() {
  ++epoch;
  if (cfg_.checkpoint_epochs) record();
}

bool RunState::budget_left() const {
  return !stop_ && cost.passes() < cfg_.max_passes && iteration < cfg_.max_iterations;
}

void RunState::apply_resolvent(double sigma, PrimalDualPoint& w) {
  resolvent().apply(sigma, w, w);
  cost.add_prox(resolvent().cost_estimate());
}

SolveResult RunState::finish(double step, double tau) {
  auto& recs = result.trace.records;
  if (recs.empty() || recs.back().iteration != iteration) record();
  result.solution = unrescale(problem_.geometry, z);
  result.cost = cost;
  result.step = step;
  result.tau = tau;
  result.iterations = iteration;
  return std::move(result);
}

}  // namespace detail

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::FB:
      return "fb";
    case Algorithm::FBAccelerated:
      return "fb-acc";
    case Algorithm::FBStochastic:
      return "fb-sto";
    case Algorithm::SVRG:
      return "svrg";
    case Algorithm::SAGA:
      return "saga";
    case Algorithm::SVRGAccelerated:
      return "svrg-acc";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& tag) {
  for (Algorithm a : {Algorithm::FB, Algorithm::FBAccelerated, Algorithm::FBStochastic, Algorithm::SVRG,
                      Algorithm::SAGA, Algorithm::SVRGAccelerated})
    if (tag == to_string(a)) return a;
  throw std::invalid_argument("unknown algorithm tag '" + tag + "'");
}

double fb_step(const SmoothnessConstants& c) {
  if (!(c.L > 0.0)) throw std::invalid_argument("batch step 1/L^2 needs L > 0; pass a step override");
  return 1.0 / (c.L * c.L);
}

double fb_accelerated_step(const SmoothnessConstants& c) {
  if (!(c.L > 0.0)) throw std::invalid_argument("accelerated step 1/(2L) needs L > 0; pass a step override");
  return 1.0 / (2.0 * c.L);
}

double fb_accelerated_momentum(const SmoothnessConstants& c) { return c.L / (c.L + 1.0); }

double fb_stochastic_step(const SmoothnessConstants& c, std::uint64_t t, StepRule rule) {
  const double td = static_cast<double>(t);
  if (rule == StepRule::MainText) return 2.0 / (td + 1.0 + 8.0 * c.Lbar * c.Lbar);
  return 2.0 / (td + 1.0 + 4.0 * (c.L * c.L + c.Lbar * c.Lbar));
}

double svrg_step(const SmoothnessConstants& c, std::size_t m) {
  return 1.0 / (c.L * c.L + 3.0 * c.Lbar * c.Lbar / static_cast<double>(m));
}

std::uint64_t svrg_inner_iterations(const SmoothnessConstants& c, std::size_t m, double tau, StepRule rule) {
  const double conditioning = (c.L * c.L + 3.0 * c.Lbar * c.Lbar / static_cast<double>(m)) / ((1.0 + tau) * (1.0 + tau));
  const double base = rule == StepRule::Appendix ? 1.0 : 0.0;
  const double count = std::ceil(std::log(4.0) * (base + conditioning));
  return static_cast<std::uint64_t>(std::max(1.0, count));
}

std::uint64_t acceleration_refresh_period(double tau) {
  return static_cast<std::uint64_t>(std::ceil(2.0 + 2.0 * std::log(1.0 + tau) / std::log(4.0 / 3.0)));
}

double saga_step(const SmoothnessConstants& c, std::size_t m, std::uint64_t index_count) {
  const double md = static_cast<double>(m);
  const double table_term = 3.0 * static_cast<double>(index_count) / (2.0 * md) - 1.0;
  const double smooth_term = c.L * c.L + 3.0 * c.Lbar * c.Lbar / md;
  return 1.0 / std::max(table_term, smooth_term);
}

double default_tau(const OperatorProblem& p) {
  if (p.acceleration_tau) return *p.acceleration_tau;
  const double count = static_cast<double>(p.forward->saga_index_count());
  return std::max(0.0, p.constants.Lbar / std::sqrt(count) - 1.0);
}

void svrg_direction(const ForwardOperator& op, const PrimalDualPoint& z, const PrimalDualPoint& snapshot,
                    const PrimalDualPoint& b_snapshot, std::span<const ComponentIndex> batch, PrimalDualPoint& out) {
  out = b_snapshot;
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  for (ComponentIndex i : batch) op.add_component_difference(i, z, snapshot, inv_m / op.probability(i), out);
}

void saga_direction(const ForwardOperator& op, const SagaTable& table, const PrimalDualPoint& z,
                    std::span<const ComponentIndex> batch, PrimalDualPoint& out) {
  out = table.sum();
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  for (ComponentIndex i : batch) table.add_correction(i, z, inv_m / op.probability(i), out);
}

void stochastic_direction(const ForwardOperator& op, const PrimalDualPoint& z, std::span<const ComponentIndex> batch,
                          PrimalDualPoint& out) {
  out.set_zero();
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  for (ComponentIndex i : batch) op.add_component(i, z, inv_m / op.probability(i), out);
}

double fixed_point_distance_bound(const OperatorProblem& p, const PrimalDualPoint& z) {
  const double L = p.constants.L;
  const double sigma = L > 0.0 ? 1.0 / (L * L) : 1.0;
  PrimalDualPoint w = PrimalDualPoint::zeros_like(z);
  p.forward->apply(z, w);
  w *= -sigma;
  w += z;
  p.resolvent->apply(sigma, w, w);
  const double residual = std::sqrt((z - w).squared_norm());
  const double contraction = std::sqrt(1.0 + sigma * sigma * L * L) / (1.0 + sigma);
  return residual / (1.0 - contraction);
}

bool probe_affine(const ForwardOperator& op, std::uint64_t seed, double tol) {
  Rng rng(seed);
  const Index d = op.primal_dim();
  const Index n = op.dual_dim();
  for (int trial = 0; trial < 3; ++trial) {
    const PrimalDualPoint a = random_point(d, n, rng);
    const PrimalDualPoint b = random_point(d, n, rng);
    const double t = 0.1 + 0.8 * rng.uniform01();
    PrimalDualPoint ba(d, n), bb(d, n), bm(d, n);
    op.apply(a, ba);
    op.apply(b, bb);
    op.apply(t * a + (1.0 - t) * b, bm);
    const PrimalDualPoint mix = t * ba + (1.0 - t) * bb;
    const double scale = std::max({std::sqrt(ba.squared_norm()), std::sqrt(bb.squared_norm()), 1.0});
    if (std::sqrt((bm - mix).squared_norm()) > tol * scale) return false;
  }
  return true;
}

}  // namespace saddle
