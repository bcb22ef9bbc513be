#include "run_state.hpp"

#include <cmath>

namespace saddle {

namespace {

// Progress measure for the heuristic refresh: the duality gap when the problem has
// one, else the forward-backward residual at the snapshot.
double progress_measure(detail::RunState& s, const PrimalDualPoint& snapshot, const PrimalDualPoint& b_snapshot,
                        double sigma) {
  const OperatorProblem& p = s.problem();
  if (p.gap) {
    s.cost.add_full_pass();
    return p.gap(unrescale(p.geometry, snapshot));
  }
  PrimalDualPoint w = snapshot;
  w.axpy(-sigma, b_snapshot);
  s.apply_resolvent(sigma, w);
  return std::sqrt((w - snapshot).squared_norm());
}

// One code path for both methods; tau = 0 is plain SVRG.
SolveResult run_variance_reduced(const OperatorProblem& p, const SolverConfig& cfg, const RunHooks& hooks,
                                 double tau) {
  detail::RunState s(p, cfg, hooks);
  const std::size_t m = cfg.batch;
  const double sigma = cfg.step ? *cfg.step : svrg_step(p.constants, m);
  const std::uint64_t inner = svrg_inner_iterations(p.constants, m, tau, cfg.steps);
  const std::uint64_t period = tau > 0.0 ? acceleration_refresh_period(tau) : 0;
  const bool heuristic = tau > 0.0 && cfg.refresh == RefreshRule::Heuristic;

  // Resolvent of the shifted operator tau (z - center) + A + B, with B frozen.
  const double center_weight = sigma * tau * (1.0 + tau);
  const double normalizer = 1.0 / (1.0 + center_weight);
  const double direction_weight = sigma * (1.0 + tau);
  const double inner_step = direction_weight * normalizer;

  Sampler sampler(p.forward->distribution(), cfg.seed);
  std::vector<ComponentIndex> batch;
  PrimalDualPoint snapshot = s.z;
  PrimalDualPoint b_snapshot = PrimalDualPoint::zeros_like(s.z);
  PrimalDualPoint dir = PrimalDualPoint::zeros_like(s.z);
  PrimalDualPoint center = s.z;
  double measure_at_refresh = 0.0;
  bool pending = false;

  s.result.inner_iterations = inner;
  s.result.refresh_period = period;
  s.begin();
  for (std::uint64_t u = 1; s.budget_left(); ++u) {
    if (tau > 0.0 && !heuristic && u % period == 0) {
      center = s.z;
      ++s.refreshes;
    }
    snapshot = s.z;
    s.op().apply(snapshot, b_snapshot);
    s.cost.add_full_pass();
    if (heuristic) {
      const double measure = progress_measure(s, snapshot, b_snapshot, sigma);
      if (u == 1) {
        measure_at_refresh = measure;
      } else if (pending) {
        center = snapshot;
        ++s.refreshes;
        measure_at_refresh = measure;
        pending = false;
      } else if (measure < measure_at_refresh) {
        pending = true;
      }
    }

    bool running = true;
    std::uint64_t k = 0;
    for (; k < inner && running; ++k) {
      sampler.draw_batch(m, batch);
      svrg_direction(s.op(), s.z, snapshot, b_snapshot, batch, dir);
      for (ComponentIndex i : batch) s.cost.add_touches(static_cast<double>(s.op().component_touches(i)));
      if (tau == 0.0) {
        dir *= -sigma;
        dir += s.z;
        s.apply_resolvent(sigma, dir);
      } else {
        dir *= -direction_weight;
        dir += s.z;
        dir.axpy(center_weight, center);
        dir *= normalizer;
        s.apply_resolvent(inner_step, dir);
      }
      std::swap(s.z, dir);
      running = s.step_done();
    }
    if (k == inner) s.epoch_done();
    if (!running) break;
  }
  return s.finish(sigma, tau);
}

}  // namespace

SolveResult solve_svrg(const OperatorProblem& p, const SolverConfig& cfg, const RunHooks& hooks) {
  return run_variance_reduced(p, cfg, hooks, 0.0);
}

SolveResult solve_svrg_accelerated(const OperatorProblem& p, const SolverConfig& cfg, const RunHooks& hooks) {
  const double tau = cfg.tau ? *cfg.tau : default_tau(p);
  if (!(tau >= 0.0)) throw std::invalid_argument("acceleration parameter must be nonnegative");
  return run_variance_reduced(p, cfg, hooks, tau);
}

}  // namespace saddle
