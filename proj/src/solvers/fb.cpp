#include "run_state.hpp"

namespace saddle {

SolveResult solve_fb(const OperatorProblem& p, const SolverConfig& cfg, const RunHooks& hooks) {
  detail::RunState s(p, cfg, hooks);
  const double sigma = cfg.step ? *cfg.step : fb_step(p.constants);
  if (cfg.arrow_hurwicz && !p.resolvent->separable())
    throw std::invalid_argument("serial primal-dual updates need a separable resolvent");
  PrimalDualPoint w = PrimalDualPoint::zeros_like(s.z);
  Vector part;
  s.begin();
  while (s.budget_left()) {
    if (cfg.arrow_hurwicz) {
      s.op().apply_primal_part(s.z, part);
      part = s.z.x - sigma * part;
      s.resolvent().apply_primal(sigma, part, s.z.x);
      s.op().apply_dual_part(s.z, part);
      part = s.z.y - sigma * part;
      s.resolvent().apply_dual(sigma, part, s.z.y);
      s.cost.add_touches(2.0 * s.op().part_touches());
      s.cost.add_prox(s.resolvent().cost_estimate());
    } else {
      s.op().apply(s.z, w);
      s.cost.add_full_pass();
      w *= -sigma;
      w += s.z;
      s.apply_resolvent(sigma, w);
      std::swap(s.z, w);
    }
    if (!s.step_done()) break;
  }
  return s.finish(sigma);
}

SolveResult solve_fb_accelerated(const OperatorProblem& p, const SolverConfig& cfg, const RunHooks& hooks) {
  if (!probe_affine(*p.forward, cfg.seed ^ 0xaffu))
    throw std::invalid_argument("accelerated forward-backward needs an affine operator");
  detail::RunState s(p, cfg, hooks);
  const double sigma = cfg.step ? *cfg.step : fb_accelerated_step(p.constants);
  const double theta = fb_accelerated_momentum(p.constants);
  PrimalDualPoint previous = s.z;
  PrimalDualPoint ahead = PrimalDualPoint::zeros_like(s.z);
  PrimalDualPoint w = PrimalDualPoint::zeros_like(s.z);
  s.begin();
  while (s.budget_left()) {
    // ahead = z + theta (z - previous)
    ahead = s.z;
    ahead *= 1.0 + theta;
    ahead.axpy(-theta, previous);
    s.op().apply(ahead, w);
    s.cost.add_full_pass();
    w *= -sigma;
    w += s.z;
    s.apply_resolvent(sigma, w);
    std::swap(previous, s.z);
    std::swap(s.z, w);
    if (!s.step_done()) break;
  }
  return s.finish(sigma);
}

SolveResult solve_fb_stochastic(const OperatorProblem& p, const SolverConfig& cfg, const RunHooks& hooks) {
  detail::RunState s(p, cfg, hooks);
  Sampler sampler(p.forward->distribution(), cfg.seed);
  std::vector<ComponentIndex> batch;
  PrimalDualPoint w = PrimalDualPoint::zeros_like(s.z);
  double sigma = 0.0;
  s.begin();
  for (std::uint64_t t = 1; s.budget_left(); ++t) {
    sigma = cfg.step ? *cfg.step : fb_stochastic_step(p.constants, t, cfg.steps);
    sampler.draw_batch(cfg.batch, batch);
    stochastic_direction(s.op(), s.z, batch, w);
    for (ComponentIndex i : batch) s.cost.add_touches(static_cast<double>(s.op().component_touches(i)));
    w *= -sigma;
    w += s.z;
    s.apply_resolvent(sigma, w);
    std::swap(s.z, w);
    if (!s.step_done()) break;
  }
  return s.finish(sigma);
}

}  // namespace saddle
