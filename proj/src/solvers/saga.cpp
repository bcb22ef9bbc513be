#include "run_state.hpp"

namespace saddle {

SolveResult solve_saga(const OperatorProblem& p, const SolverConfig& cfg, const RunHooks& hooks) {
  detail::RunState s(p, cfg, hooks);
  const std::size_t m = cfg.batch;
  const std::uint64_t index_count = p.forward->saga_index_count();
  const double sigma = cfg.step ? *cfg.step : saga_step(p.constants, m, index_count);
  const bool resample = cfg.saga_resample.value_or(!p.forward->distribution().is_uniform());
  const std::uint64_t resum_every = 10 * index_count;

  Sampler sampler(p.forward->distribution(), cfg.seed);
  std::vector<ComponentIndex> batch;
  PrimalDualPoint dir = PrimalDualPoint::zeros_like(s.z);

  s.begin();
  std::uint64_t init_touches = 0;
  auto table = p.forward->make_saga_table(s.z, init_touches);
  s.cost.add_touches(static_cast<double>(init_touches));

  std::uint64_t updates = 0;
  while (s.budget_left()) {
    sampler.draw_batch(m, batch);
    saga_direction(s.op(), *table, s.z, batch, dir);
    for (ComponentIndex i : batch) s.cost.add_touches(static_cast<double>(s.op().component_touches(i)));
    if (!resample) {
      // Store the values just computed, at the pre-update point.
      for (ComponentIndex i : batch) table->refresh(i, s.z);
      updates += m;
    }
    dir *= -sigma;
    dir += s.z;
    s.apply_resolvent(sigma, dir);
    std::swap(s.z, dir);
    if (resample) {
      sampler.draw_uniform_batch(m, batch);
      for (ComponentIndex i : batch) {
        table->refresh(i, s.z);
        s.cost.add_touches(static_cast<double>(s.op().component_touches(i)));
      }
      updates += m;
    }
    if (updates >= resum_every) {
      const double drift = table->resum();
      if (drift > 1e-6)
        throw std::logic_error("stored table sum drifted from its entries (relative drift " + std::to_string(drift) +
                               ")");
      updates = 0;
    }
    if (!s.step_done()) break;
  }
  return s.finish(sigma);
}

}  // namespace saddle
