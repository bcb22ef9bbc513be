#include "saddle/solvers.hpp"

namespace saddle {

SolveResult solve(const OperatorProblem& p, const SolverConfig& cfg, const RunHooks& hooks) {
  switch (cfg.algorithm) {
    case Algorithm::FB:
      return solve_fb(p, cfg, hooks);
    case Algorithm::FBAccelerated:
      return solve_fb_accelerated(p, cfg, hooks);
    case Algorithm::FBStochastic:
      return solve_fb_stochastic(p, cfg, hooks);
    case Algorithm::SVRG:
      return solve_svrg(p, cfg, hooks);
    case Algorithm::SAGA:
      return solve_saga(p, cfg, hooks);
    case Algorithm::SVRGAccelerated:
      return solve_svrg_accelerated(p, cfg, hooks);
  }
  throw std::invalid_argument("unknown algorithm");
}

}  // namespace saddle
