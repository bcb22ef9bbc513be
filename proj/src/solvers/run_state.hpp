#pragma once

#include "saddle/solvers.hpp"

#include <chrono>

namespace saddle::detail {

// Iterate, counters, checkpoints and stopping rules shared by every solver.
class RunState {
 public:
  RunState(const OperatorProblem& p, const SolverConfig& cfg, const RunHooks& hooks);

  // Rescaled iterate.
  PrimalDualPoint z;
  CostModel cost;
  std::uint64_t iteration = 0;
  std::uint64_t epoch = 0;
  std::uint64_t refreshes = 0;

  const OperatorProblem& problem() const { return problem_; }
  const SolverConfig& config() const { return cfg_; }
  const ForwardOperator& op() const { return *problem_.forward; }
  const Resolvent& resolvent() const { return *problem_.resolvent; }

  void begin();
  // Call after every iteration; false means stop.
  bool step_done();
  void epoch_done();
  bool budget_left() const;
  SolveResult finish(double step, double tau = 0.0);

  void apply_resolvent(double sigma, PrimalDualPoint& w);

  SolveResult result;

 private:
  double distance_sq() const;
  void record();

  const OperatorProblem& problem_;
  const SolverConfig& cfg_;
  const RunHooks& hooks_;
  std::optional<PrimalDualPoint> reference_;
  PrimalDualPoint start_;
  double initial_dist_sq_ = 0.0;
  double divergence_base_ = 0.0;
  double next_checkpoint_ = 0.0;
  bool stop_ = false;
  std::chrono::steady_clock::time_point started_;
};

}  // namespace saddle::detail
