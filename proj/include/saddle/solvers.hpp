#pragma once

#include "saddle/core.hpp"
#include "saddle/cost.hpp"
#include "saddle/operator.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace saddle {

enum class Algorithm { FB, FBAccelerated, FBStochastic, SVRG, SAGA, SVRGAccelerated };

const char* to_string(Algorithm a);
// Accepts fb, fb-acc, fb-sto, svrg, saga, svrg-acc.
Algorithm parse_algorithm(const std::string& tag);

// Appendix: the constants used in the convergence proofs. MainText: the shorter forms.
enum class StepRule { Appendix, MainText };
// Fixed: refresh the prox center on the proven epoch schedule.
// Heuristic: refresh one epoch after the progress measure drops below its value at the last refresh.
enum class RefreshRule { Fixed, Heuristic };

struct SolverConfig {
  Algorithm algorithm = Algorithm::SVRG;
  std::size_t batch = 1;
  double max_passes = 50.0;
  std::uint64_t max_iterations = std::numeric_limits<std::uint64_t>::max();
  // In passes; 0 records every iteration.
  double checkpoint_stride = 0.25;
  // Extra checkpoints every this many iterations (0: off) and at epoch ends.
  std::uint64_t checkpoint_every = 0;
  bool checkpoint_epochs = false;
  std::uint64_t seed = 0;
  std::optional<double> step;
  std::optional<double> tau;
  // Defaults to on exactly when the sampling distribution is non-uniform.
  std::optional<bool> saga_resample;
  StepRule steps = StepRule::Appendix;
  RefreshRule refresh = RefreshRule::Fixed;
  // Serial primal-then-dual update for the batch method; needs a separable resolvent.
  bool arrow_hurwicz = false;
  // Stop once dist_sq <= target_eps * initial dist_sq (needs a reference point).
  std::optional<double> target_eps;
  double divergence_factor = 1e6;
};

struct Checkpoint {
  std::uint64_t iteration = 0;
  std::uint64_t epoch = 0;
  std::uint64_t refreshes = 0;
  double passes = 0.0;
  double dist_sq = std::numeric_limits<double>::quiet_NaN();
  double eps = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  double test_loss = std::numeric_limits<double>::quiet_NaN();
  double wall_ms = 0.0;
};

struct Trace {
  std::vector<Checkpoint> records;
};

struct RunHooks {
  // Original coordinates; the origin when absent.
  std::optional<PrimalDualPoint> start;
  std::optional<PrimalDualPoint> reference;
  // Fills gap and test metrics at a checkpoint; receives original coordinates.
  std::function<void(const PrimalDualPoint&, Checkpoint&)> evaluate;
};

struct SolveResult {
  Trace trace;
  PrimalDualPoint solution;  // original coordinates
  CostModel cost{1};
  double step = 0.0;
  double tau = 0.0;
  std::uint64_t inner_iterations = 0;  // per epoch, variance-reduced methods
  std::uint64_t refresh_period = 0;    // epochs between prox-center refreshes
  std::uint64_t iterations = 0;
  bool reached_target = false;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::uint64_t iteration, Trace partial = {})
      : std::runtime_error(what + " at iteration " + std::to_string(iteration)),
        iteration_(iteration),
        partial_(std::move(partial)) {}
  std::uint64_t iteration() const { return iteration_; }
  // Checkpoints recorded before the failure.
  const Trace& partial_trace() const { return partial_; }

 private:
  std::uint64_t iteration_;
  Trace partial_;
};

SolveResult solve_fb(const OperatorProblem& p, const SolverConfig& cfg, const RunHooks& hooks = {});
SolveResult solve_fb_accelerated(const OperatorProblem& p, const SolverConfig& cfg, const RunHooks& hooks = {});
SolveResult solve_fb_stochastic(const OperatorProblem& p, const SolverConfig& cfg, const RunHooks& hooks = {});
SolveResult solve_svrg(const OperatorProblem& p, const SolverConfig& cfg, const RunHooks& hooks = {});
SolveResult solve_saga(const OperatorProblem& p, const SolverConfig& cfg, const RunHooks& hooks = {});
SolveResult solve_svrg_accelerated(const OperatorProblem& p, const SolverConfig& cfg, const RunHooks& hooks = {});
// Dispatches on cfg.algorithm.
SolveResult solve(const OperatorProblem& p, const SolverConfig& cfg, const RunHooks& hooks = {});

// Step sizes and schedule lengths, rescaled coordinates.
double fb_step(const SmoothnessConstants& c);
double fb_accelerated_step(const SmoothnessConstants& c);
double fb_accelerated_momentum(const SmoothnessConstants& c);
double fb_stochastic_step(const SmoothnessConstants& c, std::uint64_t t, StepRule rule);
double svrg_step(const SmoothnessConstants& c, std::size_t m);
std::uint64_t svrg_inner_iterations(const SmoothnessConstants& c, std::size_t m, double tau, StepRule rule);
std::uint64_t acceleration_refresh_period(double tau);
double saga_step(const SmoothnessConstants& c, std::size_t m, std::uint64_t index_count);
// Default acceleration parameter when the problem does not suggest one.
double default_tau(const OperatorProblem& p);

// B(snapshot) + (1/m) sum_i (B_i(z) - B_i(snapshot)) / pi_i
void svrg_direction(const ForwardOperator& op, const PrimalDualPoint& z, const PrimalDualPoint& snapshot,
                    const PrimalDualPoint& b_snapshot, std::span<const ComponentIndex> batch, PrimalDualPoint& out);
// G + (1/m) sum_i (B_i(z) - g_i) / pi_i
void saga_direction(const ForwardOperator& op, const SagaTable& table, const PrimalDualPoint& z,
                    std::span<const ComponentIndex> batch, PrimalDualPoint& out);
// (1/m) sum_i B_i(z) / pi_i
void stochastic_direction(const ForwardOperator& op, const PrimalDualPoint& z, std::span<const ComponentIndex> batch,
                          PrimalDualPoint& out);

// |z - T z| with T the forward-backward map at step 1/L^2, divided by 1 - Lip(T):
// an upper bound on the distance to the solution, rescaled coordinates.
double fixed_point_distance_bound(const OperatorProblem& p, const PrimalDualPoint& z_rescaled);

// Checks B(t a + (1 - t) b) = t B(a) + (1 - t) B(b) on three random triples.
bool probe_affine(const ForwardOperator& op, std::uint64_t seed, double tol = 1e-10);

}  // namespace saddle
