#include "saddle/quadratic_family.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace saddle;
using namespace testing_support;

namespace {

struct Fixture {
  Eigen::MatrixXd dense;
  Vector c, b;
  SaddleProblem sp;
  PrimalDualPoint oracle;
};

Fixture quadratic_fixture(SplitScheme split = {}, double lambda = 0.8, double gamma = 1.5) {
  Fixture f;
  f.dense = sparse_dense(10, 7, 0.7, 61);
  f.c = gaussian_vector(7, 62);
  f.b = gaussian_vector(10, 63);
  f.sp = separable_problem(coupling(f.dense), lambda, gamma, 0.0, f.c, f.b, split);
  f.oracle = dense_saddle(f.dense, lambda, gamma, f.c, f.b);
  return f;
}

double relative_error(const Fixture& f, const PrimalDualPoint& z) {
  return distance_sq(f.sp.geometry, z, f.oracle) / omega_sq(f.sp.geometry, f.oracle);
}

const Algorithm kAll[] = {Algorithm::FB, Algorithm::FBAccelerated, Algorithm::SVRG, Algorithm::SAGA,
                          Algorithm::SVRGAccelerated};

}  // namespace

TEST(StepRules, Formulas) {
  const SmoothnessConstants c{2.0, 5.0};
  EXPECT_DOUBLE_EQ(fb_step(c), 0.25);
  EXPECT_DOUBLE_EQ(fb_accelerated_step(c), 0.25);
  EXPECT_DOUBLE_EQ(fb_accelerated_momentum(c), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(svrg_step(c, 1), 1.0 / 79.0);
  EXPECT_DOUBLE_EQ(svrg_step(c, 3), 1.0 / 29.0);
  EXPECT_DOUBLE_EQ(saga_step(c, 1, 10), 1.0 / 79.0);
  EXPECT_DOUBLE_EQ(saga_step(c, 1, 1000), 1.0 / 1499.0);
  EXPECT_DOUBLE_EQ(fb_stochastic_step(c, 0, StepRule::MainText), 2.0 / 201.0);
  EXPECT_DOUBLE_EQ(fb_stochastic_step(c, 9, StepRule::Appendix), 2.0 / (10.0 + 4.0 * 29.0));
  EXPECT_EQ(svrg_inner_iterations(c, 1, 0.0, StepRule::Appendix), static_cast<std::uint64_t>(std::ceil(std::log(4.0) * 80)));
  EXPECT_EQ(svrg_inner_iterations(c, 1, 1.0, StepRule::MainText), static_cast<std::uint64_t>(std::ceil(std::log(4.0) * 79 / 4)));
  EXPECT_EQ(acceleration_refresh_period(0.0), 2u);
  EXPECT_EQ(acceleration_refresh_period(3.0), static_cast<std::uint64_t>(std::ceil(2 + 2 * std::log(4.0) / std::log(4.0 / 3.0))));
  EXPECT_THROW(fb_step({0.0, 1.0}), std::invalid_argument);
  EXPECT_EQ(parse_algorithm("svrg-acc"), Algorithm::SVRGAccelerated);
  EXPECT_THROW(parse_algorithm("sgd"), std::invalid_argument);
}

TEST(Solvers, EveryMethodReachesTheDenseSaddle) {
  for (SplitKind kind : {SplitKind::Individual, SplitKind::Factored}) {
    const Fixture f = quadratic_fixture({kind, ProbabilityMode::MatrixWeighted});
    const OperatorProblem p = make_operator_problem(f.sp);
    for (Algorithm a : kAll) {
      SolverConfig cfg;
      cfg.algorithm = a;
      cfg.max_passes = 6000;
      cfg.seed = 5;
      cfg.target_eps = 1e-20;
      RunHooks hooks;
      hooks.reference = f.oracle;
      const SolveResult r = solve(p, cfg, hooks);
      EXPECT_TRUE(r.reached_target) << to_string(a) << " " << to_string(kind);
      EXPECT_LE(relative_error(f, r.solution), 1e-18) << to_string(a);
    }
  }
}

TEST(Solvers, StochasticForwardBackwardApproachesTheSaddle) {
  const Fixture f = quadratic_fixture();
  const OperatorProblem p = make_operator_problem(f.sp);
  SolverConfig cfg;
  cfg.algorithm = Algorithm::FBStochastic;
  cfg.max_passes = 3000;
  RunHooks hooks;
  hooks.reference = f.oracle;
  const SolveResult r = solve(p, cfg, hooks);
  EXPECT_LE(r.trace.records.back().eps, 1e-2);
  EXPECT_LT(r.trace.records.back().eps, r.trace.records[r.trace.records.size() / 4].eps);
}

TEST(Solvers, MiniBatchesAndUniformSamplingConverge) {
  const Fixture f = quadratic_fixture({SplitKind::Factored, ProbabilityMode::Uniform});
  const OperatorProblem p = make_operator_problem(f.sp);
  for (Algorithm a : {Algorithm::SVRG, Algorithm::SAGA, Algorithm::SVRGAccelerated}) {
    SolverConfig cfg;
    cfg.algorithm = a;
    cfg.batch = 4;
    cfg.max_passes = 6000;
    cfg.target_eps = 1e-12;
    RunHooks hooks;
    hooks.reference = f.oracle;
    EXPECT_TRUE(solve(p, cfg, hooks).reached_target) << to_string(a);
  }
}

TEST(Solvers, SerialPrimalDualUpdateConverges) {
  const Fixture f = quadratic_fixture();
  const OperatorProblem p = make_operator_problem(f.sp);
  SolverConfig cfg;
  cfg.algorithm = Algorithm::FB;
  cfg.arrow_hurwicz = true;
  cfg.max_passes = 20000;
  cfg.target_eps = 1e-16;
  RunHooks hooks;
  hooks.reference = f.oracle;
  EXPECT_TRUE(solve(p, cfg, hooks).reached_target);
}

TEST(Solvers, SameSeedSameTrace) {
  const Fixture f = quadratic_fixture();
  const OperatorProblem p = make_operator_problem(f.sp);
  for (Algorithm a : {Algorithm::SVRG, Algorithm::SAGA, Algorithm::FBStochastic, Algorithm::SVRGAccelerated}) {
    SolverConfig cfg;
    cfg.algorithm = a;
    cfg.max_passes = 20;
    cfg.seed = 77;
    const SolveResult r1 = solve(p, cfg), r2 = solve(p, cfg);
    EXPECT_EQ(r1.solution.x, r2.solution.x);
    EXPECT_EQ(r1.solution.y, r2.solution.y);
    cfg.seed = 78;
    EXPECT_NE(solve(p, cfg).solution.x, r1.solution.x) << to_string(a);
  }
}

TEST(Solvers, TauZeroReducesToPlainSvrg) {
  const Fixture f = quadratic_fixture();
  const OperatorProblem p = make_operator_problem(f.sp);
  SolverConfig cfg;
  cfg.max_passes = 15;
  cfg.seed = 3;
  cfg.algorithm = Algorithm::SVRG;
  const SolveResult a = solve(p, cfg);
  cfg.algorithm = Algorithm::SVRGAccelerated;
  cfg.tau = 0.0;
  const SolveResult b = solve(p, cfg);
  EXPECT_EQ(a.solution.x, b.solution.x);
  EXPECT_EQ(a.solution.y, b.solution.y);
}

TEST(Solvers, HugeStepDivergesWithPartialTrace) {
  const Fixture f = quadratic_fixture({}, 0.01, 0.01);
  const OperatorProblem p = make_operator_problem(f.sp);
  SolverConfig cfg;
  cfg.algorithm = Algorithm::FB;
  cfg.step = 50.0;
  cfg.max_passes = 1e6;
  cfg.checkpoint_stride = 0.0;
  RunHooks hooks;
  hooks.start = PrimalDualPoint(Vector::Ones(7), Vector::Ones(10));
  try {
    solve(p, cfg, hooks);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GT(e.iteration(), 0u);
    EXPECT_FALSE(e.partial_trace().records.empty());
    EXPECT_NE(std::string(e.what()).find("at iteration"), std::string::npos);
  }
}

TEST(Solvers, RejectsBadConfigurations) {
  const Fixture f = quadratic_fixture();
  const OperatorProblem p = make_operator_problem(f.sp);
  SolverConfig cfg;
  cfg.batch = 0;
  EXPECT_THROW(solve(p, cfg), std::invalid_argument);
  cfg.batch = 100000;
  EXPECT_THROW(solve(p, cfg), std::invalid_argument);
  cfg.batch = 1;
  cfg.step = -1.0;
  EXPECT_THROW(solve(p, cfg), std::invalid_argument);
  cfg.step.reset();
  cfg.target_eps = 1e-3;
  EXPECT_THROW(solve(p, cfg), std::invalid_argument);
  cfg.target_eps.reset();
  cfg.tau = -1.0;
  cfg.algorithm = Algorithm::SVRGAccelerated;
  EXPECT_THROW(solve(p, cfg), std::invalid_argument);
}

TEST(Solvers, CheckpointsFollowStrideIterationAndEpochs) {
  const Fixture f = quadratic_fixture();
  const OperatorProblem p = make_operator_problem(f.sp);
  SolverConfig cfg;
  cfg.max_passes = 10;
  cfg.checkpoint_stride = 1.0;
  const SolveResult r = solve(p, cfg);
  EXPECT_GE(r.trace.records.size(), 10u);
  EXPECT_LE(r.trace.records.size(), 13u);
  for (std::size_t i = 1; i < r.trace.records.size(); ++i)
    EXPECT_GT(r.trace.records[i].passes, r.trace.records[i - 1].passes);
  cfg.checkpoint_stride = 1e9;
  cfg.checkpoint_every = 100;
  cfg.max_iterations = 1000;
  cfg.max_passes = 1e9;
  cfg.algorithm = Algorithm::SAGA;
  const SolveResult s = solve(p, cfg);
  for (const Checkpoint& c : s.trace.records) EXPECT_TRUE(c.iteration % 100 == 0) << c.iteration;
  EXPECT_EQ(s.trace.records.size(), 11u);
  cfg.algorithm = Algorithm::SVRG;
  cfg.checkpoint_every = 0;
  cfg.checkpoint_epochs = true;
  cfg.max_iterations = 1u << 30;
  cfg.max_passes = 200;
  const SolveResult e = solve(p, cfg);
  ASSERT_GE(e.trace.records.size(), 3u);
  EXPECT_EQ(e.trace.records[1].iteration, e.inner_iterations);
  EXPECT_EQ(e.trace.records[1].epoch, 1u);
}

TEST(Solvers, GapHookIsFilled) {
  const Fixture f = quadratic_fixture();
  const OperatorProblem p = make_operator_problem(f.sp);
  ASSERT_TRUE(p.gap);
  SolverConfig cfg;
  cfg.max_passes = 3000;
  RunHooks hooks;
  hooks.evaluate = [&](const PrimalDualPoint& z, Checkpoint& c) { c.gap = p.gap(z); };
  const SolveResult r = solve(p, cfg, hooks);
  EXPECT_GT(r.trace.records.front().gap, 1e-3);
  EXPECT_LT(r.trace.records.back().gap, 1e-10);
  for (const Checkpoint& c : r.trace.records) EXPECT_GE(c.gap, -1e-10);
}

TEST(Solvers, ResidualBoundDominatesTheTrueDistance) {
  const Fixture f = quadratic_fixture();
  const OperatorProblem p = make_operator_problem(f.sp);
  Rng rng(64);
  const PrimalDualPoint star = rescale(f.sp.geometry, f.oracle);
  for (int t = 0; t < 30; ++t) {
    const PrimalDualPoint z = random_point(7, 10, rng);
    EXPECT_GE(fixed_point_distance_bound(p, z), std::sqrt((z - star).squared_norm()) * (1 - 1e-10));
  }
}

TEST(Solvers, StochasticDirectionsAreUnbiased) {
  const Fixture f = quadratic_fixture({SplitKind::Individual, ProbabilityMode::Mixture});
  const BilinearOperator op(f.sp.K, f.sp.split, f.sp.geometry);
  Rng rng(65);
  const PrimalDualPoint z = random_point(7, 10, rng), snap = random_point(7, 10, rng);
  PrimalDualPoint full, b_snap, dir, svrg(7, 10), plain(7, 10);
  op.apply(z, full);
  op.apply(snap, b_snap);
  for (ComponentIndex i = 0; i < op.component_count(); ++i) {
    const ComponentIndex batch[1] = {i};
    svrg_direction(op, z, snap, b_snap, batch, dir);
    svrg.axpy(op.probability(i), dir);
    stochastic_direction(op, z, batch, dir);
    plain.axpy(op.probability(i), dir);
  }
  EXPECT_LE((svrg - full).squared_norm(), 1e-24 * full.squared_norm());
  EXPECT_LE((plain - full).squared_norm(), 1e-24 * full.squared_norm());
}

TEST(Solvers, AffineProbe) {
  const Fixture f = quadratic_fixture();
  const BilinearOperator op(f.sp.K, f.sp.split, f.sp.geometry);
  EXPECT_TRUE(probe_affine(op, 1));
}

TEST(QuadraticFamily, SolversMatchTheDirectSolve) {
  auto spec = std::make_shared<QuadraticFamilySpec>();
  spec->Q = 2.0 * Eigen::MatrixXd::Identity(4, 4);
  spec->r = gaussian_vector(4, 66);
  for (int i = 0; i < 6; ++i) {
    const Eigen::MatrixXd F = gaussian_dense(2, 4, 67 + i);
    spec->H.push_back(F.transpose() * F);
    spec->c.push_back(gaussian_vector(4, 80 + i));
  }
  EXPECT_NEAR(quadratic_modulus(*spec), 2.0, 1e-12);
  const OperatorProblem p = make_quadratic_problem(spec);
  EXPECT_TRUE(probe_affine(*p.forward, 2));
  EXPECT_EQ(p.forward->dual_dim(), 0);
  const PrimalDualPoint direct = quadratic_direct_solution(*spec);
  Eigen::MatrixXd sumH = spec->Q;
  Vector rhs = -spec->r;
  for (int i = 0; i < 6; ++i) {
    sumH += spec->H[i];
    rhs += spec->c[i];
  }
  EXPECT_LE((sumH * direct.x - rhs).norm(), 1e-10);
  for (Algorithm a : {Algorithm::FB, Algorithm::SVRG, Algorithm::SAGA}) {
    SolverConfig cfg;
    cfg.algorithm = a;
    cfg.max_passes = 1e5;
    cfg.target_eps = 1e-24;
    RunHooks hooks;
    hooks.reference = direct;
    const SolveResult r = solve(p, cfg, hooks);
    EXPECT_LE((r.solution.x - direct.x).norm(), 1e-9 * std::max(1.0, direct.x.norm())) << to_string(a);
  }
}

TEST(StepRules, HandEvaluatedCases) {
  const SmoothnessConstants c{2.0, 4.0};
  EXPECT_DOUBLE_EQ(svrg_step(c, 1), 1.0 / 52.0);
  EXPECT_EQ(svrg_inner_iterations(c, 1, 0.0, StepRule::Appendix), 74u);
  EXPECT_DOUBLE_EQ(saga_step(c, 1, 10), 1.0 / 52.0);
}

TEST(Solvers, ZeroCouplingContractsByTheResolvent) {
  const SaddleProblem sp = separable_problem(coupling(Eigen::MatrixXd::Zero(3, 2)), 1.0, 1.0, 0.0, Vector(), Vector());
  EXPECT_THROW(make_operator_problem(sp), std::invalid_argument);
}
