#include "saddle/harness.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace saddle {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::shared_ptr<const CouplingMatrix> gaussian_matrix(Index n, Index d, Rng& rng) {
  Eigen::MatrixXd m(n, d);
  for (Index j = 0; j < n; ++j)
    for (Index k = 0; k < d; ++k) m(j, k) = rng.normal();
  return std::make_shared<CouplingMatrix>(CouplingMatrix::from_dense(m));
}

SaddleProblem small_problem(std::shared_ptr<const CouplingMatrix> K, SplitScheme split, double l1, Rng& rng) {
  Vector b(K->rows());
  for (Index j = 0; j < b.size(); ++j) b[j] = rng.normal();
  SaddleProblem sp;
  sp.K = K;
  sp.geometry = Geometry(0.5, 2.0, K->cols(), K->rows());
  sp.primal = std::make_shared<SeparableTerm>(l1, Vector());
  sp.dual = std::make_shared<SeparableTerm>(SeparableTerm::square_loss_conjugate(b));
  sp.split = split;
  return sp;
}

CheckOutcome check_isometry() {
  Rng rng(11);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Geometry g(0.1 + rng.uniform01() * 5, 0.1 + rng.uniform01() * 5, 4, 3);
    const PrimalDualPoint z = random_point(4, 3, rng);
    const PrimalDualPoint w = random_point(4, 3, rng);
    worst = std::max(worst, std::abs(omega_sq(g, z) - rescale(g, z).squared_norm()) / omega_sq(g, z));
    const double lhs = std::abs(z.dot(w));
    const double rhs = std::sqrt(omega_sq(g, z) * omega_dual_sq(g, w));
    if (lhs > rhs + 1e-12) return {"norm duality", false, "Cauchy-Schwarz violated"};
  }
  return {"norm duality and rescaling isometry", worst < 1e-14, "worst relative error " + sci(worst)};
}

CheckOutcome check_norm_chain() {
  Rng rng(12);
  int violations = 0;
  for (int t = 0; t < 30; ++t) {
    const Index n = 2 + static_cast<Index>(rng.below(20));
    const Index d = 2 + static_cast<Index>(rng.below(20));
    const auto K = gaussian_matrix(n, d, rng);
    const double op = Eigen::JacobiSVD<Eigen::MatrixXd>(Eigen::MatrixXd(K->by_row())).singularValues()[0];
    const double mx = K->max_norm();
    const double fro = K->frobenius();
    const double root = std::sqrt(static_cast<double>(std::max(n, d)));
    const double slack = 1e-10 * fro;
    if (mx > op + slack || op > fro + slack || fro > root * mx + slack || root * mx > root * op + slack) ++violations;
  }
  return {"norm chain on random matrices", violations == 0, std::to_string(violations) + " violations"};
}

CheckOutcome check_splits() {
  Rng rng(13);
  const auto K = gaussian_matrix(6, 5, rng);
  const Geometry g(0.7, 1.3, 5, 6);
  for (SplitKind kind : {SplitKind::Individual, SplitKind::Factored}) {
    for (ProbabilityMode mode : {ProbabilityMode::Uniform, ProbabilityMode::MatrixWeighted, ProbabilityMode::Mixture}) {
      BilinearOperator op(K, {kind, mode}, g);
      try {
        verify_split(op, 5, 1e-12);
      } catch (const std::exception& e) {
        return {"component split sums", false, std::string(to_string(kind)) + "/" + to_string(mode) + ": " + e.what()};
      }
    }
  }
  return {"component split sums", true, "all six schemes"};
}

CheckOutcome check_prox_contraction() {
  Rng rng(14);
  const Geometry g(0.8, 1.7, 6, 8);
  Vector labels(8);
  for (Index i = 0; i < 8; ++i) labels[i] = i % 3 == 0 ? 1.0 : -1.0;
  const AucLossSpec spec(labels);
  const Geometry auc_geom(0.8, spec.m_const(), 6, 8);
  Vector offset(6);
  for (Index i = 0; i < 6; ++i) offset[i] = rng.normal();
  const SaddleResolvent separable(g, std::make_shared<SeparableTerm>(0.3, offset),
                                  std::make_shared<SeparableTerm>(SeparableTerm::elastic_net(0.2)));
  const SaddleResolvent cluster(auc_geom, std::make_shared<ClusterTerm>(0.4, offset),
                                std::make_shared<AucDualTerm>(spec));
  double worst = 0.0;
  for (const SaddleResolvent* r : {&separable, &cluster}) {
    for (int t = 0; t < 100; ++t) {
      const double sigma = 0.05 + 3.0 * rng.uniform01();
      const PrimalDualPoint a = random_point(6, 8, rng);
      const PrimalDualPoint b = random_point(6, 8, rng);
      PrimalDualPoint pa, pb;
      r->apply(sigma, a, pa);
      r->apply(sigma, b, pb);
      const double ratio = std::sqrt((pa - pb).squared_norm() / (a - b).squared_norm()) * (1.0 + sigma);
      worst = std::max(worst, ratio);
    }
  }
  return {"resolvent contraction (1+sigma)^-1", worst <= 1.0 + 1e-10, "worst ratio " + sci(worst)};
}

CheckOutcome check_unbiased() {
  Rng rng(15);
  const auto K = gaussian_matrix(4, 3, rng);
  const Geometry g(1.0, 1.0, 3, 4);
  double worst = 0.0;
  for (SplitKind kind : {SplitKind::Individual, SplitKind::Factored}) {
    BilinearOperator op(K, {kind, ProbabilityMode::MatrixWeighted}, g);
    const PrimalDualPoint z = random_point(3, 4, rng);
    const PrimalDualPoint snap = random_point(3, 4, rng);
    PrimalDualPoint full = PrimalDualPoint::zeros_like(z), b_snap = PrimalDualPoint::zeros_like(z);
    op.apply(z, full);
    op.apply(snap, b_snap);
    PrimalDualPoint mean = PrimalDualPoint::zeros_like(z), dir;
    for (ComponentIndex i = 0; i < op.component_count(); ++i) {
      const double p = op.probability(i);
      if (p == 0.0) continue;
      const ComponentIndex batch[1] = {i};
      svrg_direction(op, z, snap, b_snap, batch, dir);
      mean.axpy(p, dir);
    }
    worst = std::max(worst, std::sqrt((mean - full).squared_norm()));
  }
  return {"variance-reduced direction is unbiased", worst <= 1e-12, "max error " + sci(worst)};
}

CheckOutcome check_gap() {
  Rng rng(16);
  const auto K = gaussian_matrix(7, 5, rng);
  const SaddleProblem sp = small_problem(K, {}, 0.2, rng);
  const auto f = std::dynamic_pointer_cast<const SeparableTerm>(sp.primal);
  const auto gt = std::dynamic_pointer_cast<const SeparableTerm>(sp.dual);
  double lowest = INFINITY;
  for (int t = 0; t < 100; ++t)
    lowest = std::min(lowest, duality_gap_separable(*K, sp.geometry, *f, *gt, random_point(5, 7, rng)));
  return {"duality gap is nonnegative", lowest >= -1e-9, "smallest gap " + sci(lowest)};
}

CheckOutcome check_solvers_agree() {
  Rng rng(17);
  const auto K = gaussian_matrix(8, 6, rng);
  const SaddleProblem sp = small_problem(K, {}, 0.0, rng);
  const OperatorProblem p = make_operator_problem(sp);
  const auto ref = closed_form_solution(sp);
  if (!ref) return {"solvers reach the closed-form saddle", false, "no closed form"};
  double worst = 0.0;
  for (Algorithm a : {Algorithm::FB, Algorithm::FBAccelerated, Algorithm::SVRG, Algorithm::SAGA,
                      Algorithm::SVRGAccelerated}) {
    SolverConfig cfg;
    cfg.algorithm = a;
    cfg.max_passes = 4000;
    cfg.target_eps = 1e-20;
    RunHooks hooks;
    hooks.reference = *ref;
    const SolveResult r = solve(p, cfg, hooks);
    worst = std::max(worst, distance_sq(sp.geometry, r.solution, *ref) / omega_sq(sp.geometry, *ref));
  }
  return {"solvers reach the closed-form saddle", worst <= 1e-16, "worst relative dist^2 " + sci(worst)};
}

CheckOutcome check_tau_zero() {
  Rng rng(18);
  const auto K = gaussian_matrix(8, 6, rng);
  const OperatorProblem p = make_operator_problem(small_problem(K, {}, 0.1, rng));
  SolverConfig cfg;
  cfg.max_passes = 10;
  cfg.seed = 3;
  cfg.algorithm = Algorithm::SVRG;
  const SolveResult a = solve(p, cfg);
  cfg.algorithm = Algorithm::SVRGAccelerated;
  cfg.tau = 0.0;
  const SolveResult b = solve(p, cfg);
  const bool same = a.solution.x == b.solution.x && a.solution.y == b.solution.y;
  return {"accelerated SVRG with tau 0 equals SVRG", same, same ? "identical iterates" : "iterates differ"};
}

}  // namespace

std::vector<CheckOutcome> run_invariant_checks() {
  std::vector<CheckOutcome> out;
  for (auto check : {check_isometry, check_norm_chain, check_splits, check_prox_contraction, check_unbiased, check_gap,
                     check_solvers_agree, check_tau_zero}) {
    try {
      out.push_back(check());
    } catch (const std::exception& e) {
      out.push_back({"(check threw)", false, e.what()});
    }
  }
  return out;
}

}  // namespace saddle
