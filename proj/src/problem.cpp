#include "saddle/problem.hpp"

#include "saddle/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace saddle {

double bilinear_default_tau(const CouplingMatrix& K, const Geometry& g) {
  const double ratio = K.frobenius() / std::sqrt(g.lambda() * g.gamma());
  const double shape = std::sqrt(std::max(1.0 / static_cast<double>(K.rows()), 1.0 / static_cast<double>(K.cols())));
  return std::max(0.0, ratio * shape - 1.0);
}

OperatorProblem make_operator_problem(const SaddleProblem& sp) {
  if (!sp.K || !sp.primal || !sp.dual) throw std::invalid_argument("saddle problem is incomplete");
  OperatorProblem p;
  p.geometry = sp.geometry;
  p.forward = std::make_shared<BilinearOperator>(sp.K, sp.split, sp.geometry);
  p.resolvent = std::make_shared<SaddleResolvent>(sp.geometry, sp.primal, sp.dual);
  p.constants = compute_constants(*sp.K, sp.split, sp.geometry);
  p.acceleration_tau = bilinear_default_tau(*sp.K, sp.geometry);
  auto f = std::dynamic_pointer_cast<const SeparableTerm>(sp.primal);
  auto g = std::dynamic_pointer_cast<const SeparableTerm>(sp.dual);
  if (f && g) {
    auto K = sp.K;
    const Geometry geom = sp.geometry;
    p.gap = [K, geom, f, g](const PrimalDualPoint& z) { return duality_gap_separable(*K, geom, *f, *g, z); };
  }
  return p;
}

}  // namespace saddle
