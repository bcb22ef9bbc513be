#pragma once

#include "saddle/bilinear.hpp"
#include "saddle/operator.hpp"
#include "saddle/prox.hpp"

#include <memory>

namespace saddle {

// min_x max_y f(x) + y^T K x - g(y), f lambda-strongly convex, g gamma-strongly convex.
struct SaddleProblem {
  std::shared_ptr<const CouplingMatrix> K;
  Geometry geometry{1.0, 1.0, 0, 0};
  std::shared_ptr<const ProxTerm> primal;
  std::shared_ptr<const ProxTerm> dual;
  SplitScheme split;
};

// max(0, |K|_F / sqrt(lambda gamma) * sqrt(max(1/n, 1/d)) - 1)
double bilinear_default_tau(const CouplingMatrix& K, const Geometry& g);

// Rescaled operator form; attaches the duality gap when both terms are separable.
OperatorProblem make_operator_problem(const SaddleProblem& sp);

}  // namespace saddle
