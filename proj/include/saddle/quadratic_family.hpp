#pragma once

#include "saddle/operator.hpp"

#include <memory>
#include <vector>

namespace saddle {

// min_x  (1/2) x^T Q x + r^T x + sum_i [(1/2) x^T H_i x - c_i^T x]
// as the zero of A + sum_i B_i with A = grad of the first part, B_i = H_i x - c_i.
// No dual block: points have an empty y.
struct QuadraticFamilySpec {
  Eigen::MatrixXd Q;  // symmetric, Q >= lambda I with lambda > 0
  Vector r;
  std::vector<Eigen::MatrixXd> H;  // symmetric positive semidefinite
  std::vector<Vector> c;
  bool weighted_sampling = false;  // pi_i ~ |H_i|_2 instead of uniform
};

// Strong-convexity modulus of the resolvent part: smallest eigenvalue of Q.
double quadratic_modulus(const QuadraticFamilySpec& spec);

class QuadraticComponents : public ForwardOperator {
 public:
  QuadraticComponents(std::shared_ptr<const QuadraticFamilySpec> spec, double lambda);

  Index primal_dim() const override { return dim_; }
  Index dual_dim() const override { return 0; }
  const Distribution& distribution() const override { return dist_; }

  void apply(const PrimalDualPoint& z, PrimalDualPoint& out) const override;
  void add_component(ComponentIndex i, const PrimalDualPoint& z, double w, PrimalDualPoint& out) const override;

  std::uint64_t data_size() const override { return spec_->H.size(); }
  std::uint64_t component_touches(ComponentIndex) const override { return 1; }

 private:
  std::shared_ptr<const QuadraticFamilySpec> spec_;
  Index dim_;
  double inv_lambda_;
  double inv_sqrt_lambda_;
  Distribution dist_;
};

// (I + sigma A')^{-1} in rescaled coordinates via an eigendecomposition of Q.
class QuadraticResolvent : public Resolvent {
 public:
  QuadraticResolvent(std::shared_ptr<const QuadraticFamilySpec> spec, double lambda);
  void apply(double sigma, const PrimalDualPoint& in, PrimalDualPoint& out) const override;
  double cost_estimate() const override { return static_cast<double>(basis_.size()); }

 private:
  Eigen::MatrixXd basis_;
  Vector eigenvalues_;  // of Q / lambda
  Vector offset_;       // r / sqrt(lambda)
};

// Operator problem with L = |sum H_i| / lambda and Lbar^2 = sum |H_i|^2 / (lambda^2 pi_i).
OperatorProblem make_quadratic_problem(std::shared_ptr<const QuadraticFamilySpec> spec);

// (Q + sum H_i) x = sum c_i - r, as a point with empty dual block.
PrimalDualPoint quadratic_direct_solution(const QuadraticFamilySpec& spec);

}  // namespace saddle
