#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace saddle {

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Thrown when two objects disagree on a dimension; `axis` is "primal" or "dual".
class DimensionError : public std::invalid_argument {
 public:
  DimensionError(std::string axis, Index expected, Index got);
  const std::string& axis() const { return axis_; }

 private:
  std::string axis_;
};

// A point (x, y) of the product space; x is primal (length d), y dual (length n).
struct PrimalDualPoint {
  Vector x;
  Vector y;

  PrimalDualPoint() = default;
  PrimalDualPoint(Index d, Index n) : x(Vector::Zero(d)), y(Vector::Zero(n)) {}
  PrimalDualPoint(Vector primal, Vector dual) : x(std::move(primal)), y(std::move(dual)) {}

  static PrimalDualPoint zeros_like(const PrimalDualPoint& z) { return {z.x.size(), z.y.size()}; }

  Index primal_dim() const { return x.size(); }
  Index dual_dim() const { return y.size(); }

  void set_zero() {
    x.setZero();
    y.setZero();
  }

  PrimalDualPoint& operator+=(const PrimalDualPoint& o);
  PrimalDualPoint& operator-=(const PrimalDualPoint& o);
  PrimalDualPoint& operator*=(double s);

  // this += s * o
  PrimalDualPoint& axpy(double s, const PrimalDualPoint& o);

  double squared_norm() const { return x.squaredNorm() + y.squaredNorm(); }
  double dot(const PrimalDualPoint& o) const;
  bool all_finite() const;
};

PrimalDualPoint operator+(PrimalDualPoint a, const PrimalDualPoint& b);
PrimalDualPoint operator-(PrimalDualPoint a, const PrimalDualPoint& b);
PrimalDualPoint operator*(double s, PrimalDualPoint a);

// Throws DimensionError when a and b differ in shape.
void require_same_shape(const PrimalDualPoint& a, const PrimalDualPoint& b);

// Strong-convexity weights lambda (primal) and gamma (dual) with the dimensions they apply to.
class Geometry {
 public:
  Geometry(double lambda, double gamma, Index d, Index n);

  double lambda() const { return lambda_; }
  double gamma() const { return gamma_; }
  Index primal_dim() const { return d_; }
  Index dual_dim() const { return n_; }

  void require_shape(const PrimalDualPoint& z) const;

 private:
  double lambda_;
  double gamma_;
  Index d_;
  Index n_;
};

// lambda |x|^2 + gamma |y|^2
double omega_sq(const Geometry& g, const PrimalDualPoint& z);
// |x|^2 / lambda + |y|^2 / gamma
double omega_dual_sq(const Geometry& g, const PrimalDualPoint& z);

// (sqrt(lambda) x, sqrt(gamma) y); in these coordinates the monotonicity constant is 1.
PrimalDualPoint rescale(const Geometry& g, const PrimalDualPoint& z);
PrimalDualPoint unrescale(const Geometry& g, const PrimalDualPoint& z);

class RescaledView {
 public:
  explicit RescaledView(Geometry g) : geometry_(g) {}

  const Geometry& geometry() const { return geometry_; }
  PrimalDualPoint to_rescaled(const PrimalDualPoint& z) const { return rescale(geometry_, z); }
  PrimalDualPoint to_original(const PrimalDualPoint& z) const { return unrescale(geometry_, z); }

 private:
  Geometry geometry_;
};

}  // namespace saddle
