#include "saddle/core.hpp"

#include <cmath>

namespace saddle {

DimensionError::DimensionError(std::string axis, Index expected, Index got)
    : std::invalid_argument(axis + " dimension mismatch: expected " + std::to_string(expected) + ", got " +
                            std::to_string(got)),
      axis_(std::move(axis)) {}

void require_same_shape(const PrimalDualPoint& a, const PrimalDualPoint& b) {
  if (a.x.size() != b.x.size()) throw DimensionError("primal", a.x.size(), b.x.size());
  if (a.y.size() != b.y.size()) throw DimensionError("dual", a.y.size(), b.y.size());
}

PrimalDualPoint& PrimalDualPoint::operator+=(const PrimalDualPoint& o) {
  require_same_shape(*this, o);
  x += o.x;
  y += o.y;
  return *this;
}

PrimalDualPoint& PrimalDualPoint::operator-=(const PrimalDualPoint& o) {
  require_same_shape(*this, o);
  x -= o.x;
  y -= o.y;
  return *this;
}

PrimalDualPoint& PrimalDualPoint::operator*=(double s) {
  x *= s;
  y *= s;
  return *this;
}

PrimalDualPoint& PrimalDualPoint::axpy(double s, const PrimalDualPoint& o) {
  require_same_shape(*this, o);
  x.noalias() += s * o.x;
  y.noalias() += s * o.y;
  return *this;
}

double PrimalDualPoint::dot(const PrimalDualPoint& o) const {
  require_same_shape(*this, o);
  return x.dot(o.x) + y.dot(o.y);
}

bool PrimalDualPoint::all_finite() const { return x.allFinite() && y.allFinite(); }

PrimalDualPoint operator+(PrimalDualPoint a, const PrimalDualPoint& b) { return a += b; }
PrimalDualPoint operator-(PrimalDualPoint a, const PrimalDualPoint& b) { return a -= b; }
PrimalDualPoint operator*(double s, PrimalDualPoint a) { return a *= s; }

Geometry::Geometry(double lambda, double gamma, Index d, Index n) : lambda_(lambda), gamma_(gamma), d_(d), n_(n) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive and finite");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be positive and finite");
  if (d < 0 || n < 0) throw std::invalid_argument("negative dimension");
}

void Geometry::require_shape(const PrimalDualPoint& z) const {
  if (z.x.size() != d_) throw DimensionError("primal", d_, z.x.size());
  if (z.y.size() != n_) throw DimensionError("dual", n_, z.y.size());
}

double omega_sq(const Geometry& g, const PrimalDualPoint& z) {
  g.require_shape(z);
  return g.lambda() * z.x.squaredNorm() + g.gamma() * z.y.squaredNorm();
}

double omega_dual_sq(const Geometry& g, const PrimalDualPoint& z) {
  g.require_shape(z);
  return z.x.squaredNorm() / g.lambda() + z.y.squaredNorm() / g.gamma();
}

PrimalDualPoint rescale(const Geometry& g, const PrimalDualPoint& z) {
  g.require_shape(z);
  return {std::sqrt(g.lambda()) * z.x, std::sqrt(g.gamma()) * z.y};
}

PrimalDualPoint unrescale(const Geometry& g, const PrimalDualPoint& z) {
  g.require_shape(z);
  return {z.x / std::sqrt(g.lambda()), z.y / std::sqrt(g.gamma())};
}

}  // namespace saddle
