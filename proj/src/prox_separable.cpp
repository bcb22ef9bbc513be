#include "saddle/prox.hpp"

#include <cmath>
#include <stdexcept>

namespace saddle {

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

SeparableTerm::SeparableTerm(double l1, Vector linear) : l1_(l1), linear_(std::move(linear)) {
  if (!(l1 >= 0.0) || !std::isfinite(l1)) throw std::invalid_argument("l1 weight must be finite and nonnegative");
}

void SeparableTerm::prox(double sigma, double w, const Vector& in, Vector& out) const {
  if (!(sigma > 0.0)) throw std::invalid_argument("prox step must be positive");
  if (linear_.size() != 0 && linear_.size() != in.size()) throw DimensionError("term", linear_.size(), in.size());
  const double shrink = 1.0 / (w * (1.0 + sigma));
  const double threshold = sigma * l1_;
  out.resize(in.size());
  const bool has_linear = linear_.size() != 0;
  for (Index i = 0; i < in.size(); ++i) {
    const double shifted = w * in[i] - (has_linear ? sigma * linear_[i] : 0.0);
    out[i] = soft_threshold(shifted, threshold) * shrink;
  }
}

double SeparableTerm::value(double w, const Vector& v) const {
  double val = 0.5 * w * v.squaredNorm() + l1_ * v.lpNorm<1>();
  if (linear_.size() != 0) val += linear_.dot(v);
  return val;
}

double SeparableTerm::conjugate(double w, const Vector& s) const {
  double acc = 0.0;
  for (Index i = 0; i < s.size(); ++i) {
    const double t = soft_threshold(s[i] - (linear_.size() != 0 ? linear_[i] : 0.0), l1_);
    acc += t * t;
  }
  return acc / (2.0 * w);
}

PrimalDualPoint prox_separable(double lambda, double gamma, double sigma, const PrimalDualPoint& z,
                               const SeparableTerm& f, const SeparableTerm& g) {
  if (!(lambda > 0.0) || !(gamma > 0.0)) throw std::invalid_argument("weights must be positive");
  PrimalDualPoint out = PrimalDualPoint::zeros_like(z);
  f.prox(sigma, lambda, z.x, out.x);
  g.prox(sigma, gamma, z.y, out.y);
  return out;
}

SaddleResolvent::SaddleResolvent(Geometry geometry, std::shared_ptr<const ProxTerm> primal,
                                 std::shared_ptr<const ProxTerm> dual)
    : geometry_(geometry),
      primal_(std::move(primal)),
      dual_(std::move(dual)),
      sqrt_lambda_(std::sqrt(geometry.lambda())),
      sqrt_gamma_(std::sqrt(geometry.gamma())) {
  if (!primal_ || !dual_) throw std::invalid_argument("both prox terms are required");
}

void SaddleResolvent::apply_primal(double sigma, const Vector& in, Vector& out) const {
  Vector original = in / sqrt_lambda_;
  primal_->prox(sigma, geometry_.lambda(), original, original);
  out = sqrt_lambda_ * original;
}

void SaddleResolvent::apply_dual(double sigma, const Vector& in, Vector& out) const {
  Vector original = in / sqrt_gamma_;
  dual_->prox(sigma, geometry_.gamma(), original, original);
  out = sqrt_gamma_ * original;
}

void SaddleResolvent::apply(double sigma, const PrimalDualPoint& in, PrimalDualPoint& out) const {
  geometry_.require_shape(in);
  if (&in != &out) {
    out.x.resize(in.x.size());
    out.y.resize(in.y.size());
  }
  apply_primal(sigma, in.x, out.x);
  apply_dual(sigma, in.y, out.y);
}

double SaddleResolvent::cost_estimate() const {
  return primal_->cost_estimate(geometry_.primal_dim()) + dual_->cost_estimate(geometry_.dual_dim());
}

}  // namespace saddle
