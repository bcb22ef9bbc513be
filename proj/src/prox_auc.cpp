#include "saddle/prox.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace saddle {

AucLossSpec::AucLossSpec(const Vector& labels) {
  positive_.resize(static_cast<std::size_t>(labels.size()));
  for (Index i = 0; i < labels.size(); ++i) {
    const bool pos = labels[i] > 0.0;
    positive_[static_cast<std::size_t>(i)] = pos;
    (pos ? n_pos_ : n_neg_) += 1;
  }
  if (n_pos_ == 0 || n_neg_ == 0) throw std::invalid_argument("ROC loss needs both positive and negative labels");
  m_ = 1.0 / (1.0 / static_cast<double>(n_pos_) + 1.0 / static_cast<double>(n_neg_));
}

Vector AucLossSpec::linear_term() const {
  Vector a(size());
  for (Index i = 0; i < size(); ++i)
    a[i] = is_positive(i) ? 1.0 / static_cast<double>(n_pos_) : -1.0 / static_cast<double>(n_neg_);
  return a;
}

std::pair<double, double> AucLossSpec::class_sums(const Vector& u) const {
  if (u.size() != size()) throw DimensionError("dual", size(), u.size());
  double sp = 0.0, sn = 0.0;
  for (Index i = 0; i < u.size(); ++i) (is_positive(i) ? sp : sn) += u[i];
  return {sp, sn};
}

Vector auc_apply_A(const AucLossSpec& spec, const Vector& u) {
  const auto [sp, sn] = spec.class_sums(u);
  const double np = static_cast<double>(spec.n_pos());
  const double nn = static_cast<double>(spec.n_neg());
  Vector out(u.size());
  for (Index i = 0; i < u.size(); ++i)
    out[i] = spec.is_positive(i) ? u[i] / np - sn / (np * nn) : u[i] / nn - sp / (np * nn);
  return out;
}

double auc_loss(const AucLossSpec& spec, const Vector& u) {
  const auto [sp, sn] = spec.class_sums(u);
  const double np = static_cast<double>(spec.n_pos());
  const double nn = static_cast<double>(spec.n_neg());
  return 0.5 + sp / np - sn / nn + 0.5 * u.dot(auc_apply_A(spec, u));
}

Vector auc_inv_I_plus_kappa_A(const AucLossSpec& spec, double kappa, const Vector& w) {
  if (w.size() != spec.size()) throw DimensionError("dual", spec.size(), w.size());
  if (!(kappa > -spec.m_const())) throw std::domain_error("I + kappa A is singular: kappa must exceed -M");
  const double np = static_cast<double>(spec.n_pos());
  const double nn = static_cast<double>(spec.n_neg());
  const double dp = 1.0 + kappa / np;
  const double dn = 1.0 + kappa / nn;
  if (!(dp > 0.0) || !(dn > 0.0)) throw std::domain_error("I + kappa A is singular: nonpositive diagonal");
  const double alpha = (kappa / (np * nn)) * std::sqrt(np / dp) * std::sqrt(nn / dn);
  if (!(alpha * alpha < 1.0)) throw std::domain_error("I + kappa A is singular: alpha^2 >= 1");

  const double rp = 1.0 / std::sqrt(dp);
  const double rn = 1.0 / std::sqrt(dn);
  // t = D^{-1/2} w, then the 2x2 correction on span(u+, u-), u± = e±/sqrt(n±).
  Vector t(w.size());
  double ap = 0.0, an = 0.0;
  for (Index i = 0; i < w.size(); ++i) {
    t[i] = w[i] * (spec.is_positive(i) ? rp : rn);
    (spec.is_positive(i) ? ap : an) += t[i];
  }
  ap /= std::sqrt(np);
  an /= std::sqrt(nn);
  const double inv = 1.0 / (1.0 - alpha * alpha);
  const double bp = inv * (ap + alpha * an) - ap;
  const double bn = inv * (alpha * ap + an) - an;
  const double cp = bp / std::sqrt(np);
  const double cn = bn / std::sqrt(nn);
  Vector out(w.size());
  for (Index i = 0; i < w.size(); ++i) {
    const bool pos = spec.is_positive(i);
    out[i] = (t[i] + (pos ? cp : cn)) * (pos ? rp : rn);
  }
  return out;
}

Vector auc_dual_prox(const AucLossSpec& spec, double gamma, double sigma, const Vector& v0) {
  if (!(gamma > 0.0) || !(sigma > 0.0)) throw std::invalid_argument("gamma and sigma must be positive");
  // Stationarity on the feasible subspace, multiplied through by A:
  // (I + (1/s - M) A) v = (1/s) A v0 with s = sigma / gamma.
  const double inv_step = gamma / sigma;
  const double kappa = inv_step - spec.m_const();
  Vector rhs = inv_step * auc_apply_A(spec, v0);
  Vector v = auc_inv_I_plus_kappa_A(spec, kappa, rhs);
  v.array() -= v.mean();
  return v;
}

double auc_pinv_quadratic(const AucLossSpec& spec, const Vector& v) {
  const auto [sp, sn] = spec.class_sums(v);
  const double np = static_cast<double>(spec.n_pos());
  const double nn = static_cast<double>(spec.n_neg());
  double weighted = 0.0;
  for (Index i = 0; i < v.size(); ++i) weighted += (spec.is_positive(i) ? np : nn) * v[i] * v[i];
  return weighted - 0.5 * (sp * sp + sn * sn);
}

double auc_g_value(const AucLossSpec& spec, const Vector& v) {
  if (v.size() != spec.size()) throw DimensionError("dual", spec.size(), v.size());
  if (std::abs(v.sum()) > 1e-8 * v.norm()) return std::numeric_limits<double>::infinity();
  return 0.5 * auc_pinv_quadratic(spec, v) - 0.5 * spec.m_const() * v.squaredNorm();
}

void AucDualTerm::prox(double sigma, double w, const Vector& in, Vector& out) const {
  if (!(w <= spec_.m_const() * (1.0 + 1e-12)))
    throw std::invalid_argument("ROC dual weight exceeds its strong convexity modulus");
  // sigma v^T A^+ v / 2 + (w/2)|v - in|^2 = sigma g(v) + ((sigma M + w)/2)|v - w in / (sigma M + w)|^2 + const
  const double weight = sigma * spec_.m_const() + w;
  const Vector center = (w / weight) * in;
  out = auc_dual_prox(spec_, weight, sigma, center);
}

double AucDualTerm::value(double, const Vector& v) const {
  if (std::abs(v.sum()) > 1e-8 * v.norm()) return std::numeric_limits<double>::infinity();
  return 0.5 * auc_pinv_quadratic(spec_, v);
}

}  // namespace saddle
