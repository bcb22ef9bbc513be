#pragma once

#include "saddle/core.hpp"
#include "saddle/operator.hpp"

#include <memory>
#include <vector>

namespace saddle {

// One side of a separable saddle function M(x, y) = h_x(x) - h_y(y). Each h is
// w-strongly convex where w is the geometry weight (lambda or gamma) passed in.
class ProxTerm {
 public:
  virtual ~ProxTerm() = default;
  // argmin_v  sigma * h(v) + (w/2) |v - in|^2.  `in` and `out` may alias.
  virtual void prox(double sigma, double w, const Vector& in, Vector& out) const = 0;
  // h(v); +infinity outside the domain.
  virtual double value(double w, const Vector& v) const = 0;
  // Scalar operations per call, for cost accounting.
  virtual double cost_estimate(Index dim) const { return static_cast<double>(dim); }
};

// h(v) = (w/2)|v|^2 + l1 |v|_1 + <linear, v>.  An empty `linear` means zero.
class SeparableTerm : public ProxTerm {
 public:
  SeparableTerm(double l1, Vector linear);

  static SeparableTerm quadratic() { return {0.0, Vector()}; }
  static SeparableTerm elastic_net(double l1) { return {l1, Vector()}; }
  // (w/2)|y|^2 + <b, y>; with w = n this is the conjugate of u -> |u - b|^2 / (2n).
  static SeparableTerm square_loss_conjugate(Vector b) { return {0.0, std::move(b)}; }

  double l1() const { return l1_; }
  const Vector& linear() const { return linear_; }

  void prox(double sigma, double w, const Vector& in, Vector& out) const override;
  double value(double w, const Vector& v) const override;
  // Convex conjugate h*(s) = |soft(s - linear, l1)|^2 / (2w).
  double conjugate(double w, const Vector& s) const;

 private:
  double l1_;
  Vector linear_;
};

// prox of the separable M(x, y) = f(x) - g(y), exact closed form.
PrimalDualPoint prox_separable(double lambda, double gamma, double sigma, const PrimalDualPoint& z,
                               const SeparableTerm& f, const SeparableTerm& g);

double soft_threshold(double v, double t);

// argmin_x sigma [(lambda/2)|x|^2 + c sum_{i<j} |x_i - x_j|] + (lambda/2)|x - x_in|^2
Vector prox_cluster_norm(double lambda, double sigma, double c, const Vector& x_in);

// h(v) = (w/2)|v|^2 + pair_factor * c * sum_{i<j} |v_i - v_j| + <linear, v>.
// pair_factor 1 counts unordered pairs, 2 counts ordered pairs.
class ClusterTerm : public ProxTerm {
 public:
  ClusterTerm(double c, Vector linear, double pair_factor = 1.0);

  double weight() const { return c_; }
  double pair_factor() const { return pair_factor_; }

  void prox(double sigma, double w, const Vector& in, Vector& out) const override;
  double value(double w, const Vector& v) const override;
  double cost_estimate(Index dim) const override;

 private:
  double c_;
  Vector linear_;
  double pair_factor_;
};

double cluster_penalty(const Vector& v);  // sum_{i<j} |v_i - v_j|, O(n log n)

// Label partition for the pairwise squared-hinge ROC surrogate.
class AucLossSpec {
 public:
  // labels > 0 are positives, the rest negatives; both classes must be present.
  explicit AucLossSpec(const Vector& labels);

  Index size() const { return static_cast<Index>(positive_.size()); }
  Index n_pos() const { return n_pos_; }
  Index n_neg() const { return n_neg_; }
  bool is_positive(Index i) const { return positive_[static_cast<std::size_t>(i)]; }
  // 1/M = 1/n_pos + 1/n_neg; 1/M is the top eigenvalue of A.
  double m_const() const { return m_; }
  // Linear term of the loss: e_pos/n_pos - e_neg/n_neg.
  Vector linear_term() const;
  // (sum over positives, sum over negatives)
  std::pair<double, double> class_sums(const Vector& u) const;

 private:
  std::vector<bool> positive_;
  Index n_pos_ = 0;
  Index n_neg_ = 0;
  double m_ = 0.0;
};

Vector auc_apply_A(const AucLossSpec& spec, const Vector& u);
// (1 / (2 n_pos n_neg)) sum_{i+, i-} (1 - u_{i-} + u_{i+})^2, evaluated in O(n).
double auc_loss(const AucLossSpec& spec, const Vector& u);
// (I + kappa A)^{-1} w in O(n); requires kappa > -M.
Vector auc_inv_I_plus_kappa_A(const AucLossSpec& spec, double kappa, const Vector& w);
// argmin_v (gamma/2)|v - v0|^2 + sigma g(v), g(v) = v^T A^+ v / 2 - (M/2)|v|^2 on sum(v) = 0.
Vector auc_dual_prox(const AucLossSpec& spec, double gamma, double sigma, const Vector& v0);
// g(v) above; +infinity when |sum(v)| > 1e-8 |v|.
double auc_g_value(const AucLossSpec& spec, const Vector& v);
// v^T A^+ v for v orthogonal to the ones vector.
double auc_pinv_quadratic(const AucLossSpec& spec, const Vector& v);

// Dual side of the ROC problem: h(y) = y^T A^+ y / 2 restricted to sum(y) = 0.
// Strongly convex with modulus M, so the weight w passed in must not exceed M.
class AucDualTerm : public ProxTerm {
 public:
  explicit AucDualTerm(AucLossSpec spec) : spec_(std::move(spec)) {}

  const AucLossSpec& spec() const { return spec_; }
  void prox(double sigma, double w, const Vector& in, Vector& out) const override;
  double value(double w, const Vector& v) const override;

 private:
  AucLossSpec spec_;
};

// Resolvent of M(x, y) = f(x) - g(y) in rescaled coordinates.
class SaddleResolvent : public Resolvent {
 public:
  SaddleResolvent(Geometry geometry, std::shared_ptr<const ProxTerm> primal, std::shared_ptr<const ProxTerm> dual);

  const Geometry& geometry() const { return geometry_; }
  const ProxTerm& primal_term() const { return *primal_; }
  const ProxTerm& dual_term() const { return *dual_; }

  void apply(double sigma, const PrimalDualPoint& in, PrimalDualPoint& out) const override;
  bool separable() const override { return true; }
  void apply_primal(double sigma, const Vector& in, Vector& out) const override;
  void apply_dual(double sigma, const Vector& in, Vector& out) const override;
  double cost_estimate() const override;

 private:
  Geometry geometry_;
  std::shared_ptr<const ProxTerm> primal_;
  std::shared_ptr<const ProxTerm> dual_;
  double sqrt_lambda_;
  double sqrt_gamma_;
};

}  // namespace saddle
