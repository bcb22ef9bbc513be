#include "saddle/quadratic_family.hpp"

#include <cmath>
#include <stdexcept>

namespace saddle {

namespace {

void check_spec(const QuadraticFamilySpec& s) {
  const Index d = s.Q.rows();
  if (d == 0 || s.Q.cols() != d) throw std::invalid_argument("Q must be square and nonempty");
  if (s.r.size() != d) throw DimensionError("primal", d, s.r.size());
  if (s.H.empty() || s.H.size() != s.c.size()) throw std::invalid_argument("need matching nonempty H and c lists");
  for (std::size_t i = 0; i < s.H.size(); ++i) {
    if (s.H[i].rows() != d || s.H[i].cols() != d) throw DimensionError("primal", d, s.H[i].rows());
    if (s.c[i].size() != d) throw DimensionError("primal", d, s.c[i].size());
  }
}

double spectral_norm(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Vector sampling_weights(const QuadraticFamilySpec& s) {
  Vector w(static_cast<Index>(s.H.size()));
  for (std::size_t i = 0; i < s.H.size(); ++i)
    w[static_cast<Index>(i)] = s.weighted_sampling ? spectral_norm(s.H[i]) : 1.0;
  if (!(w.sum() > 0.0)) w.setOnes();
  // Keep every component in the support; the offsets c_i still need sampling.
  w = w.cwiseMax(1e-3 * w.mean());
  return w / w.sum();
}

}  // namespace

double quadratic_modulus(const QuadraticFamilySpec& spec) {
  check_spec(spec);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spec.Q, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

QuadraticComponents::QuadraticComponents(std::shared_ptr<const QuadraticFamilySpec> spec, double lambda)
    : spec_(std::move(spec)),
      dim_(spec_->Q.rows()),
      inv_lambda_(1.0 / lambda),
      inv_sqrt_lambda_(1.0 / std::sqrt(lambda)) {
  check_spec(*spec_);
  const Vector w = sampling_weights(*spec_);
  dist_ = Distribution::flat(AliasTable(std::span<const double>(w.data(), static_cast<std::size_t>(w.size()))));
}

void QuadraticComponents::apply(const PrimalDualPoint& z, PrimalDualPoint& out) const {
  out.x.setZero(dim_);
  out.y.resize(0);
  for (ComponentIndex i = 0; i < spec_->H.size(); ++i) add_component(i, z, 1.0, out);
}

void QuadraticComponents::add_component(ComponentIndex i, const PrimalDualPoint& z, double w,
                                        PrimalDualPoint& out) const {
  if (i >= spec_->H.size()) throw std::out_of_range("component index out of range");
  // rescaled: B_i'(x') = H_i x' / lambda - c_i / sqrt(lambda)
  out.x.noalias() += (w * inv_lambda_) * (spec_->H[i] * z.x);
  out.x -= (w * inv_sqrt_lambda_) * spec_->c[i];
}

QuadraticResolvent::QuadraticResolvent(std::shared_ptr<const QuadraticFamilySpec> spec, double lambda) {
  check_spec(*spec);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spec->Q);
  basis_ = es.eigenvectors();
  eigenvalues_ = es.eigenvalues() / lambda;
  offset_ = spec->r / std::sqrt(lambda);
}

void QuadraticResolvent::apply(double sigma, const PrimalDualPoint& in, PrimalDualPoint& out) const {
  // (I + sigma Q') v = in - sigma r'
  Vector coords = basis_.transpose() * (in.x - sigma * offset_);
  coords.array() /= 1.0 + sigma * eigenvalues_.array();
  out.x = basis_ * coords;
  out.y.resize(0);
}

OperatorProblem make_quadratic_problem(std::shared_ptr<const QuadraticFamilySpec> spec) {
  const double lambda = quadratic_modulus(*spec);
  if (!(lambda > 0.0)) throw std::invalid_argument("Q must be positive definite");
  OperatorProblem p;
  p.geometry = Geometry(lambda, 1.0, spec->Q.rows(), 0);
  auto forward = std::make_shared<QuadraticComponents>(spec, lambda);
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(spec->Q.rows(), spec->Q.cols());
  double lbar_sq = 0.0;
  for (std::size_t i = 0; i < spec->H.size(); ++i) {
    total += spec->H[i];
    const double pi = forward->probability(i);
    const double norm = spectral_norm(spec->H[i]) / lambda;
    if (norm > 0.0) lbar_sq += norm * norm / pi;
  }
  p.constants.L = spectral_norm(total) / lambda;
  p.constants.Lbar = std::sqrt(lbar_sq);
  p.forward = forward;
  p.resolvent = std::make_shared<QuadraticResolvent>(spec, lambda);
  return p;
}

PrimalDualPoint quadratic_direct_solution(const QuadraticFamilySpec& spec) {
  check_spec(spec);
  Eigen::MatrixXd system = spec.Q;
  Vector rhs = -spec.r;
  for (std::size_t i = 0; i < spec.H.size(); ++i) {
    system += spec.H[i];
    rhs += spec.c[i];
  }
  Vector x = system.ldlt().solve(rhs);
  return PrimalDualPoint(std::move(x), Vector());
}

}  // namespace saddle
