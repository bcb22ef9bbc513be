#include "saddle/bilinear.hpp"

#include <algorithm>
#include <cmath>

namespace saddle {

PowerIterationError::PowerIterationError(double last_quotient, int iterations)
    : std::runtime_error("power iteration did not converge after " + std::to_string(iterations) +
                         " iterations (last estimate " + std::to_string(last_quotient) + ")"),
      last_quotient_(last_quotient) {}

double estimate_op_norm(const Eigen::SparseMatrix<double, Eigen::RowMajor>& K, const PowerIterationOptions& opts,
                        double floor) {
  if (K.nonZeros() == 0 || K.cols() == 0) return floor;
  Rng rng(opts.seed);
  Vector v(K.cols());
  for (Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
  v.normalize();
  double quotient = 0.0;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    const Vector Kv = K * v;
    const double next = Kv.squaredNorm();
    Vector w = K.transpose() * Kv;
    const double wn = w.norm();
    if (wn == 0.0) return std::max(std::sqrt(next), floor);
    if (it > 1 && std::abs(next - quotient) <= opts.tolerance * next) return std::max(std::sqrt(next), floor);
    quotient = next;
    v = w / wn;
  }
  throw PowerIterationError(std::sqrt(quotient), opts.max_iterations);
}

CouplingMatrix::CouplingMatrix(RowMajor m, const PowerIterationOptions& opts) : by_row_(std::move(m)) {
  by_row_.makeCompressed();
  by_col_ = ColMajor(by_row_);
  by_col_.makeCompressed();
  const Index n = by_row_.rows();
  const Index d = by_row_.cols();
  row_sq_ = Vector::Zero(n);
  col_sq_ = Vector::Zero(d);
  entry_row_.resize(static_cast<std::size_t>(by_row_.nonZeros()));
  for (Index j = 0; j < n; ++j) {
    for (RowMajor::InnerIterator it(by_row_, j); it; ++it) {
      const double v = it.value();
      if (!std::isfinite(v)) throw std::invalid_argument("coupling matrix has a non-finite entry");
      row_sq_[j] += v * v;
      col_sq_[it.col()] += v * v;
    }
    for (auto e = by_row_.outerIndexPtr()[j]; e < by_row_.outerIndexPtr()[j + 1]; ++e)
      entry_row_[static_cast<std::size_t>(e)] = j;
  }
  frob_sq_ = row_sq_.sum();
  const double max_sq = std::max(n > 0 ? row_sq_.maxCoeff() : 0.0, d > 0 ? col_sq_.maxCoeff() : 0.0);
  max_norm_ = std::sqrt(max_sq);
  op_norm_ = estimate_op_norm(by_row_, opts, max_norm_);
}

CouplingMatrix CouplingMatrix::from_dense(const Eigen::MatrixXd& dense, const PowerIterationOptions& opts) {
  RowMajor m = dense.sparseView(0.0, 0.0);
  return CouplingMatrix(std::move(m), opts);
}

double CouplingMatrix::frobenius() const { return std::sqrt(frob_sq_); }

std::uint64_t CouplingMatrix::row_nnz(Index j) const {
  return static_cast<std::uint64_t>(by_row_.outerIndexPtr()[j + 1] - by_row_.outerIndexPtr()[j]);
}

std::uint64_t CouplingMatrix::col_nnz(Index k) const {
  return static_cast<std::uint64_t>(by_col_.outerIndexPtr()[k + 1] - by_col_.outerIndexPtr()[k]);
}

Vector CouplingMatrix::times(const Vector& x) const {
  if (x.size() != cols()) throw DimensionError("primal", cols(), x.size());
  return by_row_ * x;
}

Vector CouplingMatrix::transpose_times(const Vector& y) const {
  if (y.size() != rows()) throw DimensionError("dual", rows(), y.size());
  return by_col_.transpose() * y;
}

const char* to_string(SplitKind k) { return k == SplitKind::Individual ? "individual" : "factored"; }

const char* to_string(ProbabilityMode m) {
  switch (m) {
    case ProbabilityMode::Uniform:
      return "uniform";
    case ProbabilityMode::MatrixWeighted:
      return "nonuniform";
    case ProbabilityMode::Mixture:
      return "mixture";
  }
  return "?";
}

namespace {

Vector normalized(const Vector& w) { return w / w.sum(); }

Vector support_uniform(const Vector& w) {
  Vector u = (w.array() > 0.0).cast<double>();
  return u / u.sum();
}

Vector by_mode(const Vector& weights, ProbabilityMode mode) {
  switch (mode) {
    case ProbabilityMode::Uniform:
      return support_uniform(weights);
    case ProbabilityMode::MatrixWeighted:
      return normalized(weights);
    case ProbabilityMode::Mixture:
      return 0.5 * support_uniform(weights) + 0.5 * normalized(weights);
  }
  return weights;
}

}  // namespace

SplitProbabilities sampling_probabilities(const CouplingMatrix& K, const SplitScheme& s) {
  if (!(K.frobenius_sq() > 0.0)) throw std::invalid_argument("no sampling distribution: coupling matrix is zero");
  SplitProbabilities out;
  if (s.kind == SplitKind::Factored) {
    out.p = by_mode(K.row_sq_norms(), s.mode);
    out.q = by_mode(K.col_sq_norms(), s.mode);
  } else {
    const auto nnz = static_cast<Index>(K.nnz());
    Vector sq(nnz);
    for (Index e = 0; e < nnz; ++e) sq[e] = K.entry_value(static_cast<std::uint64_t>(e)) * K.entry_value(static_cast<std::uint64_t>(e));
    if (s.mode == ProbabilityMode::Uniform) {
      out.pi = Vector::Constant(nnz, 1.0 / static_cast<double>(nnz));
    } else if (s.mode == ProbabilityMode::MatrixWeighted) {
      out.pi = normalized(sq);
    } else {
      out.pi = 0.5 * Vector::Constant(nnz, 1.0 / static_cast<double>(nnz)) + 0.5 * normalized(sq);
    }
  }
  return out;
}

SmoothnessConstants compute_constants(const CouplingMatrix& K, const SplitScheme& s, const Geometry& g) {
  if (g.primal_dim() != K.cols()) throw DimensionError("primal", K.cols(), g.primal_dim());
  if (g.dual_dim() != K.rows()) throw DimensionError("dual", K.rows(), g.dual_dim());
  const double scale = 1.0 / std::sqrt(g.lambda() * g.gamma());
  const double F = K.frobenius();
  const double mx = K.max_norm();
  const double big = std::sqrt(static_cast<double>(std::max(K.rows(), K.cols())));
  const double all = std::sqrt(static_cast<double>(K.nnz()));

  SmoothnessConstants c;
  // 1% inflation of the power-iteration estimate, capped by the Frobenius norm.
  c.L = std::min(1.01 * K.op_norm(), F) * scale;
  double bound = 0.0;
  if (s.kind == SplitKind::Factored) {
    const double weighted = F;
    const double uniform = big * mx;
    bound = s.mode == ProbabilityMode::MatrixWeighted ? weighted
            : s.mode == ProbabilityMode::Uniform      ? uniform
                                                      : std::sqrt(2.0) * std::min(weighted, uniform);
  } else {
    const double weighted = big * F;
    const double uniform = all * mx;
    bound = s.mode == ProbabilityMode::MatrixWeighted ? weighted
            : s.mode == ProbabilityMode::Uniform      ? uniform
                                                      : std::sqrt(2.0) * std::min(weighted, uniform);
  }
  c.Lbar = bound * scale;
  if (c.L > c.Lbar * (1.0 + 1e-12)) throw std::logic_error("smoothness bound below the condition number");
  return c;
}

namespace {

class IndividualSagaTable : public SagaTable {
 public:
  IndividualSagaTable(const BilinearOperator& op, const PrimalDualPoint& z0) : op_(op), K_(op.matrix()) {
    const auto nnz = K_.nnz();
    y_old_.resize(nnz);
    x_old_.resize(nnz);
    for (std::uint64_t e = 0; e < nnz; ++e) {
      y_old_[e] = z0.y[K_.entry_row(e)];
      x_old_[e] = z0.x[K_.entry_col(e)];
    }
    sum_ = PrimalDualPoint::zeros_like(z0);
    resum();
  }

  const PrimalDualPoint& sum() const override { return sum_; }

  void add_correction(ComponentIndex e, const PrimalDualPoint& z, double w, PrimalDualPoint& out) const override {
    const Index j = K_.entry_row(e);
    const Index k = K_.entry_col(e);
    const double c = w * op_.scale() * K_.entry_value(e);
    out.x[k] += c * (z.y[j] - y_old_[e]);
    out.y[j] -= c * (z.x[k] - x_old_[e]);
  }

  void refresh(ComponentIndex e, const PrimalDualPoint& z) override {
    const Index j = K_.entry_row(e);
    const Index k = K_.entry_col(e);
    const double c = op_.scale() * K_.entry_value(e);
    sum_.x[k] += c * (z.y[j] - y_old_[e]);
    sum_.y[j] -= c * (z.x[k] - x_old_[e]);
    y_old_[e] = z.y[j];
    x_old_[e] = z.x[k];
  }

  double resum() override {
    PrimalDualPoint fresh = PrimalDualPoint::zeros_like(sum_);
    for (std::uint64_t e = 0; e < y_old_.size(); ++e) {
      if (op_.probability(e) == 0.0) continue;
      const double c = op_.scale() * K_.entry_value(e);
      fresh.x[K_.entry_col(e)] += c * y_old_[e];
      fresh.y[K_.entry_row(e)] -= c * x_old_[e];
    }
    const double scale = std::max({std::sqrt(fresh.squared_norm()), std::sqrt(sum_.squared_norm()), 1e-12});
    const double drift = std::sqrt((fresh - sum_).squared_norm()) / scale;
    sum_ = std::move(fresh);
    return drift;
  }

 private:
  const BilinearOperator& op_;
  const CouplingMatrix& K_;
  std::vector<double> y_old_;
  std::vector<double> x_old_;
  PrimalDualPoint sum_;
};

// Primal parts indexed by row and dual parts indexed by column, each updated on its own.
class FactoredSagaTable : public SagaTable {
 public:
  FactoredSagaTable(const BilinearOperator& op, const PrimalDualPoint& z0)
      : op_(op), K_(op.matrix()), y_old_(z0.y), x_old_(z0.x) {
    sum_ = PrimalDualPoint::zeros_like(z0);
    resum();
  }

  const PrimalDualPoint& sum() const override { return sum_; }

  void add_correction(ComponentIndex i, const PrimalDualPoint& z, double w, PrimalDualPoint& out) const override {
    const auto d = static_cast<ComponentIndex>(K_.cols());
    const auto j = static_cast<Index>(i / d);
    const auto k = static_cast<Index>(i % d);
    const auto& pr = op_.probabilities();
    op_.add_row_col(j, pr.q[k] * (z.y[j] - y_old_[j]), k, pr.p[j] * (z.x[k] - x_old_[k]), w, out);
  }

  void refresh(ComponentIndex i, const PrimalDualPoint& z) override {
    const auto d = static_cast<ComponentIndex>(K_.cols());
    const auto j = static_cast<Index>(i / d);
    const auto k = static_cast<Index>(i % d);
    op_.add_row_col(j, z.y[j] - y_old_[j], k, z.x[k] - x_old_[k], 1.0, sum_);
    y_old_[j] = z.y[j];
    x_old_[k] = z.x[k];
  }

  double resum() override {
    PrimalDualPoint fresh(op_.scale() * K_.transpose_times(y_old_), -op_.scale() * K_.times(x_old_));
    const double scale = std::max({std::sqrt(fresh.squared_norm()), std::sqrt(sum_.squared_norm()), 1e-12});
    const double drift = std::sqrt((fresh - sum_).squared_norm()) / scale;
    sum_ = std::move(fresh);
    return drift;
  }

 private:
  const BilinearOperator& op_;
  const CouplingMatrix& K_;
  Vector y_old_;
  Vector x_old_;
  PrimalDualPoint sum_;
};

Distribution make_distribution(const SplitScheme& s, const SplitProbabilities& pr) {
  auto table = [](const Vector& v) { return AliasTable(std::span<const double>(v.data(), static_cast<std::size_t>(v.size()))); };
  if (s.kind == SplitKind::Factored) return Distribution::product(table(pr.p), table(pr.q));
  return Distribution::flat(table(pr.pi));
}

}  // namespace

BilinearOperator::BilinearOperator(std::shared_ptr<const CouplingMatrix> K, SplitScheme scheme, Geometry geometry)
    : K_(std::move(K)),
      scheme_(scheme),
      geometry_(geometry),
      probs_(sampling_probabilities(*K_, scheme)),
      dist_(make_distribution(scheme, probs_)),
      scale_(1.0 / std::sqrt(geometry.lambda() * geometry.gamma())) {
  if (geometry.primal_dim() != K_->cols()) throw DimensionError("primal", K_->cols(), geometry.primal_dim());
  if (geometry.dual_dim() != K_->rows()) throw DimensionError("dual", K_->rows(), geometry.dual_dim());
}

void BilinearOperator::require_index(ComponentIndex i) const {
  if (i >= component_count()) throw std::out_of_range("component index out of range");
}

void BilinearOperator::apply(const PrimalDualPoint& z, PrimalDualPoint& out) const {
  geometry_.require_shape(z);
  out.x.noalias() = scale_ * (K_->by_col().transpose() * z.y);
  out.y.noalias() = -scale_ * (K_->by_row() * z.x);
}

void BilinearOperator::apply_primal_part(const PrimalDualPoint& z, Vector& out) const {
  geometry_.require_shape(z);
  out.noalias() = scale_ * (K_->by_col().transpose() * z.y);
}

void BilinearOperator::apply_dual_part(const PrimalDualPoint& z, Vector& out) const {
  geometry_.require_shape(z);
  out.noalias() = -scale_ * (K_->by_row() * z.x);
}

void BilinearOperator::add_row_col(Index j, double coef_y, Index k, double coef_x, double w,
                                   PrimalDualPoint& out) const {
  const double cy = w * scale_ * coef_y;
  if (cy != 0.0)
    for (CouplingMatrix::RowMajor::InnerIterator it(K_->by_row(), j); it; ++it) out.x[it.col()] += cy * it.value();
  const double cx = w * scale_ * coef_x;
  if (cx != 0.0)
    for (CouplingMatrix::ColMajor::InnerIterator it(K_->by_col(), k); it; ++it) out.y[it.row()] -= cx * it.value();
}

void BilinearOperator::add_component(ComponentIndex i, const PrimalDualPoint& z, double w,
                                     PrimalDualPoint& out) const {
  require_index(i);
  if (scheme_.kind == SplitKind::Individual) {
    const Index j = K_->entry_row(i);
    const Index k = K_->entry_col(i);
    const double c = w * scale_ * K_->entry_value(i);
    out.x[k] += c * z.y[j];
    out.y[j] -= c * z.x[k];
    return;
  }
  const auto d = static_cast<ComponentIndex>(K_->cols());
  const auto j = static_cast<Index>(i / d);
  const auto k = static_cast<Index>(i % d);
  add_row_col(j, probs_.q[k] * z.y[j], k, probs_.p[j] * z.x[k], w, out);
}

void BilinearOperator::add_component_difference(ComponentIndex i, const PrimalDualPoint& z,
                                                const PrimalDualPoint& ref, double w, PrimalDualPoint& out) const {
  require_index(i);
  if (scheme_.kind == SplitKind::Individual) {
    const Index j = K_->entry_row(i);
    const Index k = K_->entry_col(i);
    const double c = w * scale_ * K_->entry_value(i);
    out.x[k] += c * (z.y[j] - ref.y[j]);
    out.y[j] -= c * (z.x[k] - ref.x[k]);
    return;
  }
  const auto d = static_cast<ComponentIndex>(K_->cols());
  const auto j = static_cast<Index>(i / d);
  const auto k = static_cast<Index>(i % d);
  add_row_col(j, probs_.q[k] * (z.y[j] - ref.y[j]), k, probs_.p[j] * (z.x[k] - ref.x[k]), w, out);
}

std::uint64_t BilinearOperator::component_touches(ComponentIndex i) const {
  require_index(i);
  if (scheme_.kind == SplitKind::Individual) return 1;
  const auto d = static_cast<ComponentIndex>(K_->cols());
  return K_->row_nnz(static_cast<Index>(i / d)) + K_->col_nnz(static_cast<Index>(i % d));
}

std::uint64_t BilinearOperator::saga_index_count() const {
  if (scheme_.kind == SplitKind::Factored) return static_cast<std::uint64_t>(std::max(K_->rows(), K_->cols()));
  return dist_.support_size();
}

std::unique_ptr<SagaTable> BilinearOperator::make_saga_table(const PrimalDualPoint& z0,
                                                             std::uint64_t& touches) const {
  geometry_.require_shape(z0);
  const bool at_origin = z0.x.isZero(0.0) && z0.y.isZero(0.0);
  touches = at_origin ? 0 : K_->nnz();
  if (scheme_.kind == SplitKind::Individual) return std::make_unique<IndividualSagaTable>(*this, z0);
  return std::make_unique<FactoredSagaTable>(*this, z0);
}

PrimalDualPoint full_forward(const CouplingMatrix& K, const Geometry& g, const PrimalDualPoint& z) {
  g.require_shape(z);
  if (g.primal_dim() != K.cols()) throw DimensionError("primal", K.cols(), g.primal_dim());
  if (g.dual_dim() != K.rows()) throw DimensionError("dual", K.rows(), g.dual_dim());
  const double scale = 1.0 / std::sqrt(g.lambda() * g.gamma());
  return {scale * K.transpose_times(z.y), -scale * K.times(z.x)};
}

PrimalDualPoint component_forward(const BilinearOperator& op, ComponentIndex i, const PrimalDualPoint& z) {
  PrimalDualPoint out(op.primal_dim(), op.dual_dim());
  op.add_component(i, z, 1.0, out);
  return out;
}

}  // namespace saddle
