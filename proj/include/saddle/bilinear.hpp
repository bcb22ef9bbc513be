#pragma once

#include "saddle/core.hpp"
#include "saddle/operator.hpp"

#include <Eigen/Sparse>

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

namespace saddle {

class PowerIterationError : public std::runtime_error {
 public:
  PowerIterationError(double last_quotient, int iterations);
  double last_quotient() const { return last_quotient_; }

 private:
  double last_quotient_;
};

struct PowerIterationOptions {
  int max_iterations = 500;
  double tolerance = 1e-6;  // relative change of the Rayleigh quotient
  std::uint64_t seed = 0x5eed;
};

// Lower estimate of the largest singular value; never below the largest row or column norm.
double estimate_op_norm(const Eigen::SparseMatrix<double, Eigen::RowMajor>& K, const PowerIterationOptions& opts,
                        double floor);

// n x d coupling matrix stored by rows and by columns, with cached norms.
class CouplingMatrix {
 public:
  using RowMajor = Eigen::SparseMatrix<double, Eigen::RowMajor>;
  using ColMajor = Eigen::SparseMatrix<double, Eigen::ColMajor>;

  explicit CouplingMatrix(RowMajor m, const PowerIterationOptions& opts = {});
  static CouplingMatrix from_dense(const Eigen::MatrixXd& dense, const PowerIterationOptions& opts = {});

  Index rows() const { return by_row_.rows(); }
  Index cols() const { return by_row_.cols(); }
  std::uint64_t nnz() const { return static_cast<std::uint64_t>(by_row_.nonZeros()); }

  const RowMajor& by_row() const { return by_row_; }
  const ColMajor& by_col() const { return by_col_; }

  const Vector& row_sq_norms() const { return row_sq_; }  // (K K^T)_jj
  const Vector& col_sq_norms() const { return col_sq_; }  // (K^T K)_kk
  double frobenius_sq() const { return frob_sq_; }
  double frobenius() const;
  // Largest Euclidean norm over rows and columns.
  double max_norm() const { return max_norm_; }
  double op_norm() const { return op_norm_; }

  std::uint64_t row_nnz(Index j) const;
  std::uint64_t col_nnz(Index k) const;
  // Stored entry e in row-major order.
  Index entry_row(std::uint64_t e) const { return entry_row_[e]; }
  Index entry_col(std::uint64_t e) const { return by_row_.innerIndexPtr()[e]; }
  double entry_value(std::uint64_t e) const { return by_row_.valuePtr()[e]; }

  Vector times(const Vector& x) const;            // K x
  Vector transpose_times(const Vector& y) const;  // K^T y

 private:
  RowMajor by_row_;
  ColMajor by_col_;
  Vector row_sq_;
  Vector col_sq_;
  double frob_sq_ = 0.0;
  double max_norm_ = 0.0;
  double op_norm_ = 0.0;
  std::vector<Index> entry_row_;
};

enum class SplitKind { Individual, Factored };
// MatrixWeighted: p_j ~ row norms^2 (factored) or pi ~ K_jk^2 (individual).
// Mixture: half uniform, half matrix weighted.
enum class ProbabilityMode { Uniform, MatrixWeighted, Mixture };

struct SplitScheme {
  SplitKind kind = SplitKind::Factored;
  ProbabilityMode mode = ProbabilityMode::MatrixWeighted;
};

const char* to_string(SplitKind k);
const char* to_string(ProbabilityMode m);

// Factored: row weights p and column weights q. Individual: pi over stored entries.
struct SplitProbabilities {
  Vector p;
  Vector q;
  Vector pi;
};

SplitProbabilities sampling_probabilities(const CouplingMatrix& K, const SplitScheme& s);
SmoothnessConstants compute_constants(const CouplingMatrix& K, const SplitScheme& s, const Geometry& g);

// B(x, y) = (K^T y, -K x) in rescaled coordinates, split per the scheme.
class BilinearOperator : public ForwardOperator {
 public:
  BilinearOperator(std::shared_ptr<const CouplingMatrix> K, SplitScheme scheme, Geometry geometry);

  const CouplingMatrix& matrix() const { return *K_; }
  const SplitScheme& scheme() const { return scheme_; }
  const SplitProbabilities& probabilities() const { return probs_; }
  // 1 / sqrt(lambda gamma)
  double scale() const { return scale_; }

  Index primal_dim() const override { return K_->cols(); }
  Index dual_dim() const override { return K_->rows(); }
  const Distribution& distribution() const override { return dist_; }

  void apply(const PrimalDualPoint& z, PrimalDualPoint& out) const override;
  void apply_primal_part(const PrimalDualPoint& z, Vector& out) const override;
  void apply_dual_part(const PrimalDualPoint& z, Vector& out) const override;
  double part_touches() const override { return 0.5 * static_cast<double>(K_->nnz()); }
  void add_component(ComponentIndex i, const PrimalDualPoint& z, double w, PrimalDualPoint& out) const override;
  void add_component_difference(ComponentIndex i, const PrimalDualPoint& z, const PrimalDualPoint& ref, double w,
                                PrimalDualPoint& out) const override;

  std::uint64_t data_size() const override { return K_->nnz(); }
  std::uint64_t component_touches(ComponentIndex i) const override;
  std::uint64_t saga_index_count() const override;
  std::unique_ptr<SagaTable> make_saga_table(const PrimalDualPoint& z0, std::uint64_t& touches) const override;

  // Adds w * scale * (coef_y * K_j.^T, -coef_x * K_.k) into out; the factored building block.
  void add_row_col(Index j, double coef_y, Index k, double coef_x, double w, PrimalDualPoint& out) const;

 private:
  void require_index(ComponentIndex i) const;

  std::shared_ptr<const CouplingMatrix> K_;
  SplitScheme scheme_;
  Geometry geometry_;
  SplitProbabilities probs_;
  Distribution dist_;
  double scale_;
};

// Forward map in rescaled coordinates: (lambda^{-1/2} K^T gamma^{-1/2} y', -gamma^{-1/2} K lambda^{-1/2} x').
PrimalDualPoint full_forward(const CouplingMatrix& K, const Geometry& g, const PrimalDualPoint& z);
PrimalDualPoint component_forward(const BilinearOperator& op, ComponentIndex i, const PrimalDualPoint& z);

}  // namespace saddle
