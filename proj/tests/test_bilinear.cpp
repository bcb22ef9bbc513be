#include "support.hpp"

#include <gtest/gtest.h>

using namespace saddle;
using namespace testing_support;

namespace {

const SplitKind kKinds[] = {SplitKind::Individual, SplitKind::Factored};
const ProbabilityMode kModes[] = {ProbabilityMode::Uniform, ProbabilityMode::MatrixWeighted, ProbabilityMode::Mixture};

}  // namespace

TEST(CouplingMatrix, CachedNormsMatchDenseComputation) {
  const Eigen::MatrixXd m = sparse_dense(9, 7, 0.4, 5);
  const CouplingMatrix K = CouplingMatrix::from_dense(m);
  EXPECT_NEAR(K.frobenius_sq(), m.squaredNorm(), 1e-12);
  for (Index j = 0; j < 9; ++j) EXPECT_NEAR(K.row_sq_norms()[j], m.row(j).squaredNorm(), 1e-12);
  for (Index k = 0; k < 7; ++k) EXPECT_NEAR(K.col_sq_norms()[k], m.col(k).squaredNorm(), 1e-12);
  const double mx = std::max(m.rowwise().norm().maxCoeff(), m.colwise().norm().maxCoeff());
  EXPECT_NEAR(K.max_norm(), mx, 1e-12);
  const double op = dense_op_norm(m);
  EXPECT_LE(K.op_norm(), op * (1 + 1e-9));
  EXPECT_GE(K.op_norm(), op * (1 - 1e-3));
  const Vector x = gaussian_vector(7, 6), y = gaussian_vector(9, 7);
  EXPECT_LE((K.times(x) - m * x).norm(), 1e-12);
  EXPECT_LE((K.transpose_times(y) - m.transpose() * y).norm(), 1e-12);
}

TEST(CouplingMatrix, EntryAccessorsFollowRowMajorOrder) {
  const Eigen::MatrixXd m = sparse_dense(5, 6, 0.5, 8);
  const CouplingMatrix K = CouplingMatrix::from_dense(m);
  Eigen::MatrixXd rebuilt = Eigen::MatrixXd::Zero(5, 6);
  Index last_row = 0;
  for (std::uint64_t e = 0; e < K.nnz(); ++e) {
    EXPECT_GE(K.entry_row(e), last_row);
    last_row = K.entry_row(e);
    rebuilt(K.entry_row(e), K.entry_col(e)) = K.entry_value(e);
  }
  EXPECT_EQ(rebuilt, m);
}

TEST(Bilinear, NormChainHoldsOnRandomFamilies) {
  Rng rng(9);
  for (int t = 0; t < 60; ++t) {
    const Index n = 1 + static_cast<Index>(rng.below(30)), d = 1 + static_cast<Index>(rng.below(30));
    const Eigen::MatrixXd m = t % 3 == 0 ? gaussian_dense(n, d, rng.next())
                              : t % 3 == 1 ? sparse_dense(n, d, 0.3, rng.next())
                                           : rank_one_dense(n, d, rng.next());
    if (m.squaredNorm() == 0.0) continue;
    const CouplingMatrix K = CouplingMatrix::from_dense(m);
    const double op = dense_op_norm(m), tol = 1e-12 * K.frobenius();
    EXPECT_LE(K.max_norm(), op + tol);
    EXPECT_LE(op, K.frobenius() + tol);
    EXPECT_LE(K.frobenius(), std::sqrt(double(std::max(n, d))) * K.max_norm() + tol);
  }
}

TEST(Bilinear, PowerIterationFailureIsReported) {
  PowerIterationOptions opts;
  opts.max_iterations = 1;
  opts.tolerance = 0.0;
  const auto m = CouplingMatrix::from_dense(gaussian_dense(30, 30, 10)).by_row();
  EXPECT_THROW(estimate_op_norm(m, opts, 0.0), PowerIterationError);
}

TEST(Bilinear, ConstantsFollowTheStatedFormulas) {
  const Eigen::MatrixXd m = sparse_dense(12, 8, 0.6, 11);
  const auto K = coupling(m);
  const Geometry g(0.3, 4.0, 8, 12);
  const double s = 1.0 / std::sqrt(0.3 * 4.0);
  const double F = K->frobenius(), mx = K->max_norm();
  const double big = std::sqrt(12.0), all = std::sqrt(double(K->nnz()));
  auto lbar = [&](SplitKind k, ProbabilityMode mode) { return compute_constants(*K, {k, mode}, g).Lbar; };
  EXPECT_NEAR(lbar(SplitKind::Factored, ProbabilityMode::MatrixWeighted), F * s, 1e-12);
  EXPECT_NEAR(lbar(SplitKind::Factored, ProbabilityMode::Uniform), big * mx * s, 1e-12);
  EXPECT_NEAR(lbar(SplitKind::Individual, ProbabilityMode::MatrixWeighted), big * F * s, 1e-12);
  EXPECT_NEAR(lbar(SplitKind::Individual, ProbabilityMode::Uniform), all * mx * s, 1e-12);
  EXPECT_NEAR(compute_constants(*K, {}, g).L, std::min(1.01 * K->op_norm(), F) * s, 1e-12);
  EXPECT_THROW(compute_constants(*K, {}, Geometry(1, 1, 7, 12)), DimensionError);
}

// Every split, probability mode: sum_i B_i = B, and sum_i |B_i z|^2 / pi_i <= Lbar^2 |z|^2.
TEST(Bilinear, SplitsSumToTheOperatorAndRespectLbar) {
  const Eigen::MatrixXd m = sparse_dense(6, 5, 0.7, 12);
  const auto K = coupling(m);
  const Geometry g(0.7, 1.3, 5, 6);
  Rng rng(13);
  for (SplitKind kind : kKinds)
    for (ProbabilityMode mode : kModes) {
      BilinearOperator op(K, {kind, mode}, g);
      const double lbar = compute_constants(*K, {kind, mode}, g).Lbar;
      for (int t = 0; t < 20; ++t) {
        const PrimalDualPoint z = random_point(5, 6, rng);
        PrimalDualPoint sum(5, 6), full;
        op.apply(z, full);
        // dense oracle in rescaled coordinates
        const double s = 1.0 / std::sqrt(0.7 * 1.3);
        EXPECT_LE((full.x - s * m.transpose() * z.y).norm(), 1e-12);
        EXPECT_LE((full.y + s * m * z.x).norm(), 1e-12);
        double second_moment = 0.0;
        for (ComponentIndex i = 0; i < op.component_count(); ++i) {
          PrimalDualPoint c(5, 6);
          op.add_component(i, z, 1.0, c);
          sum += c;
          const double p = op.probability(i);
          if (p > 0) second_moment += c.squared_norm() / p;
          else EXPECT_EQ(c.squared_norm(), 0.0);
        }
        EXPECT_LE((sum - full).squared_norm(), 1e-24 * std::max(full.squared_norm(), 1.0));
        EXPECT_LE(second_moment, lbar * lbar * z.squared_norm() * (1 + 1e-10))
            << to_string(kind) << "/" << to_string(mode);
      }
    }
}

TEST(Bilinear, ProbabilitiesAreNormalized) {
  const auto K = coupling(sparse_dense(7, 9, 0.5, 14));
  for (SplitKind kind : kKinds)
    for (ProbabilityMode mode : kModes) {
      const SplitProbabilities pr = sampling_probabilities(*K, {kind, mode});
      if (kind == SplitKind::Factored) {
        EXPECT_NEAR(pr.p.sum(), 1.0, 1e-12);
        EXPECT_NEAR(pr.q.sum(), 1.0, 1e-12);
      } else {
        EXPECT_NEAR(pr.pi.sum(), 1.0, 1e-12);
      }
    }
  const SplitProbabilities w = sampling_probabilities(*K, {SplitKind::Factored, ProbabilityMode::MatrixWeighted});
  for (Index j = 0; j < 7; ++j) EXPECT_NEAR(w.p[j], K->row_sq_norms()[j] / K->frobenius_sq(), 1e-12);
  EXPECT_THROW(sampling_probabilities(CouplingMatrix::from_dense(Eigen::MatrixXd::Zero(3, 3)), {}),
               std::invalid_argument);
}

TEST(Bilinear, SagaTableTracksItsSum) {
  const auto K = coupling(gaussian_dense(5, 4, 15));
  const Geometry g(1.0, 2.0, 4, 5);
  Rng rng(16);
  for (SplitKind kind : kKinds) {
    BilinearOperator op(K, {kind, ProbabilityMode::MatrixWeighted}, g);
    const PrimalDualPoint z0 = random_point(4, 5, rng);
    std::uint64_t touches = 0;
    auto table = op.make_saga_table(z0, touches);
    EXPECT_GT(touches, 0u);
    PrimalDualPoint full;
    op.apply(z0, full);
    EXPECT_LE((table->sum() - full).squared_norm(), 1e-24 * full.squared_norm());
    for (int r = 0; r < 200; ++r) table->refresh(op.distribution().draw(rng), random_point(4, 5, rng));
    EXPECT_LE(table->resum(), 1e-12);
  }
}

TEST(Bilinear, ComponentIndexOutOfRangeThrows) {
  const auto K = coupling(gaussian_dense(3, 2, 17));
  BilinearOperator op(K, {}, Geometry(1, 1, 2, 3));
  PrimalDualPoint out(2, 3);
  EXPECT_THROW(op.add_component(op.component_count(), PrimalDualPoint(2, 3), 1.0, out), std::out_of_range);
}

TEST(Bilinear, DefaultTauFormula) {
  const auto K = coupling(gaussian_dense(20, 10, 18));
  const Geometry g(0.01, 0.02, 10, 20);
  const double expect = std::max(0.0, K->frobenius() / std::sqrt(0.01 * 0.02) * std::sqrt(1.0 / 10) - 1.0);
  EXPECT_NEAR(bilinear_default_tau(*K, g), expect, 1e-12 * expect);
  EXPECT_EQ(bilinear_default_tau(*K, Geometry(1e6, 1e6, 10, 20)), 0.0);
}

TEST(Bilinear, HandEvaluatedSmallCases) {
  const auto one = coupling(Eigen::MatrixXd::Constant(1, 1, 2.0));
  const PrimalDualPoint z(Vector::Ones(1), Vector::Constant(1, 3.0));
  const PrimalDualPoint full = full_forward(*one, Geometry(1, 1, 1, 1), z);
  EXPECT_DOUBLE_EQ(full.x[0], 6.0);
  EXPECT_DOUBLE_EQ(full.y[0], -2.0);
  BilinearOperator single(one, {SplitKind::Individual, ProbabilityMode::Uniform}, Geometry(1, 1, 1, 1));
  const PrimalDualPoint part = component_forward(single, 0, z);
  EXPECT_DOUBLE_EQ(part.x[0], 6.0);
  EXPECT_DOUBLE_EQ(part.y[0], -2.0);

  const auto eye = coupling(Eigen::MatrixXd::Identity(2, 2));
  const SplitProbabilities pf = sampling_probabilities(*eye, {SplitKind::Factored, ProbabilityMode::MatrixWeighted});
  EXPECT_DOUBLE_EQ(pf.p[0], 0.5);
  EXPECT_DOUBLE_EQ(pf.q[1], 0.5);
  const SmoothnessConstants c = compute_constants(*eye, {}, Geometry(1, 1, 2, 2));
  // the power-iteration estimate carries a 1% safety inflation
  EXPECT_NEAR(c.L, 1.01, 1e-6);
  EXPECT_NEAR(c.Lbar, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(compute_constants(*eye, {}, Geometry(4, 1, 2, 2)).L, 0.505, 1e-6);

  Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(2, 2);
  diag(0, 0) = 1;
  diag(1, 1) = 3;
  const SplitProbabilities pi = sampling_probabilities(*coupling(diag), {SplitKind::Individual, ProbabilityMode::MatrixWeighted});
  ASSERT_EQ(pi.pi.size(), 2);
  EXPECT_NEAR(pi.pi[0], 0.1, 1e-15);
  EXPECT_NEAR(pi.pi[1], 0.9, 1e-15);
  EXPECT_NEAR(sampling_probabilities(*coupling(gaussian_dense(3, 4, 1)), {SplitKind::Individual, ProbabilityMode::Uniform}).pi[5],
              1.0 / 12, 1e-15);

  // all-ones 2x2: every row and column has norm sqrt(2), so |K|_max = sqrt(2) and the
  // individual uniform bound is sqrt(nnz) |K|_max = 2 sqrt(2)
  const auto ones = coupling(Eigen::MatrixXd::Ones(2, 2));
  EXPECT_NEAR(ones->max_norm(), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(compute_constants(*ones, {SplitKind::Individual, ProbabilityMode::Uniform}, Geometry(1, 1, 2, 2)).Lbar,
              2.0 * std::sqrt(2.0), 1e-15);
}
