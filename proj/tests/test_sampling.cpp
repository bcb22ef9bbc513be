#include "support.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include <set>

using namespace saddle;

namespace {

// Pearson statistic of `draws` samples against expected probabilities; returns the upper-tail p-value.
double chi_square_p_value(const std::vector<double>& probs, const std::vector<std::uint64_t>& counts, double draws) {
  double stat = 0.0;
  int cells = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] == 0.0) continue;
    const double expect = probs[i] * draws;
    stat += (counts[i] - expect) * (counts[i] - expect) / expect;
    ++cells;
  }
  boost::math::chi_squared dist(cells - 1);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next();
    EXPECT_EQ(va, b.next());
    differs = differs || va != c.next();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, UniformAndNormalMoments) {
  Rng rng(44);
  double s = 0, s2 = 0, n1 = 0, n2 = 0;
  const int N = 200000;
  for (int i = 0; i < N; ++i) {
    const double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u;
    s2 += u * u;
    const double z = rng.normal();
    n1 += z;
    n2 += z * z;
  }
  EXPECT_NEAR(s / N, 0.5, 0.005);
  EXPECT_NEAR(s2 / N, 1.0 / 3.0, 0.005);
  EXPECT_NEAR(n1 / N, 0.0, 0.01);
  EXPECT_NEAR(n2 / N, 1.0, 0.02);
}

TEST(Rng, BelowStaysInRange) {
  Rng rng(45);
  for (std::uint64_t bound : {1ull, 2ull, 7ull, 1000ull, (1ull << 40) + 3})
    for (int i = 0; i < 1000; ++i) EXPECT_LT(rng.below(bound), bound);
  EXPECT_THROW(rng.below(0), std::invalid_argument);
}

TEST(Rng, ChildSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    for (std::uint64_t run = 0; run < 50; ++run) seen.insert(child_seed(seed, run));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(child_seed(7, 3), child_seed(7, 3));
}

TEST(AliasTable, DrawsFollowTheWeights) {
  const std::vector<double> weights{5.0, 0.0, 1.0, 3.0, 0.5, 0.5, 10.0};
  const AliasTable table(weights);
  double total = 0;
  for (double w : weights) total += w;
  std::vector<double> probs;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    EXPECT_NEAR(table.probability(i), weights[i] / total, 1e-15);
    probs.push_back(weights[i] / total);
  }
  EXPECT_EQ(table.support_size(), 6u);
  Rng rng(46);
  std::vector<std::uint64_t> counts(weights.size(), 0);
  const int N = 200000;
  for (int i = 0; i < N; ++i) ++counts[table.draw(rng)];
  EXPECT_EQ(counts[1], 0u);
  EXPECT_GT(chi_square_p_value(probs, counts, N), 1e-4);
}

TEST(AliasTable, UniformOverSupportSkipsZeros) {
  const AliasTable table(std::vector<double>{0.0, 2.0, 0.0, 1.0});
  const AliasTable u = table.uniform_over_support();
  EXPECT_EQ(u.probability(0), 0.0);
  EXPECT_DOUBLE_EQ(u.probability(1), 0.5);
  EXPECT_DOUBLE_EQ(u.probability(3), 0.5);
}

TEST(AliasTable, RejectsBadWeights) {
  EXPECT_THROW(AliasTable(std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(AliasTable(std::vector<double>{0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(AliasTable(std::vector<double>{1.0, -1.0}), std::invalid_argument);
  EXPECT_THROW(AliasTable(std::vector<double>{1.0, NAN}), std::invalid_argument);
}

TEST(Distribution, ProductDrawsFollowTheProductLaw) {
  const AliasTable rows(std::vector<double>{1.0, 2.0, 0.0});
  const AliasTable cols(std::vector<double>{3.0, 1.0});
  const Distribution d = Distribution::product(rows, cols);
  EXPECT_TRUE(d.is_product());
  EXPECT_EQ(d.index_count(), 6u);
  EXPECT_EQ(d.support_size(), 4u);
  std::vector<double> probs;
  for (ComponentIndex i = 0; i < 6; ++i) probs.push_back(d.probability(i));
  EXPECT_NEAR(probs[1 * 2 + 0], 2.0 / 3.0 * 0.75, 1e-15);
  Rng rng(47);
  std::vector<std::uint64_t> counts(6, 0);
  const int N = 100000;
  for (int i = 0; i < N; ++i) ++counts[d.draw(rng)];
  EXPECT_GT(chi_square_p_value(probs, counts, N), 1e-4);
  EXPECT_THROW(d.probability(6), std::out_of_range);
  EXPECT_FALSE(d.is_uniform());
  EXPECT_TRUE(Distribution::flat(AliasTable(std::vector<double>{1, 1, 1})).is_uniform());
}

TEST(Sampler, BatchesAreReproducibleAndCounted) {
  const Distribution d = Distribution::flat(AliasTable(std::vector<double>{1, 2, 3, 4}));
  Sampler a(d, 9), b(d, 9);
  EXPECT_EQ(a.draw_batch(5), b.draw_batch(5));
  EXPECT_EQ(a.draws(), 5u);
  const auto u = a.draw_uniform_batch(3);
  EXPECT_EQ(u.size(), 3u);
  EXPECT_THROW(a.draw_batch(0), std::invalid_argument);
}

TEST(Sampler, MatrixWeightedSplitSamplesRowNorms) {
  const auto K = testing_support::coupling(testing_support::sparse_dense(8, 5, 0.6, 48));
  saddle::BilinearOperator op(K, {SplitKind::Factored, ProbabilityMode::MatrixWeighted}, Geometry(1, 1, 5, 8));
  Sampler s(op.distribution(), 49);
  std::vector<double> probs;
  for (ComponentIndex i = 0; i < op.component_count(); ++i) probs.push_back(op.probability(i));
  std::vector<std::uint64_t> counts(probs.size(), 0);
  const int N = 200000;
  for (ComponentIndex i : s.draw_batch(N)) ++counts[i];
  EXPECT_GT(chi_square_p_value(probs, counts, N), 1e-4);
}
