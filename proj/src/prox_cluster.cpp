#include "saddle/prox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace saddle {

namespace {

// argmin_u |u - in|^2 / 2 + t sum_{i<j} |u_i - u_j|. Sorting by value fixes the sign of
// every pair, the penalty becomes linear in the sorted coordinates, and isotonic
// regression restores the order.
Vector pairwise_fused_prox(const Vector& in, double t) {
  const Index n = in.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return in[a] > in[b]; });

  // Pool adjacent violators for a non-increasing fit; blocks live on a stack.
  struct Block {
    double sum;
    Index count;
  };
  std::vector<Block> blocks;
  blocks.reserve(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) {
    const double target = in[order[static_cast<std::size_t>(k)]] - t * static_cast<double>(n - 1 - 2 * k);
    blocks.push_back({target, 1});
    while (blocks.size() > 1) {
      const Block& last = blocks.back();
      const Block& prev = blocks[blocks.size() - 2];
      if (prev.sum * static_cast<double>(last.count) >= last.sum * static_cast<double>(prev.count)) break;
      const Block merged{prev.sum + last.sum, prev.count + last.count};
      blocks.pop_back();
      blocks.back() = merged;
    }
  }

  Vector out(n);
  Index k = 0;
  for (const Block& b : blocks) {
    const double mean = b.sum / static_cast<double>(b.count);
    for (Index r = 0; r < b.count; ++r, ++k) out[order[static_cast<std::size_t>(k)]] = mean;
  }
  return out;
}

}  // namespace

Vector prox_cluster_norm(double lambda, double sigma, double c, const Vector& x_in) {
  if (!(c >= 0.0)) throw std::invalid_argument("cluster weight must be nonnegative");
  if (!(lambda > 0.0) || !(sigma > 0.0)) throw std::invalid_argument("lambda and sigma must be positive");
  if (x_in.size() == 0) throw std::invalid_argument("cluster prox needs at least one coordinate");
  Vector u = pairwise_fused_prox(x_in, sigma * c / lambda);
  return u / (1.0 + sigma);
}

double cluster_penalty(const Vector& v) {
  std::vector<double> s(v.data(), v.data() + v.size());
  std::sort(s.begin(), s.end());
  double acc = 0.0;
  const auto n = static_cast<double>(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) acc += s[k] * (2.0 * static_cast<double>(k) - n + 1.0);
  return acc;
}

ClusterTerm::ClusterTerm(double c, Vector linear, double pair_factor)
    : c_(c), linear_(std::move(linear)), pair_factor_(pair_factor) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("cluster weight must be finite and nonnegative");
  if (!(pair_factor > 0.0)) throw std::invalid_argument("pair factor must be positive");
}

void ClusterTerm::prox(double sigma, double w, const Vector& in, Vector& out) const {
  if (linear_.size() != 0 && linear_.size() != in.size()) throw DimensionError("term", linear_.size(), in.size());
  if (linear_.size() != 0) {
    const Vector shifted = in - (sigma / w) * linear_;
    out = prox_cluster_norm(w, sigma, pair_factor_ * c_, shifted);
  } else {
    out = prox_cluster_norm(w, sigma, pair_factor_ * c_, in);
  }
}

double ClusterTerm::value(double w, const Vector& v) const {
  double val = 0.5 * w * v.squaredNorm() + pair_factor_ * c_ * cluster_penalty(v);
  if (linear_.size() != 0) val += linear_.dot(v);
  return val;
}

double ClusterTerm::cost_estimate(Index dim) const {
  const double d = static_cast<double>(dim);
  return d * std::max(1.0, std::log2(std::max(d, 2.0)));
}

}  // namespace saddle
