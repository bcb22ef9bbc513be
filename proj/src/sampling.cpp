#include "saddle/sampling.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace saddle {

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("empty range");
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * bound) >> 64);
}

double Rng::normal() {
  // Box-Muller
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t child_seed(std::uint64_t seed, std::uint64_t run_id) {
  return splitmix64(splitmix64(seed) ^ splitmix64(run_id + 0x632be59bd9b4e019ULL));
}

AliasTable::AliasTable(std::span<const double> weights) {
  const std::size_t n = weights.size();
  if (n == 0) throw std::invalid_argument("alias table needs at least one weight");
  if (n > std::numeric_limits<std::uint32_t>::max()) throw std::invalid_argument("alias table too large");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("weights must be finite and nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("no sampling distribution: all weights are zero");

  p_.resize(n);
  prob_.assign(n, 0.0);
  alias_.resize(n);
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small, large;
  std::uint32_t any_positive = 0;
  for (std::size_t i = 0; i < n; ++i) {
    p_[i] = weights[i] / total;
    scaled[i] = p_[i] * static_cast<double>(n);
    alias_[i] = static_cast<std::uint32_t>(i);
    if (weights[i] > 0.0) {
      ++support_;
      any_positive = static_cast<std::uint32_t>(i);
    }
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const std::uint32_t s = small.back();
    small.pop_back();
    const std::uint32_t l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (std::uint32_t l : large) prob_[l] = 1.0;
  // Leftovers from rounding: positive entries keep themselves, zero-weight ones never win.
  for (std::uint32_t s : small) {
    if (weights[s] > 0.0) {
      prob_[s] = 1.0;
    } else {
      prob_[s] = 0.0;
      alias_[s] = any_positive;
    }
  }
}

std::size_t AliasTable::draw(Rng& rng) const {
  const std::size_t i = rng.below(prob_.size());
  return rng.uniform01() < prob_[i] ? i : alias_[i];
}

AliasTable AliasTable::uniform_over_support() const {
  std::vector<double> w(p_.size());
  for (std::size_t i = 0; i < p_.size(); ++i) w[i] = p_[i] > 0.0 ? 1.0 : 0.0;
  return AliasTable(w);
}

Distribution Distribution::flat(AliasTable table) {
  Distribution d;
  d.a_ = std::move(table);
  return d;
}

Distribution Distribution::product(AliasTable rows, AliasTable cols) {
  Distribution d;
  d.product_ = true;
  d.a_ = std::move(rows);
  d.b_ = std::move(cols);
  return d;
}

std::uint64_t Distribution::index_count() const {
  return product_ ? static_cast<std::uint64_t>(a_.size()) * b_.size() : a_.size();
}

std::uint64_t Distribution::support_size() const {
  return product_ ? static_cast<std::uint64_t>(a_.support_size()) * b_.support_size() : a_.support_size();
}

double Distribution::probability(ComponentIndex i) const {
  if (i >= index_count()) throw std::out_of_range("component index out of range");
  if (!product_) return a_.probability(i);
  return a_.probability(i / b_.size()) * b_.probability(i % b_.size());
}

ComponentIndex Distribution::draw(Rng& rng) const {
  if (!product_) return a_.draw(rng);
  const std::uint64_t j = a_.draw(rng);
  const std::uint64_t k = b_.draw(rng);
  return j * b_.size() + k;
}

Distribution Distribution::uniform_over_support() const {
  if (!product_) return flat(a_.uniform_over_support());
  return product(a_.uniform_over_support(), b_.uniform_over_support());
}

bool Distribution::is_uniform(double tol) const {
  auto flat_uniform = [tol](const AliasTable& t) {
    const double target = 1.0 / static_cast<double>(t.support_size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double p = t.probability(i);
      if (p > 0.0 && std::abs(p - target) > tol * target) return false;
    }
    return true;
  };
  return flat_uniform(a_) && (!product_ || flat_uniform(b_));
}

Sampler::Sampler(Distribution dist, std::uint64_t seed)
    : dist_(std::move(dist)), uniform_(dist_.uniform_over_support()), seed_(seed), rng_(seed) {}

void Sampler::draw_batch(std::size_t m, std::vector<ComponentIndex>& out) {
  if (m == 0) throw std::invalid_argument("batch size must be positive");
  out.resize(m);
  for (auto& i : out) i = dist_.draw(rng_);
  draws_ += m;
}

void Sampler::draw_uniform_batch(std::size_t m, std::vector<ComponentIndex>& out) {
  if (m == 0) throw std::invalid_argument("batch size must be positive");
  out.resize(m);
  for (auto& i : out) i = uniform_.draw(rng_);
  draws_ += m;
}

std::vector<ComponentIndex> Sampler::draw_batch(std::size_t m) {
  std::vector<ComponentIndex> out;
  draw_batch(m, out);
  return out;
}

std::vector<ComponentIndex> Sampler::draw_uniform_batch(std::size_t m) {
  std::vector<ComponentIndex> out;
  draw_uniform_batch(m, out);
  return out;
}

}  // namespace saddle
