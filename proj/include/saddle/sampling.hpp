#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace saddle {

using ComponentIndex = std::uint64_t;

// 64-bit seeded generator; the engine is fixed so traces are reproducible across builds.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  // Uniform on {0, ..., bound - 1}.
  std::uint64_t below(std::uint64_t bound);
  double normal();

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);
// Independent child stream for (seed, run_id).
std::uint64_t child_seed(std::uint64_t seed, std::uint64_t run_id);

// Vose alias table over {0, ..., size-1}. Zero weights are never drawn.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(std::span<const double> weights);

  std::size_t size() const { return prob_.size(); }
  double probability(std::size_t i) const { return p_[i]; }
  std::size_t support_size() const { return support_; }
  std::size_t draw(Rng& rng) const;
  // Same support, equal weights.
  AliasTable uniform_over_support() const;

 private:
  std::vector<double> p_;
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
  std::size_t support_ = 0;
};

// Either a flat table over component indices, or a product of a row table and a
// column table with index j * cols + k.
class Distribution {
 public:
  static Distribution flat(AliasTable table);
  static Distribution product(AliasTable rows, AliasTable cols);

  bool is_product() const { return product_; }
  std::uint64_t index_count() const;
  std::uint64_t support_size() const;
  double probability(ComponentIndex i) const;
  ComponentIndex draw(Rng& rng) const;
  Distribution uniform_over_support() const;
  bool is_uniform(double tol = 1e-12) const;

  const AliasTable& first() const { return a_; }
  const AliasTable& second() const { return b_; }

 private:
  bool product_ = false;
  AliasTable a_;
  AliasTable b_;
};

class Sampler {
 public:
  Sampler(Distribution dist, std::uint64_t seed);

  const Distribution& distribution() const { return dist_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return draws_; }

  void draw_batch(std::size_t m, std::vector<ComponentIndex>& out);
  void draw_uniform_batch(std::size_t m, std::vector<ComponentIndex>& out);
  std::vector<ComponentIndex> draw_batch(std::size_t m);
  std::vector<ComponentIndex> draw_uniform_batch(std::size_t m);

 private:
  Distribution dist_;
  Distribution uniform_;
  std::uint64_t seed_;
  Rng rng_;
  std::uint64_t draws_ = 0;
};

}  // namespace saddle
