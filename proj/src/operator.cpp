#include "saddle/operator.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace saddle {

void ForwardOperator::add_component_difference(ComponentIndex i, const PrimalDualPoint& z, const PrimalDualPoint& ref,
                                               double w, PrimalDualPoint& out) const {
  add_component(i, z, w, out);
  add_component(i, ref, -w, out);
}

void ForwardOperator::apply_primal_part(const PrimalDualPoint& z, Vector& out) const {
  PrimalDualPoint full = PrimalDualPoint::zeros_like(z);
  apply(z, full);
  out = std::move(full.x);
}

void ForwardOperator::apply_dual_part(const PrimalDualPoint& z, Vector& out) const {
  PrimalDualPoint full = PrimalDualPoint::zeros_like(z);
  apply(z, full);
  out = std::move(full.y);
}

namespace {

// One stored point per component index.
class DenseSagaTable : public SagaTable {
 public:
  DenseSagaTable(const ForwardOperator& op, const PrimalDualPoint& z0) : op_(op) {
    const auto count = op.component_count();
    values_.reserve(count);
    sum_ = PrimalDualPoint::zeros_like(z0);
    for (ComponentIndex i = 0; i < count; ++i) {
      PrimalDualPoint g = PrimalDualPoint::zeros_like(z0);
      if (op.probability(i) > 0.0) op.add_component(i, z0, 1.0, g);
      sum_ += g;
      values_.push_back(std::move(g));
    }
  }

  const PrimalDualPoint& sum() const override { return sum_; }

  void add_correction(ComponentIndex i, const PrimalDualPoint& z, double w, PrimalDualPoint& out) const override {
    op_.add_component(i, z, w, out);
    out.axpy(-w, values_[i]);
  }

  void refresh(ComponentIndex i, const PrimalDualPoint& z) override {
    PrimalDualPoint h = PrimalDualPoint::zeros_like(z);
    op_.add_component(i, z, 1.0, h);
    sum_ += h;
    sum_ -= values_[i];
    values_[i] = std::move(h);
  }

  double resum() override {
    PrimalDualPoint fresh = PrimalDualPoint::zeros_like(sum_);
    for (const auto& g : values_) fresh += g;
    const double scale = std::max(std::sqrt(fresh.squared_norm()), 1e-300);
    const double drift = std::sqrt((fresh - sum_).squared_norm()) / scale;
    sum_ = std::move(fresh);
    return drift;
  }

 private:
  const ForwardOperator& op_;
  std::vector<PrimalDualPoint> values_;
  PrimalDualPoint sum_;
};

}  // namespace

std::unique_ptr<SagaTable> ForwardOperator::make_saga_table(const PrimalDualPoint& z0, std::uint64_t& touches) const {
  touches = 0;
  for (ComponentIndex i = 0; i < component_count(); ++i)
    if (probability(i) > 0.0) touches += component_touches(i);
  return std::make_unique<DenseSagaTable>(*this, z0);
}

void Resolvent::apply_primal(double, const Vector&, Vector&) const {
  throw std::logic_error("resolvent is not separable");
}

void Resolvent::apply_dual(double, const Vector&, Vector&) const {
  throw std::logic_error("resolvent is not separable");
}

PrimalDualPoint random_point(Index d, Index n, Rng& rng) {
  PrimalDualPoint z(d, n);
  for (Index i = 0; i < d; ++i) z.x[i] = rng.normal();
  for (Index i = 0; i < n; ++i) z.y[i] = rng.normal();
  return z;
}

void verify_split(const ForwardOperator& op, std::uint64_t seed, double tol) {
  constexpr std::uint64_t kEnumerationLimit = 20000;
  const auto count = op.component_count();
  if (count > kEnumerationLimit) return;
  Rng rng(seed);
  for (int trial = 0; trial < 3; ++trial) {
    const PrimalDualPoint z = random_point(op.primal_dim(), op.dual_dim(), rng);
    PrimalDualPoint full = PrimalDualPoint::zeros_like(z);
    op.apply(z, full);
    PrimalDualPoint summed = PrimalDualPoint::zeros_like(z);
    for (ComponentIndex i = 0; i < count; ++i) op.add_component(i, z, 1.0, summed);
    const double err = std::sqrt((summed - full).squared_norm());
    const double scale = std::max(std::sqrt(full.squared_norm()), 1.0);
    if (!(err <= tol * scale))
      throw std::logic_error("split components do not sum to the full operator (relative error " +
                             std::to_string(err / scale) + ")");
  }
}

}  // namespace saddle
