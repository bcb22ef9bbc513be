#pragma once

#include "saddle/core.hpp"
#include "saddle/sampling.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>

namespace saddle {

// Condition numbers in rescaled coordinates.
struct SmoothnessConstants {
  double L = 0.0;
  double Lbar = 0.0;  // bound on the sampled smoothness for the split and its probabilities
};

// Stored table of component values for SAGA, with running sum G = sum_i g_i.
class SagaTable {
 public:
  virtual ~SagaTable() = default;
  virtual const PrimalDualPoint& sum() const = 0;
  // out += w (B_i(z) - g_i)
  virtual void add_correction(ComponentIndex i, const PrimalDualPoint& z, double w, PrimalDualPoint& out) const = 0;
  // g_i <- B_i(z), keeping the running sum in step.
  virtual void refresh(ComponentIndex i, const PrimalDualPoint& z) = 0;
  // Recomputes G from the stored values, replaces it, and returns the relative drift.
  virtual double resum() = 0;
};

// The family {B_i} of a split monotone operator B = sum_i B_i, in rescaled coordinates.
class ForwardOperator {
 public:
  virtual ~ForwardOperator() = default;

  virtual Index primal_dim() const = 0;
  virtual Index dual_dim() const = 0;
  // Sampling distribution over component indices.
  virtual const Distribution& distribution() const = 0;
  std::uint64_t component_count() const { return distribution().index_count(); }
  double probability(ComponentIndex i) const { return distribution().probability(i); }

  // out = B(z)
  virtual void apply(const PrimalDualPoint& z, PrimalDualPoint& out) const = 0;
  // out += w B_i(z)
  virtual void add_component(ComponentIndex i, const PrimalDualPoint& z, double w, PrimalDualPoint& out) const = 0;
  // out += w (B_i(z) - B_i(ref))
  virtual void add_component_difference(ComponentIndex i, const PrimalDualPoint& z, const PrimalDualPoint& ref,
                                        double w, PrimalDualPoint& out) const;
  // Primal or dual block of B(z) alone, with the data accesses it needs.
  virtual void apply_primal_part(const PrimalDualPoint& z, Vector& out) const;
  virtual void apply_dual_part(const PrimalDualPoint& z, Vector& out) const;
  virtual double part_touches() const { return static_cast<double>(data_size()); }

  // Scalar data accesses per full evaluation and per component.
  virtual std::uint64_t data_size() const = 0;
  virtual std::uint64_t component_touches(ComponentIndex i) const = 0;

  // |I| as it enters the SAGA step size.
  virtual std::uint64_t saga_index_count() const { return distribution().support_size(); }
  // Table initialised at z0; `touches` receives the data accesses spent.
  virtual std::unique_ptr<SagaTable> make_saga_table(const PrimalDualPoint& z0, std::uint64_t& touches) const;
};

// Resolvent (I + sigma A)^{-1} of the strongly monotone part, in rescaled coordinates.
class Resolvent {
 public:
  virtual ~Resolvent() = default;
  // `in` and `out` may alias.
  virtual void apply(double sigma, const PrimalDualPoint& in, PrimalDualPoint& out) const = 0;
  virtual bool separable() const { return false; }
  virtual void apply_primal(double sigma, const Vector& in, Vector& out) const;
  virtual void apply_dual(double sigma, const Vector& in, Vector& out) const;
  virtual double cost_estimate() const = 0;
};

// Zero of A + sum_i B_i, everything in rescaled coordinates except `gap`.
struct OperatorProblem {
  std::shared_ptr<const ForwardOperator> forward;
  std::shared_ptr<const Resolvent> resolvent;
  SmoothnessConstants constants;
  Geometry geometry{1.0, 1.0, 0, 0};
  // Optional duality gap at a point in original coordinates.
  std::function<double(const PrimalDualPoint&)> gap;
  // Acceleration parameter suggested by the problem structure, if any.
  std::optional<double> acceleration_tau;
};

// Checks sum_i B_i(z) = B(z) on three random points when the index set is small
// enough to enumerate; throws std::logic_error on mismatch.
void verify_split(const ForwardOperator& op, std::uint64_t seed, double tol = 1e-8);

// Random point with standard normal entries.
PrimalDualPoint random_point(Index d, Index n, Rng& rng);

}  // namespace saddle
