#pragma once

#include "saddle/bilinear.hpp"
#include "saddle/core.hpp"
#include "saddle/cost.hpp"
#include "saddle/operator.hpp"
#include "saddle/problem.hpp"
#include "saddle/prox.hpp"

#include <optional>

namespace saddle {

// Omega(z - reference)^2
double distance_sq(const Geometry& g, const PrimalDualPoint& z, const PrimalDualPoint& reference);

struct GapParts {
  double primal = 0.0;  // f(x) + g*(K x)
  double dual = 0.0;    // -g(y) - f*(-K^T y)
  double gap() const { return primal - dual; }
};

GapParts duality_gap_parts(const CouplingMatrix& K, const Geometry& geom, const SeparableTerm& f,
                           const SeparableTerm& g, const PrimalDualPoint& z);
double duality_gap_separable(const CouplingMatrix& K, const Geometry& geom, const SeparableTerm& f,
                             const SeparableTerm& g, const PrimalDualPoint& z);

enum class LossKind { Square, Auc };

const char* to_string(LossKind k);

struct TestMetrics {
  double loss = 0.0;      // mean squared loss, or the pairwise surrogate
  double accuracy = 0.0;  // sign agreement (square loss)
  double auc = 0.0;       // exact pairwise ranking score (ROC loss)
};

// Fraction of (positive, negative) pairs ranked correctly; ties count one half.
double exact_auc(const Vector& scores, const Vector& labels);

// Held-out metrics of the primal model x. For the ROC surrogate, which pushes negatives
// above positives, the ranking score is -K x.
TestMetrics test_metrics(const Vector& x, const CouplingMatrix& heldout, const Vector& labels, LossKind loss);

// Solution for f = (lambda/2)|x|^2 + <c, x>, g = (gamma/2)|y|^2 + <b, y>; empty otherwise.
std::optional<PrimalDualPoint> closed_form_solution(const SaddleProblem& sp);

// Upper bound on Omega(z - z*)^2 / Omega(z)^2 from the forward-backward residual.
double reference_certificate(const OperatorProblem& p, const PrimalDualPoint& z);

struct ReferenceOptions {
  double target_certificate = 1e-24;
  double max_certificate = 1e-10;
  double chunk_passes = 40.0;
  double max_passes = 40000.0;
  std::uint64_t seed = 0x2ef;
};

struct ReferenceSolution {
  PrimalDualPoint z;
  double certificate = 0.0;
  bool closed_form = false;
};

// High-precision accelerated variance-reduced runs from two seeds; throws when the
// result cannot be certified or the runs disagree beyond their bounds.
ReferenceSolution certify_reference(const OperatorProblem& p, const ReferenceOptions& opts = {});
// Closed form when available, else certify_reference.
ReferenceSolution reference_solution(const SaddleProblem& sp, const OperatorProblem& p,
                                     const ReferenceOptions& opts = {});

}  // namespace saddle
