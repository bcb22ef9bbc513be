#include "saddle/metrics.hpp"

#include "saddle/solvers.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <vector>

namespace saddle {

double distance_sq(const Geometry& g, const PrimalDualPoint& z, const PrimalDualPoint& reference) {
  return omega_sq(g, z - reference);
}

GapParts duality_gap_parts(const CouplingMatrix& K, const Geometry& geom, const SeparableTerm& f,
                           const SeparableTerm& g, const PrimalDualPoint& z) {
  geom.require_shape(z);
  const Vector Kx = K.times(z.x);
  const Vector Kty = K.transpose_times(z.y);
  GapParts parts;
  parts.primal = f.value(geom.lambda(), z.x) + g.conjugate(geom.gamma(), Kx);
  parts.dual = -g.value(geom.gamma(), z.y) - f.conjugate(geom.lambda(), -Kty);
  return parts;
}

double duality_gap_separable(const CouplingMatrix& K, const Geometry& geom, const SeparableTerm& f,
                             const SeparableTerm& g, const PrimalDualPoint& z) {
  return duality_gap_parts(K, geom, f, g, z).gap();
}

const char* to_string(LossKind k) { return k == LossKind::Square ? "square" : "auc"; }

double exact_auc(const Vector& scores, const Vector& labels) {
  if (scores.size() != labels.size()) throw DimensionError("dual", labels.size(), scores.size());
  std::vector<Index> order(static_cast<std::size_t>(scores.size()));
  for (Index i = 0; i < scores.size(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return scores[a] < scores[b]; });
  // Rank-sum with midranks for ties.
  double pos_rank_sum = 0.0;
  Index n_pos = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] > 0.0) {
        pos_rank_sum += midrank;
        ++n_pos;
      }
    }
    i = j + 1;
  }
  const Index n_neg = scores.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("ranking score needs both classes");
  const double np = static_cast<double>(n_pos);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

TestMetrics test_metrics(const Vector& x, const CouplingMatrix& heldout, const Vector& labels, LossKind loss) {
  if (labels.size() != heldout.rows()) throw DimensionError("dual", heldout.rows(), labels.size());
  const Vector scores = heldout.times(x);
  TestMetrics m;
  if (loss == LossKind::Square) {
    m.loss = (scores - labels).squaredNorm() / (2.0 * static_cast<double>(labels.size()));
    Index correct = 0;
    for (Index i = 0; i < labels.size(); ++i) correct += (scores[i] > 0.0) == (labels[i] > 0.0);
    m.accuracy = static_cast<double>(correct) / static_cast<double>(labels.size());
    m.auc = std::numeric_limits<double>::quiet_NaN();
  } else {
    const AucLossSpec spec(labels);
    m.loss = auc_loss(spec, scores);
    m.auc = exact_auc(-scores, labels);
    m.accuracy = std::numeric_limits<double>::quiet_NaN();
  }
  return m;
}

std::optional<PrimalDualPoint> closed_form_solution(const SaddleProblem& sp) {
  auto f = std::dynamic_pointer_cast<const SeparableTerm>(sp.primal);
  auto g = std::dynamic_pointer_cast<const SeparableTerm>(sp.dual);
  if (!f || !g || f->l1() != 0.0 || g->l1() != 0.0) return std::nullopt;
  const CouplingMatrix& K = *sp.K;
  const double lambda = sp.geometry.lambda();
  const double gamma = sp.geometry.gamma();
  const Index d = K.cols();
  const Index n = K.rows();
  const Vector c = f->linear().size() ? f->linear() : Vector::Zero(d);
  const Vector b = g->linear().size() ? g->linear() : Vector::Zero(n);

  // (lambda I + K^T K / gamma) x = -c + K^T b / gamma,  y = (K x - b) / gamma
  CouplingMatrix::ColMajor normal = (K.by_col().transpose() * K.by_col()) / gamma;
  CouplingMatrix::ColMajor identity(d, d);
  identity.setIdentity();
  normal += lambda * identity;
  Eigen::SimplicialLDLT<CouplingMatrix::ColMajor> ldlt(normal);
  if (ldlt.info() != Eigen::Success) throw std::runtime_error("closed-form factorisation failed");
  const Vector rhs = -c + K.transpose_times(b) / gamma;
  Vector x = ldlt.solve(rhs);
  // One step of iterative refinement.
  const Vector residual = rhs - normal * x;
  x += ldlt.solve(residual);
  Vector y = (K.times(x) - b) / gamma;
  return PrimalDualPoint(std::move(x), std::move(y));
}

double reference_certificate(const OperatorProblem& p, const PrimalDualPoint& z) {
  const PrimalDualPoint zr = rescale(p.geometry, z);
  const double bound = fixed_point_distance_bound(p, zr);
  const double norm_sq = zr.squared_norm();
  if (bound == 0.0) return 0.0;
  return bound * bound / std::max(norm_sq, 1e-300);
}

namespace {

struct CertifiedRun {
  PrimalDualPoint z;
  double certificate;
};

CertifiedRun precise_run(const OperatorProblem& p, const ReferenceOptions& opts, std::uint64_t seed) {
  SolverConfig cfg;
  cfg.algorithm = Algorithm::SVRGAccelerated;
  cfg.refresh = RefreshRule::Heuristic;
  cfg.max_passes = opts.chunk_passes;
  cfg.checkpoint_stride = opts.chunk_passes * 2.0;
  RunHooks hooks;
  hooks.start = PrimalDualPoint(p.forward->primal_dim(), p.forward->dual_dim());
  double best = INFINITY;
  int stalled = 0;
  double spent = 0.0;
  std::uint64_t chunk = 0;
  while (spent < opts.max_passes) {
    cfg.seed = child_seed(seed, chunk++);
    SolveResult r = solve(p, cfg, hooks);
    spent += r.cost.passes();
    hooks.start = std::move(r.solution);
    const double cert = reference_certificate(p, *hooks.start);
    if (cert <= opts.target_certificate) return {*hooks.start, cert};
    if (cert < 0.5 * best) {
      best = cert;
      stalled = 0;
    } else if (++stalled >= 3) {
      break;
    }
  }
  return {*hooks.start, reference_certificate(p, *hooks.start)};
}

}  // namespace

ReferenceSolution certify_reference(const OperatorProblem& p, const ReferenceOptions& opts) {
  const CertifiedRun a = precise_run(p, opts, child_seed(opts.seed, 1));
  const CertifiedRun b = precise_run(p, opts, child_seed(opts.seed, 2));
  const double worst = std::max(a.certificate, b.certificate);
  if (!(worst <= opts.max_certificate))
    throw std::runtime_error("reference solution could not be certified (certificate " + std::to_string(worst) + ")");
  const double scale = std::sqrt(omega_sq(p.geometry, a.z));
  const double apart = std::sqrt(distance_sq(p.geometry, a.z, b.z));
  const double allowed = (std::sqrt(a.certificate) + std::sqrt(b.certificate)) * scale * (1.0 + 1e-6) + 1e-13 * scale;
  if (apart > allowed)
    throw std::runtime_error("high-precision runs with different seeds disagree beyond their certificates");
  return {a.z, a.certificate, false};
}

ReferenceSolution reference_solution(const SaddleProblem& sp, const OperatorProblem& p,
                                     const ReferenceOptions& opts) {
  if (auto z = closed_form_solution(sp)) {
    const double cert = reference_certificate(p, *z);
    if (!(cert <= opts.max_certificate))
      throw std::runtime_error("closed-form reference failed its residual certificate");
    return {std::move(*z), cert, true};
  }
  return certify_reference(p, opts);
}

}  // namespace saddle
