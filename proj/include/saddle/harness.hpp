#pragma once

#include "saddle/bilinear.hpp"
#include "saddle/metrics.hpp"
#include "saddle/problem.hpp"
#include "saddle/solvers.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace saddle {

// ---- data ----

struct LabeledData {
  std::shared_ptr<const CouplingMatrix> K;  // rows are observations
  Vector labels;
  // Held-out rows; null when there are none.
  std::shared_ptr<const CouplingMatrix> test_K;
  Vector test_labels;
};

class LibsvmError : public std::runtime_error {
 public:
  LibsvmError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// `label idx:val ...` with 1-based indices. Labels in {0, 1} become {-1, +1} and a note
// goes to `warnings`. The column count is the largest index seen, or `min_cols` if larger.
LabeledData parse_libsvm(std::istream& in, std::vector<std::string>* warnings = nullptr, Index min_cols = 0);
LabeledData load_libsvm(const std::string& path, std::vector<std::string>* warnings = nullptr);

struct SyntheticSpec {
  Index n = 100;
  Index d = 50;
  double density = 1.0;
  double skew = 0.0;  // row scales exp(skew * z), z standard normal
  std::uint64_t seed = 1;
  double label_noise = 0.1;
  bool heldout = true;  // adds n / 4 test rows
};

constexpr Index kSyntheticLimit = 10000;

// Bernoulli(density) mask times Gaussian entries, rows scaled by the skew factors,
// labels sign(K w + noise) from a planted w.
LabeledData synth_instance(const SyntheticSpec& spec);

// "n,d,density,skew"
SyntheticSpec parse_synthetic(const std::string& text);

// ---- problem assembly ----

enum class Regularizer { L1L2, Cluster };
const char* to_string(Regularizer r);

struct ProblemOptions {
  LossKind loss = LossKind::Square;
  Regularizer reg = Regularizer::L1L2;
  double lambda_scale = 1.0;
  double l1 = 1e-3;
  double cluster = 1e-4;
  SplitScheme split;
};

struct BuiltProblem {
  SaddleProblem saddle;
  double lambda0 = 0.0;  // |K|_F^2 / n^2
};

// lambda = scale * lambda0. Square loss: g(y) = (n/2)|y|^2 + b^T y with gamma = n.
// ROC loss: g(y) = y^T A^+ y / 2 with gamma = M and the primal offset K^T a.
BuiltProblem build_problem(const LabeledData& data, const ProblemOptions& opts);

double lambda_zero(const CouplingMatrix& K);

// ---- experiments ----

struct ExperimentConfig {
  std::optional<std::string> data_path;
  std::optional<SyntheticSpec> synthetic;
  ProblemOptions problem;
  std::vector<Algorithm> algorithms{Algorithm::SVRG};
  std::vector<ProbabilityMode> samplings{ProbabilityMode::MatrixWeighted};
  std::size_t batch = 1;
  double passes = 50.0;
  std::vector<std::uint64_t> seeds{0};
  std::optional<double> acc_tau;
  RefreshRule acc_refresh = RefreshRule::Fixed;
  std::optional<bool> saga_resample;
  StepRule steps = StepRule::Appendix;
  double checkpoint_stride = 0.25;
  std::optional<double> target_eps;
  unsigned workers = 0;  // 0: hardware concurrency
  std::string out;       // CSV path; empty writes nothing
  bool snapshot_final = false;
};

struct TraceRow {
  std::string algo;
  std::string sampling;
  std::uint64_t seed = 0;
  Checkpoint point;
};

struct CellOutcome {
  Algorithm algorithm;
  ProbabilityMode sampling;
  std::uint64_t seed = 0;
  bool diverged = false;
  std::string error;
  SolveResult result;
};

struct ExperimentResult {
  std::vector<CellOutcome> cells;  // (algo, sampling, seed) order
  double lambda0 = 0.0;
  double lambda = 0.0;
  double gamma = 0.0;
  ReferenceSolution reference;
  std::vector<std::string> warnings;
  bool any_diverged() const;
  int exit_code() const { return any_diverged() ? 1 : 0; }
};

LabeledData load_data(const ExperimentConfig& cfg, std::vector<std::string>* warnings);
ExperimentResult run_experiment(const ExperimentConfig& cfg);

extern const char* const kTraceHeader;
// Rows of every cell; a diverged cell ends with a marker row carrying DIVERGED in the pass column.
void write_trace_csv(std::ostream& out, const ExperimentResult& r);
// Resolved configuration, constants, per-run step sizes and versions.
std::string experiment_json(const ExperimentConfig& cfg, const ExperimentResult& r);
// uint64 d, uint64 n, then d + n little-endian float64 values (x then y).
void write_snapshot(const std::string& path, const PrimalDualPoint& z);
PrimalDualPoint read_snapshot(const std::string& path);

// ---- self checks ----

struct CheckOutcome {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<CheckOutcome> run_invariant_checks();

// ---- command line ----

// Subcommands run, constants, check. Exit codes 0 ok, 1 divergence or failed check, 2 usage.
int cli_main(int argc, char** argv);
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace saddle
