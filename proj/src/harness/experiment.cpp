#include "saddle/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

namespace saddle {

const char* to_string(Regularizer r) { return r == Regularizer::L1L2 ? "l1l2" : "cluster"; }

double lambda_zero(const CouplingMatrix& K) {
  const double n = static_cast<double>(K.rows());
  return K.frobenius_sq() / (n * n);
}

BuiltProblem build_problem(const LabeledData& data, const ProblemOptions& opts) {
  if (!data.K) throw std::invalid_argument("no data matrix");
  const CouplingMatrix& K = *data.K;
  if (data.labels.size() != K.rows()) throw DimensionError("dual", K.rows(), data.labels.size());
  if (!(opts.lambda_scale > 0.0)) throw std::invalid_argument("lambda scale must be positive");
  if (K.frobenius_sq() == 0.0) throw std::invalid_argument("data matrix is zero");

  BuiltProblem built;
  built.lambda0 = lambda_zero(K);
  const double lambda = opts.lambda_scale * built.lambda0;
  SaddleProblem& sp = built.saddle;
  sp.K = data.K;
  sp.split = opts.split;

  Vector offset;
  double gamma = 0.0;
  if (opts.loss == LossKind::Square) {
    gamma = static_cast<double>(K.rows());
    sp.dual = std::make_shared<SeparableTerm>(SeparableTerm::square_loss_conjugate(data.labels));
  } else {
    for (Index i = 0; i < data.labels.size(); ++i)
      if (data.labels[i] != 1.0 && data.labels[i] != -1.0)
        throw std::invalid_argument("ROC loss needs binary labels");
    AucLossSpec spec(data.labels);
    gamma = spec.m_const();
    offset = K.transpose_times(spec.linear_term());
    sp.dual = std::make_shared<AucDualTerm>(std::move(spec));
  }
  if (opts.reg == Regularizer::L1L2) {
    sp.primal = std::make_shared<SeparableTerm>(opts.l1, offset);
  } else {
    sp.primal = std::make_shared<ClusterTerm>(opts.cluster, offset);
  }
  sp.geometry = Geometry(lambda, gamma, K.cols(), K.rows());
  return built;
}

LabeledData load_data(const ExperimentConfig& cfg, std::vector<std::string>* warnings) {
  if (cfg.data_path && cfg.synthetic) throw std::invalid_argument("give either a data file or a synthetic spec");
  if (cfg.data_path) return load_libsvm(*cfg.data_path, warnings);
  if (cfg.synthetic) return synth_instance(*cfg.synthetic);
  throw std::invalid_argument("no data source");
}

bool ExperimentResult::any_diverged() const {
  return std::any_of(cells.begin(), cells.end(), [](const CellOutcome& c) { return c.diverged || !c.error.empty(); });
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.algorithms.empty()) throw std::invalid_argument("no algorithm selected");
  if (cfg.samplings.empty()) throw std::invalid_argument("no sampling mode selected");
  if (cfg.seeds.empty()) throw std::invalid_argument("no seed given");
  if (!(cfg.passes > 0.0)) throw std::invalid_argument("pass budget must be positive");

  ExperimentResult out;
  const LabeledData data = load_data(cfg, &out.warnings);
  const BuiltProblem built = build_problem(data, cfg.problem);
  out.lambda0 = built.lambda0;
  out.lambda = built.saddle.geometry.lambda();
  out.gamma = built.saddle.geometry.gamma();

  std::vector<OperatorProblem> problems;
  for (ProbabilityMode mode : cfg.samplings) {
    SaddleProblem sp = built.saddle;
    sp.split.mode = mode;
    problems.push_back(make_operator_problem(sp));
  }
  out.reference = reference_solution(built.saddle, problems.front());

  struct Cell {
    std::size_t problem;
    Algorithm algo;
    ProbabilityMode mode;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (Algorithm a : cfg.algorithms)
    for (std::size_t s = 0; s < cfg.samplings.size(); ++s)
      for (std::uint64_t seed : cfg.seeds) cells.push_back({s, a, cfg.samplings[s], seed});
  out.cells.resize(cells.size());

  const LossKind loss = cfg.problem.loss;
  auto run_cell = [&](std::size_t idx) {
    const Cell& cell = cells[idx];
    const OperatorProblem& p = problems[cell.problem];
    CellOutcome& o = out.cells[idx];
    o.algorithm = cell.algo;
    o.sampling = cell.mode;
    o.seed = cell.seed;

    SolverConfig sc;
    sc.algorithm = cell.algo;
    sc.batch = cfg.batch;
    sc.max_passes = cfg.passes;
    sc.checkpoint_stride = cfg.checkpoint_stride;
    sc.seed = cell.seed;
    sc.tau = cfg.acc_tau;
    sc.refresh = cfg.acc_refresh;
    sc.saga_resample = cfg.saga_resample;
    sc.steps = cfg.steps;
    sc.target_eps = cfg.target_eps;

    RunHooks hooks;
    hooks.reference = out.reference.z;
    hooks.evaluate = [&p, &data, loss](const PrimalDualPoint& z, Checkpoint& c) {
      if (p.gap) c.gap = p.gap(z);
      if (data.test_K) c.test_loss = test_metrics(z.x, *data.test_K, data.test_labels, loss).loss;
    };
    try {
      o.result = solve(p, sc, hooks);
    } catch (const DivergenceError& e) {
      o.diverged = true;
      o.error = e.what();
      o.result.trace = e.partial_trace();
    } catch (const std::exception& e) {
      o.error = e.what();
    }
  };

  unsigned workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, cells.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < cells.size(); i = next++) run_cell(i);
    });
  for (auto& t : pool) t.join();

  if (!cfg.out.empty()) {
    std::ofstream csv(cfg.out);
    if (!csv) throw std::runtime_error("cannot write " + cfg.out);
    write_trace_csv(csv, out);
    std::ofstream json(cfg.out + ".json");
    if (!json) throw std::runtime_error("cannot write " + cfg.out + ".json");
    json << experiment_json(cfg, out) << '\n';
    if (cfg.snapshot_final) {
      for (const CellOutcome& c : out.cells) {
        if (c.diverged || !c.error.empty()) continue;
        write_snapshot(cfg.out + "." + to_string(c.algorithm) + "." + to_string(c.sampling) + "." +
                           std::to_string(c.seed) + ".bin",
                       c.result.solution);
      }
    }
  }
  return out;
}

const char* const kTraceHeader = "algo,sampling,seed,pass,dist_sq,eps,gap,test_loss,wall_ms";

namespace {

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_trace_csv(std::ostream& out, const ExperimentResult& r) {
  out << kTraceHeader << '\n';
  for (const CellOutcome& c : r.cells) {
    const std::string prefix =
        std::string(to_string(c.algorithm)) + "," + to_string(c.sampling) + "," + std::to_string(c.seed) + ",";
    for (const Checkpoint& p : c.result.trace.records) {
      out << prefix << number(p.passes) << ',' << number(p.dist_sq) << ',' << number(p.eps) << ',' << number(p.gap)
          << ',' << number(p.test_loss) << ',' << number(p.wall_ms) << '\n';
    }
    if (c.diverged || !c.error.empty())
      out << prefix << (c.diverged ? "DIVERGED" : "FAILED") << ",nan,nan,nan,nan,nan\n";
  }
}

std::string experiment_json(const ExperimentConfig& cfg, const ExperimentResult& r) {
  using nlohmann::json;
  json config;
  config["data"] = cfg.data_path ? json(*cfg.data_path) : json(nullptr);
  if (cfg.synthetic) {
    const SyntheticSpec& s = *cfg.synthetic;
    config["synthetic"] = {{"n", s.n},       {"d", s.d},     {"density", s.density}, {"skew", s.skew},
                           {"seed", s.seed}, {"label_noise", s.label_noise}, {"heldout", s.heldout}};
  } else {
    config["synthetic"] = nullptr;
  }
  config["loss"] = to_string(cfg.problem.loss);
  config["reg"] = to_string(cfg.problem.reg);
  config["lambda_scale"] = cfg.problem.lambda_scale;
  config["l1"] = cfg.problem.l1;
  config["cluster"] = cfg.problem.cluster;
  config["split"] = to_string(cfg.problem.split.kind);
  json algos = json::array();
  for (Algorithm a : cfg.algorithms) algos.push_back(to_string(a));
  config["algorithms"] = algos;
  json modes = json::array();
  for (ProbabilityMode m : cfg.samplings) modes.push_back(to_string(m));
  config["samplings"] = modes;
  config["m"] = cfg.batch;
  config["passes"] = cfg.passes;
  config["seeds"] = cfg.seeds;
  config["acc_tau"] = cfg.acc_tau ? json(*cfg.acc_tau) : json(nullptr);
  config["acc_refresh"] = cfg.acc_refresh == RefreshRule::Fixed ? "fixed" : "heuristic";
  config["saga_resample"] = cfg.saga_resample ? json(*cfg.saga_resample ? "on" : "off") : json("auto");
  config["steps"] = cfg.steps == StepRule::Appendix ? "appendix" : "maintext";
  config["checkpoint_stride"] = cfg.checkpoint_stride;

  json doc;
  doc["config"] = config;
  doc["lambda0"] = r.lambda0;
  doc["lambda"] = r.lambda;
  doc["gamma"] = r.gamma;
  doc["reference"] = {{"kind", r.reference.closed_form ? "closed-form" : "high-precision"},
                      {"certificate", r.reference.certificate}};
  json runs = json::array();
  for (const CellOutcome& c : r.cells) {
    json run = {{"algo", to_string(c.algorithm)},
                {"sampling", to_string(c.sampling)},
                {"seed", c.seed},
                {"sigma", c.result.step},
                {"tau", c.result.tau},
                {"inner_iterations", c.result.inner_iterations},
                {"refresh_period", c.result.refresh_period},
                {"iterations", c.result.iterations},
                {"passes", c.result.cost.passes()},
                {"status", c.diverged ? "diverged" : (c.error.empty() ? "ok" : "failed")}};
    if (!c.error.empty()) run["error"] = c.error;
    runs.push_back(run);
  }
  doc["runs"] = runs;
  doc["warnings"] = r.warnings;
  doc["versions"] = {{"saddle", "0.1.0"},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"compiler", __VERSION__}};
  return doc.dump(2);
}

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("truncated snapshot");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

double get_f64(std::istream& in) {
  const std::uint64_t bits = get_u64(in);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void write_snapshot(const std::string& path, const PrimalDualPoint& z) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  put_u64(out, static_cast<std::uint64_t>(z.x.size()));
  put_u64(out, static_cast<std::uint64_t>(z.y.size()));
  for (Index i = 0; i < z.x.size(); ++i) put_f64(out, z.x[i]);
  for (Index i = 0; i < z.y.size(); ++i) put_f64(out, z.y[i]);
}

PrimalDualPoint read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  const auto d = get_u64(in);
  const auto n = get_u64(in);
  PrimalDualPoint z(static_cast<Index>(d), static_cast<Index>(n));
  for (Index i = 0; i < z.x.size(); ++i) z.x[i] = get_f64(in);
  for (Index i = 0; i < z.y.size(); ++i) z.y[i] = get_f64(in);
  return z;
}

}  // namespace saddle
