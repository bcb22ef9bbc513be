#include "saddle/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>

namespace saddle {

namespace {

struct DataFlags {
  std::string data;
  std::string synthetic;
  std::uint64_t data_seed = 1;
  std::string loss = "square";
  std::string reg = "l1l2";
  double lambda_scale = 1.0;
  double l1 = 1e-3;
  double cluster = 1e-4;
  std::string split = "factored";

  void attach(CLI::App& app) {
    app.add_option("--data", data, "LibSVM file");
    app.add_option("--synthetic", synthetic, "synthetic instance n,d,density,skew");
    app.add_option("--data-seed", data_seed, "seed of the synthetic generator")->capture_default_str();
    app.add_option("--loss", loss, "square or auc")->check(CLI::IsMember({"square", "auc"}))->capture_default_str();
    app.add_option("--reg", reg, "l1l2 or cluster")->check(CLI::IsMember({"l1l2", "cluster"}))->capture_default_str();
    app.add_option("--lambda-scale", lambda_scale, "lambda / lambda0")->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--l1", l1, "l1 weight of the l1l2 regularizer")->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app.add_option("--cluster", cluster, "pairwise weight of the cluster regularizer")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app.add_option("--split", split, "individual or factored")
        ->check(CLI::IsMember({"individual", "factored"}))
        ->capture_default_str();
  }

  void fill(ExperimentConfig& cfg) const {
    if (data.empty() == synthetic.empty()) throw std::invalid_argument("give exactly one of --data or --synthetic");
    if (!data.empty()) cfg.data_path = data;
    if (!synthetic.empty()) {
      cfg.synthetic = parse_synthetic(synthetic);
      cfg.synthetic->seed = data_seed;
    }
    cfg.problem.loss = loss == "square" ? LossKind::Square : LossKind::Auc;
    cfg.problem.reg = reg == "l1l2" ? Regularizer::L1L2 : Regularizer::Cluster;
    cfg.problem.lambda_scale = lambda_scale;
    cfg.problem.l1 = l1;
    cfg.problem.cluster = cluster;
    cfg.problem.split.kind = split == "individual" ? SplitKind::Individual : SplitKind::Factored;
  }
};

ProbabilityMode parse_mode(const std::string& s) {
  if (s == "uniform") return ProbabilityMode::Uniform;
  if (s == "nonuniform") return ProbabilityMode::MatrixWeighted;
  if (s == "mixture") return ProbabilityMode::Mixture;
  throw std::invalid_argument("unknown sampling '" + s + "' (uniform, nonuniform, mixture)");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

int cli_main(int argc, char** argv) { return cli_main(argc, argv, std::cout, std::cerr); }

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Variance-reduced solvers for split saddle-point problems"};
  app.require_subcommand(1);

  DataFlags run_data;
  std::vector<std::string> algos{"svrg"};
  std::vector<std::string> samplings{"nonuniform"};
  std::size_t batch = 1;
  double passes = 50;
  std::vector<std::uint64_t> seeds{0};
  std::string out_path;
  std::optional<double> acc_tau;
  std::string acc_refresh = "fixed";
  std::string saga_resample = "auto";
  std::string steps = "appendix";
  double stride = 0.25;
  std::optional<double> target_eps;
  unsigned workers = 0;
  bool snapshot = false;

  CLI::App* run = app.add_subcommand("run", "run solvers and write a CSV trace with a JSON sidecar");
  run_data.attach(*run);
  run->add_option("--algo", algos, "comma list of fb, fb-acc, fb-sto, svrg, saga, svrg-acc")
      ->delimiter(',')
      ->capture_default_str();
  run->add_option("--sampling", samplings, "comma list of uniform, nonuniform, mixture")
      ->delimiter(',')
      ->capture_default_str();
  run->add_option("--m", batch, "mini-batch size")->check(CLI::PositiveNumber)->capture_default_str();
  run->add_option("--passes", passes, "budget in effective data passes")->check(CLI::PositiveNumber)
      ->capture_default_str();
  run->add_option("--seed", seeds, "comma list of seeds")->delimiter(',')->capture_default_str();
  run->add_option("--out", out_path, "CSV output path")->required();
  run->add_option("--acc-tau", acc_tau, "acceleration parameter override")->check(CLI::NonNegativeNumber);
  run->add_option("--acc-refresh", acc_refresh, "fixed or heuristic")
      ->check(CLI::IsMember({"fixed", "heuristic"}))
      ->capture_default_str();
  run->add_option("--saga-resample", saga_resample, "on, off or auto (on for non-uniform sampling)")
      ->check(CLI::IsMember({"on", "off", "auto"}))
      ->capture_default_str();
  run->add_option("--steps", steps, "appendix or maintext step-size constants")
      ->check(CLI::IsMember({"appendix", "maintext"}))
      ->capture_default_str();
  run->add_option("--stride", stride, "checkpoint stride in passes")->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  run->add_option("--target-eps", target_eps, "stop a run once eps reaches this value")->check(CLI::PositiveNumber);
  run->add_option("--workers", workers, "concurrent runs (0: one per hardware thread)")->capture_default_str();
  run->add_flag("--snapshot-final", snapshot, "write each final iterate as a binary sidecar");

  DataFlags const_data;
  std::string const_sampling = "nonuniform";
  std::size_t const_batch = 1;
  CLI::App* constants = app.add_subcommand("constants", "print lambda0, L, Lbar, step sizes and tau");
  const_data.attach(*constants);
  constants->add_option("--sampling", const_sampling, "uniform, nonuniform or mixture")
      ->check(CLI::IsMember({"uniform", "nonuniform", "mixture"}))
      ->capture_default_str();
  constants->add_option("--m", const_batch, "mini-batch size")->check(CLI::PositiveNumber)->capture_default_str();

  CLI::App* check = app.add_subcommand("check", "run the built-in invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      ExperimentConfig cfg;
      run_data.fill(cfg);
      cfg.algorithms.clear();
      for (const auto& a : algos) cfg.algorithms.push_back(parse_algorithm(a));
      cfg.samplings.clear();
      for (const auto& s : samplings) cfg.samplings.push_back(parse_mode(s));
      cfg.batch = batch;
      cfg.passes = passes;
      cfg.seeds = seeds;
      cfg.out = out_path;
      cfg.acc_tau = acc_tau;
      cfg.acc_refresh = acc_refresh == "fixed" ? RefreshRule::Fixed : RefreshRule::Heuristic;
      if (saga_resample != "auto") cfg.saga_resample = saga_resample == "on";
      cfg.steps = steps == "appendix" ? StepRule::Appendix : StepRule::MainText;
      cfg.checkpoint_stride = stride;
      cfg.target_eps = target_eps;
      cfg.workers = workers;
      cfg.snapshot_final = snapshot;
      const ExperimentResult r = run_experiment(cfg);
      for (const auto& w : r.warnings) err << "warning: " << w << '\n';
      for (const auto& c : r.cells)
        if (!c.error.empty())
          err << to_string(c.algorithm) << '/' << to_string(c.sampling) << '/' << c.seed << ": " << c.error << '\n';
      return r.exit_code();
    }
    if (*constants) {
      ExperimentConfig cfg;
      const_data.fill(cfg);
      cfg.problem.split.mode = parse_mode(const_sampling);
      std::vector<std::string> warnings;
      const LabeledData data = load_data(cfg, &warnings);
      for (const auto& w : warnings) err << "warning: " << w << '\n';
      const BuiltProblem built = build_problem(data, cfg.problem);
      const OperatorProblem p = make_operator_problem(built.saddle);
      const SmoothnessConstants& c = p.constants;
      const double tau = p.acceleration_tau.value_or(0.0);
      out << "n " << data.K->rows() << "\nd " << data.K->cols() << "\nnnz " << data.K->nnz() << '\n'
          << "lambda0 " << fmt(built.lambda0) << "\nlambda " << fmt(built.saddle.geometry.lambda()) << "\ngamma "
          << fmt(built.saddle.geometry.gamma()) << '\n'
          << "split " << to_string(cfg.problem.split.kind) << "\nsampling " << to_string(cfg.problem.split.mode)
          << '\n'
          << "L " << fmt(c.L) << "\nLbar " << fmt(c.Lbar) << '\n'
          << "sigma_fb " << fmt(fb_step(c)) << "\nsigma_svrg " << fmt(svrg_step(c, const_batch)) << "\nsigma_saga "
          << fmt(saga_step(c, const_batch, p.forward->saga_index_count())) << '\n'
          << "svrg_inner " << svrg_inner_iterations(c, const_batch, 0.0, StepRule::Appendix) << '\n'
          << "tau " << fmt(tau) << "\nrefresh_period " << acceleration_refresh_period(tau) << '\n';
      return 0;
    }
    if (*check) {
      bool ok = true;
      for (const CheckOutcome& c : run_invariant_checks()) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
        ok = ok && c.passed;
      }
      return ok ? 0 : 1;
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n' << app.help() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace saddle
