// Command-line front end for the experiment registry.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qlock/errors.hpp"
#include "qlock/experiments.hpp"

namespace {

enum ExitCode { kOk = 0, kError = 1, kMismatch = 2, kUnknownExperiment = 3, kInvalidParams = 4 };

qlock::ExperimentParams load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qlock::InvalidArgument("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw qlock::InvalidArgument("config file is not valid JSON: " + std::string(e.what()));
  }
  return qlock::ExperimentParams::from_json(j);
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw qlock::Error("cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seeded entanglement-locking experiments"};
  app.require_subcommand(0, 1);

  std::string experiment;
  std::string out_path;
  std::string format = "json";
  std::string config;
  bool include_timing = false;
  std::optional<int> d, l, n, samples;
  std::optional<double> alpha, eps, tol_override;
  std::uint64_t seed = 42;

  app.add_option("--experiment", experiment, "Experiment name (see `list`)");
  app.add_option("--d", d, "Local dimension");
  app.add_option("--l", l, "Copies inside each hiding state");
  app.add_option("--n", n, "Tensor power or number of copies");
  app.add_option("--samples", samples, "Number of random instances");
  app.add_option("--alpha", alpha, "Flower amplitude or Renyi order");
  app.add_option("--eps", eps, "Mixing weight or typicality window");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed")->capture_default_str();
  app.add_option("--out", out_path, "Output file (default: stdout)");
  app.add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app.add_option("--tol-override", tol_override, "Tolerance applied to every checked row");
  app.add_option("--config", config, "JSON parameter file; flags take precedence")
      ->check(CLI::ExistingFile);
  app.add_flag("--include-timing", include_timing, "Add wall_time to JSON reports");

  auto* list = app.add_subcommand("list", "Print the experiment names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalidParams;
  }

  if (list->parsed()) {
    for (const auto& e : qlock::experiment_registry()) {
      std::cout << e.name << "\t" << e.summary << "\n";
    }
    return kOk;
  }
  if (experiment.empty()) {
    std::cerr << "error: --experiment is required (or use `list`)\n";
    return kInvalidParams;
  }

  try {
    qlock::ExperimentParams params;
    if (!config.empty()) params = load_config(config);
    qlock::ExperimentParams flags;
    flags.d = d;
    flags.l = l;
    flags.n = n;
    flags.samples = samples;
    flags.alpha = alpha;
    flags.eps = eps;
    flags.tol_override = tol_override;
    flags.seed = seed_opt->count() > 0 || config.empty() ? seed : params.seed;
    params = params.merged(flags);

    const qlock::ExperimentReport report = qlock::run_experiment(experiment, params);
    const std::string text =
        format == "csv" ? report.to_csv() : report.to_json(include_timing).dump(2) + "\n";
    write_output(text, out_path);
    if (!report.all_pass()) {
      for (const auto& row : report.rows) {
        if (!row.pass) std::cerr << "mismatch: " << row.quantity << "\n";
      }
      return kMismatch;
    }
    return kOk;
  } catch (const qlock::UnknownExperiment& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUnknownExperiment;
  } catch (const qlock::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidParams;
  } catch (const qlock::InvalidState& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidParams;
  } catch (const qlock::DimensionCapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidParams;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
}
