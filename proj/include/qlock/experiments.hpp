#pragma once

// Named, seeded experiments producing flat reports. Each report row holds a
// computed value and, when one exists, a reference value with its absolute
// error and the check applied to it.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qlock {

struct ExperimentParams {
  std::optional<int> d;
  std::optional<int> l;
  std::optional<int> n;
  std::optional<int> samples;
  std::optional<double> alpha;
  std::optional<double> eps;
  std::optional<double> tol_override;
  std::uint64_t seed = 42;

  /// Keys: d, l, n, samples, alpha, eps, tol_override, seed. Unknown keys or
  /// wrong types throw InvalidArgument.
  static ExperimentParams from_json(const nlohmann::json& j);

  /// Fields set in `overrides` replace ours; the seed is always taken from it.
  ExperimentParams merged(const ExperimentParams& overrides) const;
};

enum class CheckKind { kData, kEqual, kAtMost, kAtLeast };

std::string to_string(CheckKind kind);

struct ReportRow {
  std::string quantity;
  double value = 0.0;
  std::optional<double> reference;
  std::optional<double> abs_err;
  CheckKind check = CheckKind::kData;
  std::optional<double> tolerance;
  bool pass = true;
};

struct ExperimentReport {
  std::string experiment;
  nlohmann::json params = nlohmann::json::object();  // effective parameters
  std::vector<ReportRow> rows;
  std::uint64_t seed = 42;
  double wall_time = 0.0;  // seconds

  /// Adds a row without a reference.
  void data(std::string quantity, double value);
  /// Adds a row with a reference; abs_err = |value - reference| and the pass
  /// flag follows `check` with the given tolerance.
  void check(std::string quantity, double value, double reference, CheckKind check,
             double tolerance);

  bool all_pass() const;
  /// Replaces the tolerance of every checked row and re-evaluates pass flags.
  void override_tolerance(double tolerance);

  nlohmann::json to_json(bool include_timing = false) const;
  /// Columns: experiment, param_json, quantity, value, reference, abs_err, seed.
  std::string to_csv(bool header = true) const;
};

struct ExperimentInfo {
  std::string name;
  std::string summary;
  std::function<ExperimentReport(const ExperimentParams&)> run;
};

const std::vector<ExperimentInfo>& experiment_registry();

/// Runs a registered experiment. Throws UnknownExperiment for unknown names
/// and InvalidArgument for invalid parameters.
ExperimentReport run_experiment(const std::string& name, const ExperimentParams& params);

}  // namespace qlock
