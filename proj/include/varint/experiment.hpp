#pragma once

// Experiment configuration, single runs with their output bundle, suites and
// the BEA order study. Numeric settings stay textual until the run's
// precision context is known, so extended runs parse them at full precision.

#include "varint/errors.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace varint {

class ExperimentConfig {
 public:
  /// All keys with their defaults.
  ExperimentConfig();

  /// ConfigError for unknown keys.
  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;
  /// Applies "key=value".
  void assign(const std::string& assignment);

  static const std::vector<std::string>& keys();

 private:
  std::map<std::string, std::string> values_;
};

/// Flat key=value file; blank lines and lines starting with '#' are skipped.
ExperimentConfig load_config_file(const std::string& path);

/// Resolves names and checks every numeric setting. Throws ConfigError.
void validate_config(const ExperimentConfig& cfg);

const std::vector<std::string>& problem_names();
const std::vector<std::string>& integrator_names();
const std::vector<std::string>& suite_names();

using Summary = std::vector<std::pair<std::string, std::string>>;

struct RunOutcome {
  bool complete = false;  // trajectory reached T_final
  bool met_tolerance = false;  // complete and every step residual <= tol
  std::optional<ErrorCode> error;
  std::string diagnosis;
  Summary summary;
  int dim = 0;
  std::vector<double> t;
  std::vector<double> E;
  std::vector<std::vector<double>> q;
  std::vector<std::vector<double>> p;

  std::optional<std::string> find(const std::string& key) const;
};

/// Runs the configured integrator and its diagnostics. With a non-empty
/// `output` setting, writes trajectory.csv, energy_error.csv, traj_error.csv,
/// stats.csv, summary.txt and plot.py into that directory.
/// Config problems throw ConfigError; numerical failures are reported in the
/// outcome together with the partial trajectory.
RunOutcome run_experiment(const ExperimentConfig& cfg);

struct SuiteMember {
  std::string name;
  RunOutcome outcome;
  std::string failure;  // config failure of the member, if any
  bool ok() const { return failure.empty() && outcome.met_tolerance; }
};

struct SuiteOutcome {
  std::vector<SuiteMember> members;
  int failed = 0;
};

/// Runs every member of a registered suite under `output_root/<member>` with
/// up to `workers` concurrent runs and writes `output_root/comparison.csv`.
/// `overrides` ("key=value") apply to every member after the suite settings.
SuiteOutcome run_suite(const std::string& name, const std::string& output_root, int workers,
                       const std::vector<std::string>& overrides);

struct BeaOutcome {
  std::vector<double> delta_a;
  std::vector<double> residual_off;
  std::vector<double> residual_on;
  double slope_off = 0;
  double slope_on = 0;
  double slope_E_off = 0;
  double slope_E_on = 0;
  double psi_ratio_off = 0;
};

/// Residual order study for a 1-DOF problem (keys problem, k, m, q0,
/// profile_c, bea_steps, bea_window, bea_reltol, bea_abstol, digits). Writes
/// bea.csv into `output` when set.
BeaOutcome run_bea(const ExperimentConfig& cfg);

}  // namespace varint
