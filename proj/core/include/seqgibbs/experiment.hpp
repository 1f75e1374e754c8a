#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace seqgibbs {

/// Invalid or inconsistent configuration (exit code 2 at the CLI).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct PotentialSpec {
  std::string type;  // locally_constant | geometric_series | renewal
  int alphabet = 2;
  // locally constant
  int depth = 1;
  std::vector<double> log_table;
  // geometric series
  double theta = 0.5;
  std::vector<double> symbol_values;
  // renewal: formula id + parameters + horizon
  std::string formula = "two_log_successive_ratio";
  double a0 = 0.0;
  double coefficient_scale = 1.0;
  double coefficient_power = 2.0;
  std::int64_t horizon = 1000000;
};

struct FactorMapSpec {
  int source = 2;
  int target = 2;
  std::vector<int> table;
};

struct ExperimentConfig {
  std::string experiment;
  PotentialSpec potential;
  std::optional<FactorMapSpec> factor_map;
  std::string measure = "equilibrium";
  std::string pushforward_of = "equilibrium";

  bool solve_K = true;
  double K = 1.0;
  bool solve_P = true;
  double P = 0.0;

  int truncation_depth = 0;  // 0 = use the family as configured

  int scan_depth = 16;       // N
  int k_max = 8;
  int tail_prefix = 16;      // L (documentation of the enclosure policy)
  int cylinder_depth = 6;    // exhaustive scans
  int prefix_count = 100;
  int path_count = 100;
  int path_length = 1000;
  int max_first_time = 64;

  double ratio_slack = 1e-9;
  double additivity_tol = 1e-10;
  double perron_tol = 1e-12;
  int max_iterations = 100000;

  std::uint64_t seed = 1;
  int jobs = 1;
  bool oracle = false;

  std::optional<std::string> expect_decay_model;  // decay-fit only
  std::string decay_source = "measured";          // measured | synthetic
  std::string synthetic_model = "geometric";      // geometric | polynomial
  double synthetic_rate = 0.5;                    // base or exponent

  static ExperimentConfig from_json_file(const std::filesystem::path& path);
  static ExperimentConfig from_json_text(const std::string& text);

  /// Canonical serialization used for the inputs digest.
  std::string canonical_text() const;
};

struct CheckRecord {
  std::string name;
  double value = 0.0;  // measured side
  double bound = 0.0;  // comparison side
  bool pass = false;
  std::string note;
};

struct Report {
  std::string experiment_id;
  std::string version;
  std::uint64_t seed = 0;
  std::string inputs_digest;
  std::vector<std::string> notes;
  std::vector<CheckRecord> checks;
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;
  std::string summary_json;  // serialized object, stable key order

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

/// Runs one subcommand. Throws ConfigError (bad config) or ConvergenceError.
Report run_experiment(const ExperimentConfig& config);

/// Writes <out>/<experiment>.csv and <out>/<experiment>.json. Byte-identical
/// across reruns with the same config and seed.
void write_report_files(const Report& report,
                        const std::filesystem::path& out_dir);

extern const char* const kVersion;

/// Subcommand names accepted by run_experiment.
const std::vector<std::string>& experiment_names();

}  // namespace seqgibbs
