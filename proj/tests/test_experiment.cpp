#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "seqgibbs/experiment.hpp"

using namespace seqgibbs;

namespace {

const char* kLumpableScan = R"({
  "experiment": "lambda-scan",
  "potential": {"type": "locally_constant", "alphabet": 3, "depth": 2,
    "log_table": [-1.6094379124341003, -1.2039728043259361, -0.6931471805599453,
                  -0.916290731874155, -2.302585092994046, -0.6931471805599453,
                  -1.2039728043259361, -1.2039728043259361, -0.916290731874155]},
  "factor_map": {"source": 3, "target": 2, "table": [0, 0, 1]},
  "measure": "equilibrium",
  "constants": {"K": "solve", "P": "solve"},
  "scan": {"k_max": 4, "prefix_count": 8},
  "seed": 3
})";

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("configuration validation") {
  CHECK_THROWS_AS(ExperimentConfig::from_json_text("{not json"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text("{}"), ConfigError);
  CHECK_THROWS_AS(
      ExperimentConfig::from_json_text(
          R"({"experiment": "no-such", "potential": {"type": "renewal"}})"),
      ConfigError);
  CHECK_THROWS_AS(
      ExperimentConfig::from_json_text(
          R"({"experiment": "pressure",
              "potential": {"type": "locally_constant", "alphabet": 2,
                            "depth": 1, "log_table": [0.0]}})"),
      ConfigError);
  CHECK_THROWS_AS(
      ExperimentConfig::from_json_text(
          R"({"experiment": "pressure",
              "potential": {"type": "locally_constant", "alphabet": 2,
                            "depth": 1, "log_table": [0.0, 0.0]},
              "constants": {"K": 0.5}})"),
      ConfigError);

  const ExperimentConfig cfg = ExperimentConfig::from_json_text(kLumpableScan);
  CHECK(cfg.experiment == "lambda-scan");
  CHECK(cfg.solve_K);
  CHECK(cfg.k_max == 4);
  CHECK(cfg.factor_map.has_value());
}

TEST_CASE("missing factor map is a configuration error") {
  ExperimentConfig cfg = ExperimentConfig::from_json_text(kLumpableScan);
  cfg.factor_map.reset();
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}

TEST_CASE("reports carry both sides of every failed inequality") {
  ExperimentConfig cfg = ExperimentConfig::from_json_text(kLumpableScan);
  const Report r = run_experiment(cfg);
  CHECK(r.all_pass());
  for (const CheckRecord& c : r.checks) {
    CHECK_FALSE(c.name.empty());
    // value/bound are always populated so a failure is self-describing
    CHECK(std::isfinite(c.value));
  }
  CHECK(r.experiment_id == "lambda-scan");
  CHECK_FALSE(r.inputs_digest.empty());
}

TEST_CASE("report files are deterministic and well-formed") {
  const auto dir = std::filesystem::temp_directory_path() / "seqgibbs_exp_test";
  std::filesystem::remove_all(dir);
  ExperimentConfig cfg = ExperimentConfig::from_json_text(kLumpableScan);

  const Report r1 = run_experiment(cfg);
  write_report_files(r1, dir / "a");
  cfg.jobs = 4;
  const Report r2 = run_experiment(cfg);
  write_report_files(r2, dir / "b");

  const std::string csv_a = slurp(dir / "a" / "lambda-scan.csv");
  const std::string csv_b = slurp(dir / "b" / "lambda-scan.csv");
  CHECK(csv_a == csv_b);
  CHECK(slurp(dir / "a" / "lambda-scan.json") ==
        slurp(dir / "b" / "lambda-scan.json"));

  // pinned header contract
  CHECK(csv_a.rfind(
            "z,k,n_k,min_u,max_u,lambda,pass_nesting,pass_monotone,pass_recursion",
            0) == 0);
  // LF endings only
  CHECK(csv_a.find('\r') == std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("empty reports still emit valid files") {
  const auto dir = std::filesystem::temp_directory_path() / "seqgibbs_empty";
  std::filesystem::remove_all(dir);
  Report r;
  r.experiment_id = "pressure";
  r.version = kVersion;
  r.csv_header = {"n", "P_n", "reference", "abs_gap"};
  write_report_files(r, dir);
  CHECK(slurp(dir / "pressure.csv") == "n,P_n,reference,abs_gap\n");
  const std::string json = slurp(dir / "pressure.json");
  CHECK(json.find("\"all_pass\": true") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("seed changes the sampled content") {
  ExperimentConfig cfg = ExperimentConfig::from_json_text(kLumpableScan);
  const Report r1 = run_experiment(cfg);
  cfg.seed = 4;
  const Report r2 = run_experiment(cfg);
  CHECK(r1.csv_rows != r2.csv_rows);
}
