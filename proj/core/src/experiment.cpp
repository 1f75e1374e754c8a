#include "seqgibbs/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "seqgibbs/factor_image.hpp"
#include "seqgibbs/gibbs.hpp"
#include "seqgibbs/measure.hpp"
#include "seqgibbs/numerics.hpp"
#include "seqgibbs/potential.hpp"
#include "seqgibbs/transfer.hpp"

namespace seqgibbs {

using ordered_json = nlohmann::ordered_json;

const char* const kVersion = "0.1.0";

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "pressure",  "conformal", "gibbs-check", "gibbs-times",
      "weak-gibbs", "hofbauer",  "pushforward", "psi2",
      "lambda-scan", "image-gibbs", "decay-fit", "mc-growth"};
  return names;
}

namespace {

std::size_t pow_size(int base, int exp) {
  std::size_t out = 1;
  for (int i = 0; i < exp; ++i) out *= static_cast<std::size_t>(base);
  return out;
}

double require_number(const ordered_json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_number())
    throw ConfigError("missing numeric field '" + key + "'");
  return j[key].get<double>();
}

// ---------------------------------------------------------------------------
// Configuration parsing
// ---------------------------------------------------------------------------

PotentialSpec parse_potential(const ordered_json& j) {
  PotentialSpec spec;
  if (!j.contains("type") || !j["type"].is_string())
    throw ConfigError("potential.type must be a string");
  spec.type = j["type"].get<std::string>();
  if (spec.type == "locally_constant") {
    spec.alphabet = static_cast<int>(require_number(j, "alphabet"));
    spec.depth = static_cast<int>(require_number(j, "depth"));
    if (!j.contains("log_table") || !j["log_table"].is_array())
      throw ConfigError("locally_constant potential needs log_table");
    for (const auto& v : j["log_table"]) {
      if (!v.is_number()) throw ConfigError("log_table entries must be numbers");
      spec.log_table.push_back(v.get<double>());
    }
    if (spec.alphabet < 2 || spec.depth < 1 ||
        spec.log_table.size() != pow_size(spec.alphabet, spec.depth))
      throw ConfigError("log_table must have alphabet^depth entries");
  } else if (spec.type == "geometric_series") {
    spec.alphabet = static_cast<int>(require_number(j, "alphabet"));
    spec.theta = require_number(j, "theta");
    if (!j.contains("symbol_values") || !j["symbol_values"].is_array())
      throw ConfigError("geometric_series potential needs symbol_values");
    for (const auto& v : j["symbol_values"]) {
      if (!v.is_number())
        throw ConfigError("symbol_values entries must be numbers");
      spec.symbol_values.push_back(v.get<double>());
    }
    if (spec.alphabet < 2 ||
        spec.symbol_values.size() != static_cast<std::size_t>(spec.alphabet))
      throw ConfigError("symbol_values must have one entry per symbol");
  } else if (spec.type == "renewal") {
    spec.alphabet = 2;
    if (j.contains("formula")) spec.formula = j["formula"].get<std::string>();
    if (j.contains("a0")) spec.a0 = require_number(j, "a0");
    if (j.contains("scale")) spec.coefficient_scale = require_number(j, "scale");
    if (j.contains("power")) spec.coefficient_power = require_number(j, "power");
    if (j.contains("horizon"))
      spec.horizon = static_cast<std::int64_t>(require_number(j, "horizon"));
  } else {
    throw ConfigError("unknown potential type '" + spec.type + "'");
  }
  return spec;
}

Potential build_potential(const PotentialSpec& spec) {
  if (spec.type == "locally_constant") {
    if (spec.alphabet < 2) throw ConfigError("alphabet size must be >= 2");
    if (spec.depth < 1) throw ConfigError("depth must be >= 1");
    if (spec.log_table.size() != pow_size(spec.alphabet, spec.depth))
      throw ConfigError("log_table must have alphabet^depth entries");
    return Potential::locally_constant(Alphabet(spec.alphabet), spec.depth,
                                       spec.log_table);
  }
  if (spec.type == "geometric_series") {
    if (spec.alphabet < 2) throw ConfigError("alphabet size must be >= 2");
    if (!(spec.theta > 0.0 && spec.theta < 1.0))
      throw ConfigError("theta must lie strictly inside (0,1)");
    if (spec.symbol_values.size() != static_cast<std::size_t>(spec.alphabet))
      throw ConfigError("symbol_values must have one entry per symbol");
    return Potential::geometric_series(Alphabet(spec.alphabet), spec.theta,
                                       spec.symbol_values);
  }
  if (spec.type == "renewal") {
    if (spec.horizon < 16) throw ConfigError("renewal horizon must be >= 16");
    std::function<double(std::int64_t)> coeff;
    const double a0 = spec.a0;
    const double c = spec.coefficient_scale;
    const double p = spec.coefficient_power;
    if (spec.formula == "two_log_successive_ratio") {
      coeff = [a0](std::int64_t k) {
        if (k == 0) return a0;
        return 2.0 * std::log(static_cast<double>(k + 1) /
                              static_cast<double>(k + 2));
      };
    } else if (spec.formula == "power_law") {
      coeff = [a0, c, p](std::int64_t k) {
        if (k == 0) return a0;
        return c * std::pow(static_cast<double>(k + 1), -p);
      };
    } else if (spec.formula == "geometric_decay") {
      coeff = [a0, c, p](std::int64_t k) {
        if (k == 0) return a0;
        return c * std::pow(p, static_cast<double>(k));
      };
    } else {
      throw ConfigError("unknown renewal formula '" + spec.formula + "'");
    }
    return Potential::renewal(coeff, spec.horizon);
  }
  throw ConfigError("unknown potential type '" + spec.type + "'");
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  if (!j.contains("experiment") || !j["experiment"].is_string())
    throw ConfigError("configuration needs an 'experiment' string");
  cfg.experiment = j["experiment"].get<std::string>();
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), cfg.experiment) == names.end())
    throw ConfigError("unknown experiment '" + cfg.experiment + "'");

  if (!j.contains("potential"))
    throw ConfigError("configuration needs a 'potential' object");
  cfg.potential = parse_potential(j["potential"]);

  if (j.contains("factor_map")) {
    const auto& f = j["factor_map"];
    FactorMapSpec fm;
    fm.source = static_cast<int>(require_number(f, "source"));
    fm.target = static_cast<int>(require_number(f, "target"));
    if (!f.contains("table") || !f["table"].is_array())
      throw ConfigError("factor_map.table must be an array");
    for (const auto& v : f["table"]) fm.table.push_back(v.get<int>());
    cfg.factor_map = fm;
  }

  if (j.contains("measure")) cfg.measure = j["measure"].get<std::string>();
  if (cfg.measure != "conformal" && cfg.measure != "equilibrium" &&
      cfg.measure != "pushforward" && cfg.measure != "empirical")
    throw ConfigError("unknown measure kind '" + cfg.measure + "'");
  if (j.contains("pushforward_of"))
    cfg.pushforward_of = j["pushforward_of"].get<std::string>();

  if (j.contains("constants")) {
    const auto& c = j["constants"];
    if (c.contains("K")) {
      if (c["K"].is_string() && c["K"].get<std::string>() == "solve") {
        cfg.solve_K = true;
      } else if (c["K"].is_number()) {
        cfg.solve_K = false;
        cfg.K = c["K"].get<double>();
        if (cfg.K < 1.0) throw ConfigError("constants.K must be >= 1");
      } else {
        throw ConfigError("constants.K must be a number or \"solve\"");
      }
    }
    if (c.contains("P")) {
      if (c["P"].is_string() && c["P"].get<std::string>() == "solve") {
        cfg.solve_P = true;
      } else if (c["P"].is_number()) {
        cfg.solve_P = false;
        cfg.P = c["P"].get<double>();
      } else {
        throw ConfigError("constants.P must be a number or \"solve\"");
      }
    }
  }

  if (j.contains("truncation_depth"))
    cfg.truncation_depth = static_cast<int>(require_number(j, "truncation_depth"));

  if (j.contains("scan")) {
    const auto& s = j["scan"];
    const auto geti = [&](const char* key, int fallback) {
      return s.contains(key) ? static_cast<int>(require_number(s, key)) : fallback;
    };
    cfg.scan_depth = geti("N", cfg.scan_depth);
    cfg.k_max = geti("k_max", cfg.k_max);
    cfg.tail_prefix = geti("tail_prefix", cfg.tail_prefix);
    cfg.cylinder_depth = geti("depth", cfg.cylinder_depth);
    cfg.prefix_count = geti("prefix_count", cfg.prefix_count);
    cfg.path_count = geti("path_count", cfg.path_count);
    cfg.path_length = geti("path_length", cfg.path_length);
    cfg.max_first_time = geti("max_first_time", cfg.max_first_time);
  }
  if (cfg.scan_depth < 1 || cfg.k_max < 1 || cfg.cylinder_depth < 1 ||
      cfg.prefix_count < 1 || cfg.path_count < 1 || cfg.path_length < 1 ||
      cfg.max_first_time < 1)
    throw ConfigError("scan parameters must be positive");

  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    if (t.contains("ratio_slack")) cfg.ratio_slack = require_number(t, "ratio_slack");
    if (t.contains("additivity")) cfg.additivity_tol = require_number(t, "additivity");
    if (t.contains("perron_tol")) cfg.perron_tol = require_number(t, "perron_tol");
    if (t.contains("max_iterations"))
      cfg.max_iterations = static_cast<int>(require_number(t, "max_iterations"));
  }
  if (cfg.ratio_slack <= 0.0 || cfg.additivity_tol <= 0.0 || cfg.perron_tol <= 0.0)
    throw ConfigError("tolerances must be positive");

  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("jobs")) cfg.jobs = static_cast<int>(require_number(j, "jobs"));
  if (cfg.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (j.contains("oracle")) cfg.oracle = j["oracle"].get<bool>();

  if (j.contains("decay")) {
    const auto& d = j["decay"];
    if (d.contains("source")) cfg.decay_source = d["source"].get<std::string>();
    if (d.contains("model")) cfg.synthetic_model = d["model"].get<std::string>();
    if (d.contains("rate")) cfg.synthetic_rate = require_number(d, "rate");
    if (d.contains("expect_model"))
      cfg.expect_decay_model = d["expect_model"].get<std::string>();
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

std::string ExperimentConfig::canonical_text() const {
  ordered_json j;
  j["experiment"] = experiment;
  j["potential"] = {{"type", potential.type},
                    {"alphabet", potential.alphabet},
                    {"depth", potential.depth},
                    {"log_table", potential.log_table},
                    {"theta", potential.theta},
                    {"symbol_values", potential.symbol_values},
                    {"formula", potential.formula},
                    {"a0", potential.a0},
                    {"scale", potential.coefficient_scale},
                    {"power", potential.coefficient_power},
                    {"horizon", potential.horizon}};
  if (factor_map)
    j["factor_map"] = {{"source", factor_map->source},
                       {"target", factor_map->target},
                       {"table", factor_map->table}};
  j["measure"] = measure;
  j["pushforward_of"] = pushforward_of;
  j["constants"] = {{"solve_K", solve_K}, {"K", K}, {"solve_P", solve_P}, {"P", P}};
  j["truncation_depth"] = truncation_depth;
  j["scan"] = {{"N", scan_depth},
               {"k_max", k_max},
               {"tail_prefix", tail_prefix},
               {"depth", cylinder_depth},
               {"prefix_count", prefix_count},
               {"path_count", path_count},
               {"path_length", path_length},
               {"max_first_time", max_first_time}};
  j["tolerances"] = {{"ratio_slack", ratio_slack},
                     {"additivity", additivity_tol},
                     {"perron_tol", perron_tol},
                     {"max_iterations", max_iterations}};
  j["seed"] = seed;
  j["oracle"] = oracle;
  j["decay"] = {{"source", decay_source},
                {"model", synthetic_model},
                {"rate", synthetic_rate},
                {"expect_model", expect_decay_model ? *expect_decay_model : ""}};
  return j.dump();
}

// ---------------------------------------------------------------------------
// Fixture assembly shared by the runners
// ---------------------------------------------------------------------------

namespace {

struct Fixture {
  Potential raw;        // the configured family
  Potential effective;  // locally constant route (truncated when needed)
  double truncation_error = 0.0;
  TransferMatrix transfer;
  PerronData perron;
  CylinderMeasure mu;   // the configured measure, on the source shift
  std::optional<FactorMap> pi;
  double P = 0.0;
  double K = 1.0;
};

FactorMap build_factor(const ExperimentConfig& cfg) {
  if (!cfg.factor_map) throw ConfigError("this experiment needs a factor_map");
  const FactorMapSpec& fm = *cfg.factor_map;
  if (fm.source < 2 || fm.target < 2)
    throw ConfigError("factor alphabets must have size >= 2");
  if (fm.source != cfg.potential.alphabet &&
      cfg.potential.type != "renewal")
    throw ConfigError("factor source alphabet must match the potential");
  try {
    return FactorMap(Alphabet(fm.source), Alphabet(fm.target), fm.table);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid factor map: ") + e.what());
  }
}

double solve_minimal_K(const CylinderMeasure& mu, const Potential& psi,
                       double pressure, int window_len) {
  // The worst ratio of a locally constant fixture appears within windows of
  // depth + 1 symbols. Words carry depth - 1 extra symbols so every Birkhoff
  // term stays word-determined and the ratios are exact point values.
  const Alphabet a = psi.alphabet();
  const TailSpec tail = TailSpec::zeros(a);
  const int margin =
      psi.kind() == Potential::Kind::locally_constant ? psi.depth() - 1 : 0;
  const int scan_len = window_len + margin;
  const std::size_t words = pow_size(a.size(), scan_len);
  double k = 1.0;
  std::vector<int> syms(static_cast<std::size_t>(scan_len));
  for (std::size_t widx = 0; widx < words; ++widx) {
    std::size_t rem = widx;
    for (std::size_t i = syms.size(); i-- > 0;) {
      syms[i] = static_cast<int>(rem % static_cast<std::size_t>(a.size()));
      rem /= static_cast<std::size_t>(a.size());
    }
    const Word w(a, syms);
    for (int n = 1; n <= window_len; ++n)
      k = std::max(k, minimal_gibbs_constant(mu, psi, pressure, w, tail, n));
  }
  return k;
}

Fixture make_fixture(const ExperimentConfig& cfg) {
  Potential raw = build_potential(cfg.potential);
  TruncationResult trunc =
      cfg.truncation_depth > 0
          ? truncate_potential(raw, cfg.truncation_depth)
          : (raw.kind() == Potential::Kind::locally_constant
                 ? TruncationResult{raw, 0.0}
                 : truncate_potential(raw, 8));
  TransferMatrix transfer = build_transfer(trunc.truncated);
  PerronData perron = solve_perron(transfer, cfg.perron_tol, cfg.max_iterations);

  std::optional<FactorMap> pi;
  if (cfg.factor_map) pi = build_factor(cfg);

  const double P = cfg.solve_P ? perron.pressure : cfg.P;

  CylinderMeasure base = cfg.pushforward_of == "conformal"
                             ? CylinderMeasure::conformal(transfer, perron)
                             : CylinderMeasure::equilibrium(transfer, perron);
  CylinderMeasure mu = [&]() -> CylinderMeasure {
    if (cfg.measure == "conformal")
      return CylinderMeasure::conformal(transfer, perron);
    if (cfg.measure == "equilibrium")
      return CylinderMeasure::equilibrium(transfer, perron);
    if (cfg.measure == "pushforward") {
      if (!pi) throw ConfigError("pushforward measure needs a factor_map");
      return CylinderMeasure::pushforward(base, *pi, cfg.oracle);
    }
    // empirical
    std::vector<Word> samples;
    samples.reserve(static_cast<std::size_t>(cfg.path_count));
    for (int i = 0; i < cfg.path_count; ++i)
      samples.push_back(sample_path(transfer, perron, cfg.path_length,
                                    derive_seed(cfg.seed, static_cast<std::uint64_t>(i))));
    return CylinderMeasure::empirical(samples, cfg.scan_depth + 2);
  }();

  double K = cfg.K;
  if (cfg.solve_K) {
    // Eq. (1)'s constant belongs to the source measure; derived measures
    // (push-forward, empirical) inherit the constant of their base.
    const CylinderMeasure& source_measure =
        (cfg.measure == "conformal" || cfg.measure == "equilibrium") ? mu : base;
    const int scan_len = std::min(trunc.truncated.depth() + 2, 14);
    K = solve_minimal_K(source_measure, trunc.truncated, P, scan_len) *
        (1.0 + 1e-9);
  }

  return Fixture{std::move(raw),     trunc.truncated, trunc.error,
                 std::move(transfer), std::move(perron), std::move(mu),
                 std::move(pi),       P,               K};
}

// ---------------------------------------------------------------------------
// Report building helpers
// ---------------------------------------------------------------------------

void add_check(Report& r, const std::string& name, double value, double bound,
               bool pass, const std::string& note = "") {
  r.checks.push_back({name, value, bound, pass, note});
}

ordered_json fixture_summary(const ExperimentConfig& cfg, const Fixture& f) {
  ordered_json j;
  j["potential_type"] = cfg.potential.type;
  j["alphabet"] = f.effective.alphabet().size();
  j["effective_depth"] = f.effective.depth();
  ordered_json table = ordered_json::array();
  for (double v : f.effective.table()) table.push_back(format_double(v));
  j["effective_log_table"] = table;
  j["truncation_error"] = format_double(f.truncation_error);
  j["lambda"] = format_double(f.perron.lambda);
  j["pressure"] = format_double(f.perron.pressure);
  j["P"] = format_double(f.P);
  j["K"] = format_double(f.K);
  j["perron_iterations"] = f.perron.iterations;
  j["perron_residual"] = format_double(f.perron.residual);
  j["measure"] = cfg.measure;
  return j;
}

Word target_prefix_from_path(const Fixture& f, int length, std::uint64_t seed) {
  const Word path = sample_path(f.transfer, f.perron, length, seed);
  if (f.pi) return apply_factor(*f.pi, path);
  return path;
}

// ---------------------------------------------------------------------------
// Runners
// ---------------------------------------------------------------------------

Report run_pressure(const ExperimentConfig& cfg, const Fixture& f) {
  Report r;
  const int n_max = cfg.scan_depth;
  const std::vector<double> profile = pressure_profile(f.raw, n_max);
  const double reference = f.perron.pressure;
  r.csv_header = {"n", "P_n", "reference", "abs_gap"};
  for (int n = 1; n <= n_max; ++n) {
    const double pn = profile[static_cast<std::size_t>(n - 1)];
    r.csv_rows.push_back({std::to_string(n), format_double(pn),
                          format_double(reference),
                          format_double(std::abs(pn - reference))});
  }
  const double first_gap = std::abs(profile.front() - reference);
  const double last_gap = std::abs(profile.back() - reference);
  add_check(r, "pressure_residual_nonincreasing", last_gap,
            first_gap + cfg.ratio_slack, last_gap <= first_gap + cfg.ratio_slack,
            "gap at N versus gap at 1");

  ordered_json s = fixture_summary(cfg, f);
  s["P_N"] = format_double(profile.back());
  s["reference"] = format_double(reference);
  r.summary_json = s.dump();
  return r;
}

Report run_conformal(const ExperimentConfig& cfg, const Fixture& f) {
  Report r;
  const CylinderMeasure nu = CylinderMeasure::conformal(f.transfer, f.perron);
  const CylinderMeasure mu = CylinderMeasure::equilibrium(f.transfer, f.perron);
  const Alphabet a = f.effective.alphabet();
  r.csv_header = {"word", "conformal_mass", "equilibrium_mass",
                  "conformal_additivity_gap", "equilibrium_additivity_gap"};
  double worst_gap = 0.0;
  std::vector<int> syms;
  for (int d = 1; d <= cfg.cylinder_depth; ++d) {
    const std::size_t words = pow_size(a.size(), d);
    syms.assign(static_cast<std::size_t>(d), 0);
    for (std::size_t widx = 0; widx < words; ++widx) {
      std::size_t rem = widx;
      for (std::size_t i = syms.size(); i-- > 0;) {
        syms[i] = static_cast<int>(rem % static_cast<std::size_t>(a.size()));
        rem /= static_cast<std::size_t>(a.size());
      }
      const Word w(a, syms);
      const double g1 = additivity_gap(nu, w);
      const double g2 = additivity_gap(mu, w);
      worst_gap = std::max({worst_gap, g1, g2});
      r.csv_rows.push_back({w.display(), format_double(nu.mass(w)),
                            format_double(mu.mass(w)), format_double(g1),
                            format_double(g2)});
    }
  }
  add_check(r, "additivity", worst_gap, nu.additivity_tolerance(),
            worst_gap <= nu.additivity_tolerance());
  add_check(r, "perron_residual", f.perron.residual, cfg.perron_tol,
            f.perron.residual <= cfg.perron_tol);

  ordered_json s = fixture_summary(cfg, f);
  ordered_json ell = ordered_json::array(), h = ordered_json::array();
  for (double v : f.perron.conformal) ell.push_back(format_double(v));
  for (double v : f.perron.density) h.push_back(format_double(v));
  s["conformal_context_masses"] = ell;
  s["density"] = h;
  r.summary_json = s.dump();
  return r;
}

Report run_gibbs_check(const ExperimentConfig& cfg, const Fixture& f) {
  Report r;
  r.csv_header = {"point", "n", "j", "log_ratio", "radius", "within_K"};
  const TailSpec tail = TailSpec::zeros(f.effective.alphabet());
  const double log_k = std::log(f.K);
  double worst = 0.0;
  const int margin = f.effective.depth();
  for (int p = 0; p < cfg.path_count; ++p) {
    const Word x = sample_path(f.transfer, f.perron, cfg.scan_depth + margin,
                               derive_seed(cfg.seed, static_cast<std::uint64_t>(p)));
    for (int n = 1; n <= cfg.scan_depth; ++n) {
      for (int j = 0; j < n; ++j) {
        const GibbsRatio g = gibbs_log_ratio(f.mu, f.effective, f.P, x, tail, n, j);
        const bool within = std::abs(g.log_ratio) + g.radius <= log_k + cfg.ratio_slack;
        worst = std::max(worst, std::abs(g.log_ratio) + g.radius);
        r.csv_rows.push_back({std::to_string(p), std::to_string(n),
                              std::to_string(j), format_double(g.log_ratio),
                              format_double(g.radius), within ? "1" : "0"});
      }
    }
  }
  add_check(r, "all_ratios_within_K", worst, log_k + cfg.ratio_slack,
            worst <= log_k + cfg.ratio_slack, "max |log ratio| + radius");
  ordered_json s = fixture_summary(cfg, f);
  s["max_abs_log_ratio"] = format_double(worst);
  r.summary_json = s.dump();
  return r;
}

Report run_gibbs_times(const ExperimentConfig& cfg, const Fixture& f) {
  Report r;
  r.notes.push_back(
      "non-lacunarity is reported as the consecutive-ratio profile with the "
      "limit-1 reading; the ratio-limit-0 phrasing is impossible for "
      "increasing integer sequences");
  r.csv_header = {"point", "n", "is_gibbs_time", "minimal_K"};
  const TailSpec tail = TailSpec::zeros(f.effective.alphabet());
  const int margin = f.effective.depth();
  bool all_consistent = true;
  ordered_json points = ordered_json::array();
  for (int p = 0; p < cfg.path_count; ++p) {
    const Word x = sample_path(f.transfer, f.perron, cfg.scan_depth + margin,
                               derive_seed(cfg.seed, static_cast<std::uint64_t>(p)));
    const GibbsCertificate cert = scan_gibbs_times(
        f.mu, f.effective, f.P, f.K, x, tail, cfg.scan_depth, cfg.ratio_slack);
    const bool consistent =
        check_shift_consistency(f.mu, f.effective, cert, cfg.ratio_slack);
    all_consistent = all_consistent && consistent;
    for (int n = 1; n <= cfg.scan_depth; ++n) {
      const bool member =
          std::binary_search(cert.times.begin(), cert.times.end(), n);
      r.csv_rows.push_back(
          {std::to_string(p), std::to_string(n), member ? "1" : "0",
           format_double(minimal_gibbs_constant(f.mu, f.effective, f.P, x, tail, n))});
    }
    ordered_json pj;
    pj["point"] = p;
    pj["times"] = cert.times;
    ordered_json ratios = ordered_json::array();
    for (double v : nonlacunarity_profile(cert)) ratios.push_back(format_double(v));
    pj["nonlacunarity_ratios"] = ratios;
    pj["shift_consistent"] = consistent;
    points.push_back(pj);
  }
  add_check(r, "shift_consistency", all_consistent ? 1.0 : 0.0, 1.0,
            all_consistent);
  ordered_json s = fixture_summary(cfg, f);
  s["points"] = points;
  r.summary_json = s.dump();
  return r;
}

Report run_weak_gibbs(const ExperimentConfig& cfg, const Fixture& f) {
  Report r;
  const WeakGibbsProfile profile = weak_gibbs_profile(f.raw, cfg.scan_depth);
  r.csv_header = {"n", "K_n", "normalized_log_K_n"};
  for (int n = 1; n <= cfg.scan_depth; ++n)
    r.csv_rows.push_back(
        {std::to_string(n),
         format_double(std::exp(profile.log_constants[static_cast<std::size_t>(n - 1)])),
         format_double(profile.normalized(n))});
  const int early = std::max(1, cfg.scan_depth / 3);
  add_check(r, "normalized_log_decreasing", profile.normalized(cfg.scan_depth),
            profile.normalized(early) + cfg.ratio_slack,
            profile.normalized(cfg.scan_depth) <=
                profile.normalized(early) + cfg.ratio_slack,
            "(1/n) log K_n at N versus N/3");
  ordered_json s = fixture_summary(cfg, f);
  s["bound_mode"] = profile.bound_mode;
  r.summary_json = s.dump();
  return r;
}

Report run_hofbauer(const ExperimentConfig& cfg, const Fixture& f) {
  if (f.raw.kind() != Potential::Kind::renewal)
    throw ConfigError("the hofbauer experiment needs a renewal potential");
  Report r;
  const Alphabet a2(2);
  const TailSpec zeros = TailSpec::zeros(a2);
  const CylinderMeasure nu = CylinderMeasure::conformal(f.transfer, f.perron);
  const int n_max = cfg.scan_depth;

  // Deviation series on the all-ones cylinders: truncated conformal masses
  // against the raw renewal Birkhoff weights.
  const WeakGibbsProfile weak = weak_gibbs_profile(f.raw, n_max);
  std::vector<double> dev(static_cast<std::size_t>(n_max));
  {
    const Word all_ones(a2, std::vector<int>(static_cast<std::size_t>(n_max), 1));
    for (int n = 1; n <= n_max; ++n) {
      const GibbsRatio g =
          gibbs_log_ratio(nu, f.raw, f.P, all_ones.prefix(static_cast<std::size_t>(n)),
                          zeros, n, 0);
      dev[static_cast<std::size_t>(n - 1)] = std::abs(g.log_ratio);
    }
  }
  r.csv_header = {"n", "all_ones_log_deviation", "weak_K_n", "normalized_log_K_n"};
  for (int n = 1; n <= n_max; ++n)
    r.csv_rows.push_back(
        {std::to_string(n), format_double(dev[static_cast<std::size_t>(n - 1)]),
         format_double(std::exp(weak.log_constants[static_cast<std::size_t>(n - 1)])),
         format_double(weak.normalized(n))});

  // Discrepancy vanishes exactly at every sampled return to the marker class.
  bool all_zero = true;
  std::size_t returns = 0;
  for (int p = 0; p < cfg.path_count; ++p) {
    const Word path = sample_path(f.transfer, f.perron, n_max + 2,
                                  derive_seed(cfg.seed, static_cast<std::uint64_t>(p)));
    for (int k = 0; k < n_max; ++k) {
      if (path[static_cast<std::size_t>(k)] != 0) continue;
      ++returns;
      const double xi = f.raw.cylinder_discrepancy(
          path.prefix(static_cast<std::size_t>(k) + 1), zeros);
      all_zero = all_zero && xi == 0.0;
    }
  }
  add_check(r, "discrepancy_zero_at_returns", all_zero ? 1.0 : 0.0, 1.0,
            all_zero, std::to_string(returns) + " sampled returns");

  const int early = std::max(1, n_max / 3);
  add_check(r, "weak_gibbs_normalized_decreasing", weak.normalized(n_max),
            weak.normalized(early), weak.normalized(n_max) < weak.normalized(early),
            "(1/n) log K_n strictly decreasing N/3 -> N");
  add_check(r, "all_ones_deviation_growing",
            dev[static_cast<std::size_t>(n_max - 1)],
            dev[static_cast<std::size_t>(early - 1)],
            dev[static_cast<std::size_t>(n_max - 1)] >
                dev[static_cast<std::size_t>(early - 1)],
            "no-Gibbs regime witnessed on the all-ones cylinder");

  const RenewalDiagnostics& diag = f.raw.renewal_diagnostics();
  ordered_json s = fixture_summary(cfg, f);
  s["horizon"] = diag.horizon;
  s["partial_sum_at_horizon"] = format_double(diag.last_partial_sum);
  s["sum_exp_partial"] = format_double(diag.sum_exp_partial);
  s["sum_weighted_exp_partial"] = format_double(diag.sum_weighted_exp_partial);
  r.summary_json = s.dump();
  return r;
}

Report run_pushforward(const ExperimentConfig& cfg, const Fixture& f) {
  if (!f.pi) throw ConfigError("the pushforward experiment needs a factor_map");
  Report r;
  const CylinderMeasure base = cfg.pushforward_of == "conformal"
                                   ? CylinderMeasure::conformal(f.transfer, f.perron)
                                   : CylinderMeasure::equilibrium(f.transfer, f.perron);
  const CylinderMeasure nu = CylinderMeasure::pushforward(base, *f.pi, false);
  const Alphabet a2 = f.pi->target();
  r.csv_header = {"z", "mass", "oracle_mass", "relative_gap", "additivity_gap"};
  double worst_rel = 0.0, worst_add = 0.0;
  std::vector<int> syms;
  for (int d = 1; d <= cfg.cylinder_depth; ++d) {
    const std::size_t words = pow_size(a2.size(), d);
    syms.assign(static_cast<std::size_t>(d), 0);
    for (std::size_t widx = 0; widx < words; ++widx) {
      std::size_t rem = widx;
      for (std::size_t i = syms.size(); i-- > 0;) {
        syms[i] = static_cast<int>(rem % static_cast<std::size_t>(a2.size()));
        rem /= static_cast<std::size_t>(a2.size());
      }
      const Word z(a2, syms);
      const double m = nu.mass(z);
      const double add = additivity_gap(nu, z);
      worst_add = std::max(worst_add, add);
      std::string oracle_cell, rel_cell;
      if (cfg.oracle) {
        const double om = pushforward_mass(base, *f.pi, z, true);
        const double rel = std::abs(m - om) / om;
        worst_rel = std::max(worst_rel, rel);
        oracle_cell = format_double(om);
        rel_cell = format_double(rel);
      }
      r.csv_rows.push_back({z.display(), format_double(m), oracle_cell, rel_cell,
                            format_double(add)});
    }
  }
  add_check(r, "pushforward_additivity", worst_add, nu.additivity_tolerance(),
            worst_add <= nu.additivity_tolerance());
  if (cfg.oracle)
    add_check(r, "dp_matches_enumeration", worst_rel, 1e-10, worst_rel <= 1e-10);
  ordered_json s = fixture_summary(cfg, f);
  r.summary_json = s.dump();
  return r;
}

Report run_psi2(const ExperimentConfig& cfg, const Fixture& f) {
  if (!f.pi) throw ConfigError("the psi2 experiment needs a factor_map");
  Report r;
  r.csv_header = {"z", "k", "n_k", "min_u", "max_u", "value", "error"};
  const GibbsTimeSource source = GibbsTimeSource::identity();
  const int need = cfg.k_max + 1;
  bool consistent = true;

  struct Row {
    std::vector<std::vector<std::string>> rows;
    bool ok = true;
  };
  std::vector<Row> slots(static_cast<std::size_t>(cfg.prefix_count));
  parallel_for(static_cast<std::size_t>(cfg.prefix_count), cfg.jobs, [&](std::size_t p) {
    const Word z = target_prefix_from_path(
        f, need + f.effective.depth(),
        derive_seed(cfg.seed, static_cast<std::uint64_t>(p)));
    Row& slot = slots[p];
    ImagePotentialEstimate deepest = estimate_image_potential(
        f.effective, *f.pi, z, cfg.k_max, source, f.P);
    for (int k = 0; k <= cfg.k_max; ++k) {
      const RatioInterval iv =
          image_ratio_interval(f.effective, *f.pi, z, k, source, f.P);
      const ImagePotentialEstimate est =
          estimate_image_potential(f.effective, *f.pi, z, k, source, f.P);
      slot.ok = slot.ok && std::abs(est.value - deepest.value) <=
                               est.error + cfg.ratio_slack;
      slot.rows.push_back({z.display(), std::to_string(k), std::to_string(iv.n_k),
                           format_double(iv.min_u), format_double(iv.max_u),
                           format_double(est.value), format_double(est.error)});
    }
  });
  for (const Row& slot : slots) {
    consistent = consistent && slot.ok;
    for (const auto& row : slot.rows) r.csv_rows.push_back(row);
  }
  add_check(r, "estimate_consistency", consistent ? 1.0 : 0.0, 1.0, consistent,
            "|value_k - value_kmax| <= error_k");
  ordered_json s = fixture_summary(cfg, f);
  r.summary_json = s.dump();
  return r;
}

Report run_lambda_scan(const ExperimentConfig& cfg, const Fixture& f) {
  if (!f.pi) throw ConfigError("the lambda-scan experiment needs a factor_map");
  Report r;
  r.csv_header = {"z",      "k",           "n_k",
                  "min_u",  "max_u",       "lambda",
                  "pass_nesting", "pass_monotone", "pass_recursion"};
  const GibbsTimeSource source = GibbsTimeSource::identity();
  const double c = std::pow(f.K, -4.0);

  struct Slot {
    std::vector<std::vector<std::string>> rows;
    bool all = true;
    bool contraction = true;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(cfg.prefix_count));
  parallel_for(static_cast<std::size_t>(cfg.prefix_count), cfg.jobs, [&](std::size_t p) {
    Slot& slot = slots[p];
    const Word z = target_prefix_from_path(
        f, cfg.k_max + 1 + f.effective.depth(),
        derive_seed(cfg.seed, static_cast<std::uint64_t>(p)));
    std::vector<RatioInterval> ivs;
    for (int k = 0; k <= cfg.k_max; ++k)
      ivs.push_back(image_ratio_interval(f.effective, *f.pi, z, k, source, f.P));
    const double lambda1 = ivs[1].lambda();
    for (int k = 1; k <= cfg.k_max; ++k) {
      const RatioInterval& cur = ivs[static_cast<std::size_t>(k)];
      const RatioInterval& prev = ivs[static_cast<std::size_t>(k - 1)];
      const bool nest =
          std::log(cur.min_u) >= std::log(prev.min_u) - cfg.ratio_slack &&
          std::log(cur.max_u) <= std::log(prev.max_u) + cfg.ratio_slack;
      const bool mono = cur.lambda() <= prev.lambda() + cfg.ratio_slack;
      bool rec = true;
      for (int i = 0; i < k && rec; ++i)
        rec = check_spread_recursion(f.effective, *f.pi, z, i, k, f.K, source,
                                     f.P, cfg.ratio_slack);
      slot.all = slot.all && nest && mono && rec;
      const double bound =
          std::pow(1.0 - c, std::floor((k - 1) / 2.0)) * (lambda1 - 1.0);
      slot.contraction =
          slot.contraction && cur.lambda() - 1.0 <= bound + cfg.ratio_slack;
      slot.rows.push_back({z.display(), std::to_string(k), std::to_string(cur.n_k),
                           format_double(cur.min_u), format_double(cur.max_u),
                           format_double(cur.lambda()), nest ? "1" : "0",
                           mono ? "1" : "0", rec ? "1" : "0"});
    }
  });
  bool all = true, contraction = true;
  for (const Slot& slot : slots) {
    all = all && slot.all;
    contraction = contraction && slot.contraction;
    for (const auto& row : slot.rows) r.csv_rows.push_back(row);
  }
  add_check(r, "lemma_suite", all ? 1.0 : 0.0, 1.0, all,
            "nesting, monotonicity, recursion");
  add_check(r, "contraction", contraction ? 1.0 : 0.0, 1.0, contraction,
            "lambda_k - 1 <= (1-c)^floor((k-1)/2) (lambda_1 - 1)");

  // Regularity of the factor map on this fixture: fiber-wide agreement of
  // the first Gibbs time over a few short image cylinders.
  bool regular = true;
  {
    const Alphabet a2 = f.pi->target();
    std::vector<int> syms(2, 0);
    for (std::size_t widx = 0; widx < pow_size(a2.size(), 2); ++widx) {
      std::size_t rem = widx;
      for (std::size_t i = syms.size(); i-- > 0;) {
        syms[i] = static_cast<int>(rem % static_cast<std::size_t>(a2.size()));
        rem /= static_cast<std::size_t>(a2.size());
      }
      regular = regular &&
                check_fiber_first_time_agreement(f.mu, f.effective, *f.pi,
                                                 Word(a2, syms), f.P, f.K,
                                                 2, cfg.ratio_slack);
    }
  }
  add_check(r, "factor_regularity", regular ? 1.0 : 0.0, 1.0, regular,
            "first Gibbs time agrees across fibers");

  ordered_json s = fixture_summary(cfg, f);
  s["c"] = format_double(c);
  r.summary_json = s.dump();
  return r;
}

Report run_image_gibbs(const ExperimentConfig& cfg, const Fixture& f) {
  if (!f.pi) throw ConfigError("the image-gibbs experiment needs a factor_map");
  Report r;
  const CylinderMeasure base = cfg.pushforward_of == "conformal"
                                   ? CylinderMeasure::conformal(f.transfer, f.perron)
                                   : CylinderMeasure::equilibrium(f.transfer, f.perron);
  const CylinderMeasure nu = CylinderMeasure::pushforward(base, *f.pi, false);
  const GibbsTimeSource source = GibbsTimeSource::identity();

  const int deep = cfg.cylinder_depth;
  const int shallow = std::max(2, deep - 2);
  const ImageGibbsScan scan_deep =
      scan_image_gibbs(nu, f.effective, *f.pi, deep, f.K, cfg.k_max, source, f.P);
  const ImageGibbsScan scan_shallow =
      scan_image_gibbs(nu, f.effective, *f.pi, shallow, f.K, cfg.k_max, source, f.P);
  const double drift =
      std::abs(scan_deep.k_prime - scan_shallow.k_prime) / scan_shallow.k_prime;

  r.csv_header = {"z", "l", "n_i", "log_ratio"};
  {
    const Alphabet a2 = f.pi->target();
    std::vector<int> syms(static_cast<std::size_t>(deep));
    for (std::size_t widx = 0; widx < pow_size(a2.size(), deep); ++widx) {
      std::size_t rem = widx;
      for (std::size_t i = syms.size(); i-- > 0;) {
        syms[i] = static_cast<int>(rem % static_cast<std::size_t>(a2.size()));
        rem /= static_cast<std::size_t>(a2.size());
      }
      const Word z(a2, syms);
      for (int n_i = 0; n_i < deep; ++n_i)
        for (int l = 0; l <= n_i; ++l)
          r.csv_rows.push_back(
              {z.display(), std::to_string(l), std::to_string(n_i),
               format_double(image_gibbs_log_ratio(nu, f.effective, *f.pi, z, l,
                                                   n_i, cfg.k_max, source, f.P))});
    }
  }

  add_check(r, "k_prime_finite", scan_deep.k_prime,
            std::numeric_limits<double>::infinity(),
            std::isfinite(scan_deep.k_prime));
  add_check(r, "k_prime_stable", drift, 0.05, drift < 0.05,
            "relative change of K' from depth " + std::to_string(shallow) +
                " to " + std::to_string(deep));

  // Telescoped Birkhoff identity at modest depth.
  bool telescopes = true;
  double worst_excess = 0.0;
  for (int p = 0; p < std::min(cfg.prefix_count, 16); ++p) {
    const Word z = target_prefix_from_path(
        f, cfg.k_max + 1 + f.effective.depth(),
        derive_seed(cfg.seed ^ 0x7e1e5c0ff3ULL, static_cast<std::uint64_t>(p)));
    for (int n = 0; n <= std::min(3, cfg.k_max - 1); ++n) {
      const TelescopeCheck tc = image_birkhoff_residual(
          f.effective, *f.pi, z, n, cfg.k_max, source, f.P, cfg.ratio_slack);
      telescopes = telescopes && tc.pass();
      worst_excess = std::max(worst_excess, tc.residual - tc.budget);
    }
  }
  add_check(r, "telescope_residual_within_budget", worst_excess, 0.0,
            telescopes, "residual minus accumulated certified error");

  ordered_json s = fixture_summary(cfg, f);
  s["k_prime"] = format_double(scan_deep.k_prime);
  s["k_prime_shallow"] = format_double(scan_shallow.k_prime);
  s["windows"] = scan_deep.windows;
  s["max_abs_log_ratio"] = format_double(scan_deep.max_abs_log_ratio);
  r.summary_json = s.dump();
  return r;
}

Report run_decay_fit(const ExperimentConfig& cfg, const Fixture& f) {
  Report r;
  std::vector<int> ks;
  std::vector<double> osc;
  if (cfg.decay_source == "synthetic") {
    for (int k = 1; k <= cfg.k_max; ++k) {
      ks.push_back(k);
      if (cfg.synthetic_model == "geometric")
        osc.push_back(std::pow(cfg.synthetic_rate, k));
      else if (cfg.synthetic_model == "polynomial")
        osc.push_back(std::pow(static_cast<double>(k), -cfg.synthetic_rate));
      else
        throw ConfigError("unknown synthetic decay model '" +
                          cfg.synthetic_model + "'");
    }
  } else if (cfg.decay_source == "measured") {
    if (!f.pi) throw ConfigError("measured decay data needs a factor_map");
    const GibbsTimeSource source = GibbsTimeSource::identity();
    // The all-zeros image word keeps every fiber maximal, so the spread
    // sequence decays without collapsing to 1 at a pinned symbol.
    const Word z(f.pi->target(),
                 std::vector<int>(static_cast<std::size_t>(cfg.k_max) + 1, 0));
    for (int k = 2; k <= cfg.k_max; ++k) {
      const double lambda =
          image_ratio_interval(f.effective, *f.pi, z, k, source, f.P).lambda();
      if (std::log(lambda) <= 0.0) break;  // spread hit exact 1
      ks.push_back(k);
      osc.push_back(std::log(lambda));
    }
    if (ks.size() < 4)
      throw ConfigError("measured spread sequence too short for a fit");
  } else {
    throw ConfigError("unknown decay source '" + cfg.decay_source + "'");
  }

  const DecayFit fit = fit_decay(ks, osc);
  r.csv_header = {"k", "osc", "stretched_pred", "polynomial_pred"};
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double k = static_cast<double>(ks[i]);
    const double st = std::exp(-(-std::log(fit.theta)) * std::pow(k, fit.beta));
    const double po = fit.gamma * std::pow(k, -fit.s_exponent);
    r.csv_rows.push_back({std::to_string(ks[i]), format_double(osc[i]),
                          format_double(st), format_double(po)});
  }
  const char* model_name =
      fit.model == DecayFit::Model::stretched ? "stretched" : "polynomial";
  if (cfg.expect_decay_model)
    add_check(r, "expected_model", 0.0, 0.0, *cfg.expect_decay_model == model_name,
              std::string("fit chose ") + model_name);
  add_check(r, "residual_finite", fit.residual,
            std::numeric_limits<double>::infinity(), std::isfinite(fit.residual));

  ordered_json s = fixture_summary(cfg, f);
  s["model"] = model_name;
  s["theta"] = format_double(fit.theta);
  s["beta"] = format_double(fit.beta);
  s["gamma"] = format_double(fit.gamma);
  s["s"] = format_double(fit.s_exponent);
  s["residual"] = format_double(fit.residual);
  s["residual_stretched"] = format_double(fit.residual_stretched);
  s["residual_polynomial"] = format_double(fit.residual_polynomial);
  r.summary_json = s.dump();
  return r;
}

Report run_mc_growth(const ExperimentConfig& cfg, const Fixture& f) {
  Report r;
  std::vector<Word> paths;
  paths.reserve(static_cast<std::size_t>(cfg.path_count));
  std::vector<Word> slots(static_cast<std::size_t>(cfg.path_count),
                          Word(f.effective.alphabet()));
  parallel_for(static_cast<std::size_t>(cfg.path_count), cfg.jobs, [&](std::size_t i) {
    slots[i] = sample_path(f.transfer, f.perron, cfg.path_length,
                           derive_seed(cfg.seed, static_cast<std::uint64_t>(i)));
  });
  for (auto& w : slots) paths.push_back(std::move(w));

  const TailSpec tail = TailSpec::zeros(f.effective.alphabet());
  const GrowthStats stats =
      gibbs_time_growth(paths, f.mu, f.effective, f.P, f.K, tail,
                        cfg.max_first_time, cfg.ratio_slack);

  r.csv_header = {"path", "exceptional", "first_time", "steps", "last_time", "slope"};
  for (std::size_t i = 0; i < stats.per_path.size(); ++i) {
    const PathGrowth& pg = stats.per_path[i];
    r.csv_rows.push_back({std::to_string(i), pg.exceptional ? "1" : "0",
                          std::to_string(pg.first_time), std::to_string(pg.steps),
                          std::to_string(pg.last_time), format_double(pg.slope)});
  }

  add_check(r, "has_nonexceptional_paths",
            static_cast<double>(stats.per_path.size() - stats.exceptional_paths),
            1.0, stats.per_path.size() > stats.exceptional_paths);

  // Independent stationary estimate of the mean first arrival at the marker
  // class (two-symbol fixtures): sum_k mu([1^k]) with the exact geometric
  // tail of the truncated chain.
  std::optional<double> return_estimate;
  if (f.effective.alphabet().size() == 2) {
    const CylinderMeasure eq = CylinderMeasure::equilibrium(f.transfer, f.perron);
    const int c = f.effective.depth() - 1;
    double total = 1.0;  // k = 0 term
    double mass_c = 1.0, mass_c1 = 1.0;
    for (int k = 1; k <= c + 1; ++k) {
      const Word ones(f.effective.alphabet(),
                      std::vector<int>(static_cast<std::size_t>(k), 1));
      const double m = eq.mass(ones);
      if (k <= c) total += m;
      if (k == c) mass_c = m;
      if (k == c + 1) mass_c1 = m;
    }
    const double rho = mass_c1 / mass_c;
    if (rho < 1.0) {
      total += mass_c1 / (1.0 - rho);
      return_estimate = total;
    }
  }

  ordered_json s = fixture_summary(cfg, f);
  s["mean_first_time"] = format_double(stats.mean_first_time);
  s["first_time_stderr"] = format_double(stats.first_time_stderr);
  s["mean_slope"] = format_double(stats.mean_slope);
  s["slope_stderr"] = format_double(stats.slope_stderr);
  s["exceptional_paths"] = stats.exceptional_paths;
  if (return_estimate)
    s["mean_return_estimate"] = format_double(*return_estimate);
  else
    s["mean_return_estimate"] = nullptr;
  r.summary_json = s.dump();
  return r;
}

}  // namespace

Report run_experiment(const ExperimentConfig& cfg) {
  const Fixture fixture = make_fixture(cfg);
  Report r;
  if (cfg.experiment == "pressure")
    r = run_pressure(cfg, fixture);
  else if (cfg.experiment == "conformal")
    r = run_conformal(cfg, fixture);
  else if (cfg.experiment == "gibbs-check")
    r = run_gibbs_check(cfg, fixture);
  else if (cfg.experiment == "gibbs-times")
    r = run_gibbs_times(cfg, fixture);
  else if (cfg.experiment == "weak-gibbs")
    r = run_weak_gibbs(cfg, fixture);
  else if (cfg.experiment == "hofbauer")
    r = run_hofbauer(cfg, fixture);
  else if (cfg.experiment == "pushforward")
    r = run_pushforward(cfg, fixture);
  else if (cfg.experiment == "psi2")
    r = run_psi2(cfg, fixture);
  else if (cfg.experiment == "lambda-scan")
    r = run_lambda_scan(cfg, fixture);
  else if (cfg.experiment == "image-gibbs")
    r = run_image_gibbs(cfg, fixture);
  else if (cfg.experiment == "decay-fit")
    r = run_decay_fit(cfg, fixture);
  else if (cfg.experiment == "mc-growth")
    r = run_mc_growth(cfg, fixture);
  else
    throw ConfigError("unknown experiment '" + cfg.experiment + "'");

  r.experiment_id = cfg.experiment;
  r.version = kVersion;
  r.seed = cfg.seed;
  char digest[32];
  std::snprintf(digest, sizeof(digest), "%016llx",
                static_cast<unsigned long long>(fnv1a(cfg.canonical_text())));
  r.inputs_digest = digest;
  return r;
}

void write_report_files(const Report& report,
                        const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);

  {
    std::ofstream csv(out_dir / (report.experiment_id + ".csv"),
                      std::ios::binary);
    for (std::size_t i = 0; i < report.csv_header.size(); ++i) {
      if (i) csv << ',';
      csv << report.csv_header[i];
    }
    csv << '\n';
    for (const auto& row : report.csv_rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) csv << ',';
        csv << row[i];
      }
      csv << '\n';
    }
  }

  ordered_json j;
  j["experiment"] = report.experiment_id;
  j["version"] = report.version;
  j["seed"] = report.seed;
  j["inputs_digest"] = report.inputs_digest;
  j["all_pass"] = report.all_pass();
  j["notes"] = report.notes;
  ordered_json checks = ordered_json::array();
  for (const auto& c : report.checks) {
    ordered_json cj;
    cj["name"] = c.name;
    cj["value"] = format_double(c.value);
    cj["bound"] = format_double(c.bound);
    cj["pass"] = c.pass;
    cj["note"] = c.note;
    checks.push_back(cj);
  }
  j["checks"] = checks;
  j["summary"] = ordered_json::parse(report.summary_json.empty()
                                         ? std::string("{}")
                                         : report.summary_json);
  std::ofstream json_out(out_dir / (report.experiment_id + ".json"),
                         std::ios::binary);
  json_out << j.dump(2) << '\n';
}

}  // namespace seqgibbs
