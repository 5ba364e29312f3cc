#include "cycle_census_cli/cli.hpp"

#include <deque>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cycle_census/ensembles.hpp"
#include "cycle_census/error.hpp"
#include "cycle_census/output.hpp"
#include "cycle_census/planar_field.hpp"
#include "cycle_census/poincare.hpp"
#include "cycle_census/sampling.hpp"
#include "cycle_census_cli/verify_suite.hpp"

namespace cycle_census::cli {

namespace {

using Json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every option of a subcommand is a key of its default config. Flags are the
// keys with '_' spelled '-'; values are converted by the type of the default.
struct Binding {
  std::string key;
  CLI::Option* option = nullptr;
  std::string raw;
  bool flag_value = false;
};

struct Command {
  CLI::App* app = nullptr;
  Json defaults;
  std::deque<Binding> bindings;
  std::string config_path;
};

std::string flag_name(const std::string& key) {
  std::string f = key;
  for (char& c : f) {
    if (c == '_') c = '-';
  }
  return "--" + f;
}

std::string type_hint(const Json& v) {
  if (v.is_boolean()) return "";
  if (v.is_number_integer() || v.is_number_unsigned()) return "INT";
  if (v.is_number()) return "FLOAT";
  if (v.is_array()) return "INT,INT,...";
  if (v.is_object()) return "JSON";
  return "TEXT";
}

void add_bindings(Command& cmd, const std::vector<std::pair<std::string, std::string>>& help) {
  for (const auto& [key, text] : help) {
    Binding& b = cmd.bindings.emplace_back();
    b.key = key;
    const Json& def = cmd.defaults.at(key);
    if (def.is_boolean()) {
      b.option = cmd.app->add_flag(flag_name(key), b.flag_value, text);
    } else {
      b.option = cmd.app->add_option(flag_name(key), b.raw, text)->type_name(type_hint(def));
    }
  }
  cmd.app->add_option("--config", cmd.config_path, "JSON file with any of the keys above; flags override it")
      ->check(CLI::ExistingFile);
}

Json convert(const Binding& b, const Json& def) {
  const std::string& raw = b.raw;
  try {
    if (def.is_boolean()) return b.flag_value;
    if (def.is_number_integer() || def.is_number_unsigned()) {
      std::size_t pos = 0;
      if (!raw.empty() && raw.front() != '-') {
        const unsigned long long v = std::stoull(raw, &pos);
        if (pos != raw.size()) throw std::invalid_argument(raw);
        return static_cast<std::uint64_t>(v);
      }
      const long long v = std::stoll(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument(raw);
      return v;
    }
    if (def.is_number()) {
      std::size_t pos = 0;
      const double v = std::stod(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument(raw);
      return v;
    }
    if (def.is_array()) {
      Json arr = Json::array();
      std::stringstream ss(raw);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t pos = 0;
        arr.push_back(std::stoi(item, &pos));
        if (pos != item.size()) throw std::invalid_argument(item);
      }
      return arr;
    }
    if (def.is_object()) {
      Json j = Json::parse(raw);
      if (!j.is_object()) throw std::invalid_argument(raw);
      return j;
    }
    return raw;
  } catch (const std::exception&) {
    throw UsageError(flag_name(b.key) + ": cannot read '" + raw + "' as " + type_hint(def));
  }
}

bool same_kind(const Json& value, const Json& def) {
  if (def.is_number_float()) return value.is_number();
  if (def.is_number()) return value.is_number_integer() || value.is_number_unsigned();
  return value.type() == def.type();
}

// defaults <- config file <- explicit flags.
Json effective_config(const Command& cmd) {
  Json eff = cmd.defaults;
  if (!cmd.config_path.empty()) {
    std::ifstream in(cmd.config_path);
    Json file;
    try {
      file = Json::parse(in);
    } catch (const std::exception& e) {
      throw UsageError("--config " + cmd.config_path + ": " + e.what());
    }
    if (!file.is_object()) throw UsageError("--config " + cmd.config_path + ": expected a JSON object");
    for (auto it = file.begin(); it != file.end(); ++it) {
      if (!eff.contains(it.key())) {
        std::string keys;
        for (auto d = cmd.defaults.begin(); d != cmd.defaults.end(); ++d) keys += (keys.empty() ? "" : ", ") + d.key();
        throw UsageError("--config: unknown key '" + it.key() + "' (expected keys: " + keys + ")");
      }
      if (!same_kind(it.value(), eff.at(it.key()))) {
        throw UsageError("--config: key '" + it.key() + "' expects " + type_hint(eff.at(it.key())));
      }
      eff[it.key()] = it.value();
    }
  }
  for (const Binding& b : cmd.bindings) {
    if (b.option->count() > 0) eff[b.key] = convert(b, cmd.defaults.at(b.key));
  }
  return eff;
}

Json default_thresholds_json() { return Json(default_thresholds(8)); }

std::uint64_t get_seed(const Json& eff) {
  if (eff.at("seed").is_number_unsigned()) return eff.at("seed").get<std::uint64_t>();
  const long long s = eff.at("seed").get<long long>();
  if (s < 0) throw UsageError("--seed must be nonnegative");
  return static_cast<std::uint64_t>(s);
}

unsigned get_threads(const Json& eff) {
  const long long t = eff.at("threads").get<long long>();
  if (t < 1 || t > 4096) throw UsageError("--threads must be in [1, 4096]");
  return static_cast<unsigned>(t);
}

std::size_t get_count(const Json& eff, const char* key) {
  const long long n = eff.at(key).get<long long>();
  if (n < 1) throw UsageError(flag_name(key) + " must be >= 1");
  return static_cast<std::size_t>(n);
}

RunOptions run_options(const Json& eff) {
  RunOptions o;
  o.seed = get_seed(eff);
  o.threads = get_threads(eff);
  o.out_dir = eff.at("out").get<std::string>();
  if (eff.contains("gzip")) o.gzip = eff.at("gzip").get<bool>();
  return o;
}

SolverConfig solver_from(const Json& eff) {
  if (!eff.contains("solver") || eff.at("solver").empty()) return SolverConfig{};
  return solver_config_from_json(eff.at("solver").dump());
}

void echo_config(const Json& eff, const std::string& subcommand) {
  const std::string out = eff.at("out").get<std::string>();
  if (out.empty()) return;
  Json j;
  j["subcommand"] = subcommand;
  for (auto it = eff.begin(); it != eff.end(); ++it) j[it.key()] = it.value();
  write_file_atomic(std::filesystem::path(out) / "effective-config.json", j.dump(2) + "\n");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_tail(std::ostream& out, const TailTable& t, const std::string& label) {
  out << label << ": fitted decay c2 = " << format_double(t.fit_c2) << " (95% CI " << format_double(t.c2_ci_low)
      << " .. " << format_double(t.c2_ci_high) << ")" << (t.insufficient_data ? " [insufficient data]" : "") << "\n";
}

int cmd_sample_fields(const Json& eff, std::ostream& out) {
  const int degree = eff.at("degree").get<int>();
  double budget = eff.at("budget_N").get<double>();
  if (budget <= 0.0) budget = Ellipsoid::theorem_a_budget(degree);
  const Ellipsoid e{1.0, budget, degree};
  e.validate();
  const std::size_t n = get_count(eff, "samples");
  const std::uint64_t seed = get_seed(eff);
  std::string jsonl;
  for (std::size_t i = 0; i < n; ++i) jsonl += field_to_json(sample_ellipsoid(e, mix_seed(seed, i))) + "\n";
  const std::string dir = eff.at("out").get<std::string>();
  if (dir.empty()) out << jsonl;
  else write_file_atomic(std::filesystem::path(dir) / "fields.jsonl", jsonl);
  return kExitOk;
}

int cmd_count_cycles(const Json& eff, std::ostream& out) {
  const std::string path = eff.at("field").get<std::string>();
  if (path.empty()) throw UsageError("--field is required (path to a field JSON file)");
  const PlanarField field = field_from_json(read_text(path));
  const CycleCount c =
      count_limit_cycles(field, eff.at("K").get<double>(), solver_from(eff), eff.at("budget_N").get<double>());
  const std::string text = cycle_count_to_json(c, 2) + "\n";
  out << text;
  const std::string dir = eff.at("out").get<std::string>();
  if (!dir.empty()) write_file_atomic(std::filesystem::path(dir) / "cycle-count.json", text);
  return kExitOk;
}

std::vector<int> thresholds_from(const Json& eff) {
  std::vector<int> t = eff.at("thresholds").get<std::vector<int>>();
  if (t.empty()) throw UsageError("--thresholds must list at least one threshold");
  return t;
}

int cmd_theorem_a(const Json& eff, std::ostream& out) {
  TheoremAConfig cfg;
  cfg.degree = eff.at("degree").get<int>();
  if (cfg.degree < 1) throw UsageError("--degree must be >= 1");
  cfg.norm_budget = eff.at("budget_N").get<double>();
  if (cfg.norm_budget > Ellipsoid::theorem_a_budget(cfg.degree) * (1.0 + 1e-12)) {
    throw UsageError("--budget-N must not exceed 1/(192 pi d^2) = " +
                     format_double(Ellipsoid::theorem_a_budget(cfg.degree)));
  }
  cfg.samples = get_count(eff, "samples");
  cfg.K = eff.at("K").get<double>();
  cfg.thresholds = thresholds_from(eff);
  cfg.bootstrap_resamples = static_cast<std::size_t>(eff.at("bootstrap").get<long long>());
  cfg.solver = solver_from(eff);
  const TheoremAResult r = run_theorem_a(cfg, run_options(eff));
  out << "samples " << r.records.size() << ", failures " << r.failures << ", centers " << r.centers
      << ", fraction with 0 cycles " << format_double(r.fraction_zero_cycles) << "\n";
  out << "E[complex count] = " << format_double(r.complex_stats.expectation) << " +- "
      << format_double(r.complex_stats.standard_error) << "\n";
  print_tail(out, r.complex_tail, "complex count tail");
  print_tail(out, r.real_tail, "real cycle tail");
  return kExitOk;
}

int cmd_tail(const Json& eff, std::ostream& out) {
  TailConfig cfg;
  cfg.family = eff.at("family").get<std::string>();
  cfg.family_params = eff.at("family_params").dump();
  cfg.samples = get_count(eff, "samples");
  cfg.thresholds = thresholds_from(eff);
  cfg.bootstrap_resamples = static_cast<std::size_t>(eff.at("bootstrap").get<long long>());
  const TailResult r = run_tail(cfg, run_options(eff));
  out << "samples " << r.records.size() << ", failures " << r.failures << ", E[count] = "
      << format_double(r.stats.expectation) << "\n";
  print_tail(out, r.tail, "zero count tail");
  return kExitOk;
}

int cmd_slln(const Json& eff, std::ostream& out) {
  SllnConfig cfg;
  cfg.sequence = eff.at("sequence").dump();
  cfg.horizon = get_count(eff, "samples");
  cfg.thresholds = thresholds_from(eff);
  const SllnResult r = run_slln(cfg, run_options(eff));
  out << "running mean " << format_double(r.mean) << " +- " << format_double(r.standard_error)
      << ", last-quarter range " << format_double(r.last_quarter_range) << (r.stabilized ? " (stable)" : " (not stable)")
      << "\n";
  out << "envelope " << format_double(r.envelope) << ", C = " << format_double(r.envelope_constant)
      << (r.within_envelope ? " (mean within envelope)" : " (mean above envelope)") << "\n";
  return kExitOk;
}

int cmd_clt(const Json& eff, std::ostream& out) {
  CltConfig cfg;
  cfg.sequence = eff.at("sequence").dump();
  cfg.n = get_count(eff, "n");
  cfg.repetitions = get_count(eff, "samples");
  cfg.calibration_draws = get_count(eff, "calibration");
  cfg.delta = eff.at("delta").get<double>();
  cfg.check_separation = !eff.at("skip_separation").get<bool>();
  const CltReport r = run_clt(cfg, run_options(eff));
  out << "n " << r.n << ", B_n " << format_double(r.B_n) << ", KS distance to N(0,1) " << format_double(r.ks_vs_normal)
      << " (p = " << format_double(r.ks_p_value) << ")\n";
  return kExitOk;
}

int cmd_kac(const Json& eff, std::ostream& out) {
  KacConfig cfg;
  cfg.k = eff.at("k").get<int>();
  cfg.samples = get_count(eff, "samples");
  cfg.epsilon = eff.at("epsilon").get<double>();
  const KacRunResult r = run_kac(cfg, run_options(eff));
  out << "mean annulus fraction " << format_double(r.result.mean_fraction) << ", conservation "
      << (r.conservation_ok ? "ok" : "VIOLATED") << ", argument KS p = " << format_double(r.uniformity.p_value) << "\n";
  return kExitOk;
}

int cmd_verify(const Json& eff, std::ostream& out) {
  VerifyOptions opts;
  opts.seed = get_seed(eff);
  opts.threads = get_threads(eff);
  opts.scratch_dir = eff.at("out").get<std::string>();
  opts.only = eff.at("only").get<std::vector<int>>();
  for (int id : opts.only) {
    if (id < 1 || id > kCriterionCount) throw UsageError("--only: criterion ids are 1.." + std::to_string(kCriterionCount));
  }
  const auto results = run_verify_suite(opts, [&out](const CriterionResult& r) { out << format_result_line(r) << std::endl; });
  bool ok = true;
  for (const auto& r : results) ok = ok && r.passed;
  out << (ok ? "all criteria passed" : "some criteria FAILED") << "\n";
  return ok ? kExitOk : kExitVerifyFailure;
}

}  // namespace

int parse_and_dispatch(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monte Carlo census of limit cycles and zeros of random analytic families", "cycle-census"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", "cycle-census 0.1.0");

  const Json seed = kDefaultSeed;
  const Json threads = default_thread_count();
  std::deque<Command> commands;
  auto make = [&](const char* name, const char* description, Json defaults,
                  const std::vector<std::pair<std::string, std::string>>& help) -> Command& {
    Command& c = commands.emplace_back();
    c.app = app.add_subcommand(name, description);
    c.defaults = std::move(defaults);
    add_bindings(c, help);
    return c;
  };

  const std::pair<std::string, std::string> h_seed{"seed", "master seed (default 1729)"};
  const std::pair<std::string, std::string> h_threads{"threads", "worker threads (default: CYCLE_CENSUS_THREADS or all cores)"};
  const std::pair<std::string, std::string> h_out{"out", "output directory"};
  const std::pair<std::string, std::string> h_thresholds{"thresholds", "tail thresholds T, comma separated"};
  const std::pair<std::string, std::string> h_gzip{"gzip", "write records.jsonl.gz instead of records.jsonl"};
  const std::pair<std::string, std::string> h_boot{"bootstrap", "bootstrap resamples for the decay-rate CI"};
  const std::pair<std::string, std::string> h_solver{"solver", "solver settings as JSON, e.g. {\"theta_points\":1024}"};

  make("sample-fields", "Sample fields uniformly from the ellipsoid E(1, N)",
       {{"degree", 3}, {"budget_N", 0.0}, {"samples", 10}, {"seed", seed}, {"out", ""}},
       {{"degree", "field degree d"}, {"budget_N", "norm budget N (default 1/(192 pi d^2))"},
        {"samples", "number of fields"}, h_seed, h_out});
  make("count-cycles", "Count limit cycles of one field and print the result as JSON",
       {{"field", ""}, {"K", 0.5}, {"budget_N", 0.0}, {"solver", Json::object()}, {"out", ""}},
       {{"field", "path to a field JSON file"}, {"K", "count cycles with radius in (0, K]"},
        {"budget_N", "norm used to normalise the complex count (default max(1/(192 pi d^2), |v|))"}, h_solver, h_out});
  make("theorem-a", "Tail and moments of cycle counts for random small fields",
       {{"degree", 3}, {"budget_N", 0.0}, {"samples", 10000}, {"seed", seed}, {"threads", threads}, {"K", 0.5},
        {"thresholds", default_thresholds_json()}, {"bootstrap", 400}, {"gzip", false}, {"solver", Json::object()},
        {"out", ""}},
       {{"degree", "field degree d"}, {"budget_N", "norm budget N (default and maximum 1/(192 pi d^2))"},
        {"samples", "number of sampled fields"}, h_seed, h_threads, {"K", "count real cycles with radius in (0, K]"},
        h_thresholds, h_boot, h_gzip, h_solver, h_out});
  make("tail", "Tail of the zero count of a registry family",
       {{"family", "blaschke-hyperplane"}, {"family_params", Json::parse(TailConfig{}.family_params)}, {"samples", 10000},
        {"seed", seed}, {"threads", threads}, {"thresholds", default_thresholds_json()}, {"bootstrap", 400},
        {"gzip", false}, {"out", ""}},
       {{"family", "registry family name"}, {"family_params", "family parameters as JSON"},
        {"samples", "number of parameter draws"}, h_seed, h_threads, h_thresholds, h_boot, h_gzip, h_out});
  make("slln", "Running means of zero counts along a family sequence",
       {{"sequence", Json::parse(SllnConfig{}.sequence)}, {"samples", 2000}, {"seed", seed}, {"threads", threads},
        {"thresholds", default_thresholds_json()}, {"gzip", false}, {"out", ""}},
       {{"sequence", "family sequence as JSON"}, {"samples", "horizon n"}, h_seed, h_threads, h_thresholds, h_gzip,
        h_out});
  make("clt", "Normalised sums of zero counts against the standard normal",
       {{"sequence", Json::parse(CltConfig{}.sequence)}, {"n", 200}, {"samples", 500}, {"calibration", 10000},
        {"delta", 0.05}, {"skip_separation", false}, {"seed", seed}, {"threads", threads}, {"out", ""}},
       {{"sequence", "family sequence as JSON"}, {"n", "batch length"}, {"samples", "repetitions"},
        {"calibration", "independent draws per k for E and D"}, {"delta", "separation threshold"},
        {"skip_separation", "do not check the separation conditions"}, h_seed, h_threads, h_out});
  make("kac", "Root concentration of Kac polynomials near the unit circle",
       {{"k", 200}, {"epsilon", 0.1}, {"samples", 50}, {"seed", seed}, {"threads", threads}, {"out", ""}},
       {{"k", "polynomial degree"}, {"epsilon", "annulus half-width"}, {"samples", "number of draws"}, h_seed,
        h_threads, h_out});
  make("verify", "Run the acceptance suite; exit 0 iff every criterion passes",
       {{"seed", seed}, {"threads", threads}, {"only", Json::array()}, {"out", ""}},
       {h_seed, h_threads, {"only", "criterion ids to run, comma separated"},
        {"out", "scratch directory for the reproducibility sub-runs"}});

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  for (Command& cmd : commands) {
    if (!cmd.app->parsed()) continue;
    const std::string name = cmd.app->get_name();
    try {
      const Json eff = effective_config(cmd);
      if (name != "verify") echo_config(eff, name);
      if (name == "sample-fields") return cmd_sample_fields(eff, out);
      if (name == "count-cycles") return cmd_count_cycles(eff, out);
      if (name == "theorem-a") return cmd_theorem_a(eff, out);
      if (name == "tail") return cmd_tail(eff, out);
      if (name == "slln") return cmd_slln(eff, out);
      if (name == "clt") return cmd_clt(eff, out);
      if (name == "kac") return cmd_kac(eff, out);
      if (name == "verify") return cmd_verify(eff, out);
    } catch (const UsageError& e) {
      err << "usage error: " << e.what() << "\n" << cmd.app->help();
      return kExitUsage;
    } catch (const nlohmann::json::exception& e) {
      err << "usage error: " << e.what() << "\n" << cmd.app->help();
      return kExitUsage;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kInvalidArgument) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
      }
      err << "error: " << e.what() << "\n";
      return kExitExperimentFailure;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitExperimentFailure;
    }
  }
  return kExitUsage;
}

}  // namespace cycle_census::cli
