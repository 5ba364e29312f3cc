#include "cycle_census_cli/verify_suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "cycle_census/analytic_core.hpp"
#include "cycle_census/error.hpp"
#include "cycle_census/family_registry.hpp"
#include "cycle_census/output.hpp"
#include "cycle_census/parametric_family.hpp"
#include "cycle_census/planar_field.hpp"
#include "cycle_census/poincare.hpp"
#include "cycle_census/random_poly.hpp"
#include "cycle_census/sampling.hpp"
#include "cycle_census/stats.hpp"
#include "cycle_census_cli/cli.hpp"

namespace cycle_census::cli {

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(double x, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

// 1. p(v0, w) = (e^{pi N} - 1) w for the diagonal field v0.
Outcome exact_displacement(const VerifyOptions&) {
  const auto start = std::chrono::steady_clock::now();
  const int d = 5;
  const double n = 1.0 / (192.0 * kPi * 25.0);
  const DisplacementMap map(polar_reduce(v0_field(d, n)));
  double worst = 0.0;
  for (double w : {0.1, 0.2, 0.3, 0.5, 0.7}) {
    worst = std::max(worst, std::abs(map.real_displacement(w) - std::expm1(kPi * n) * w));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst < 1e-10 && secs < 5.0, "max error " + fmt(worst) + " (< 1e-10), " + fmt(secs) + " s (< 5 s)"};
}

// 2. Rigid fields with l roots have exactly l cycles.
Outcome rigid_ground_truth(const VerifyOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  std::ostringstream detail;
  bool ok = true;
  for (int l = 1; l <= 4; ++l) {
    RigidConfig cfg;
    cfg.roots = l;
    cfg.samples = 20;
    RunOptions run;
    run.seed = mix_seed(opts.seed, 2, static_cast<std::uint64_t>(l));
    run.threads = opts.threads;
    int exact = 0;
    for (const RigidRecord& r : run_rigid_fields(cfg, run)) {
      if (r.record.real_cycles && *r.record.real_cycles == l) ++exact;
    }
    ok = ok && exact == 20;
    detail << "l=" << l << ": " << exact << "/20  ";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  detail << fmt(secs) << " s (< 120 s)";
  return {ok && secs < 120.0, detail.str()};
}

// 3. Winding count equals the number of placed roots inside |z| = 1.
Outcome argument_principle(const VerifyOptions& opts) {
  Rng rng(mix_seed(opts.seed, 3));
  std::uniform_int_distribution<int> degree_dist(1, 12);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int exact = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int degree = degree_dist(rng);
    ComplexVector roots;
    int inside = 0;
    while (static_cast<int>(roots.size()) < degree) {
      const double radius = 2.0 * std::sqrt(unit(rng));
      if (std::abs(radius - 1.0) < 1e-3) continue;
      roots.push_back(std::polar(radius, kTwoPi * unit(rng)));
      if (radius < 1.0) ++inside;
    }
    const ComplexPoly p = ComplexPoly::from_roots(roots);
    const ZeroCountResult z = winding_zero_count([&p](Complex x) { return p(x); }, 1.0);
    if (z.count && *z.count == inside) ++exact;
  }
  return {exact == 100, std::to_string(exact) + "/100 exact"};
}

// 4. Counted zeros never exceed the Jensen-type bound.
Outcome jensen_soundness(const VerifyOptions& opts) {
  std::vector<ParametricFamily> families;
  for (int k = 1; k <= 8; ++k) {
    families.push_back(make_family("monomial", R"({"k":)" + std::to_string(k) + R"(,"value":0.2,"coef":0.8})"));
  }
  families.push_back(make_family("linear-root", R"({"lambda":0.9})"));
  families.push_back(make_family("bernoulli"));
  const FamilySequence sections = make_sequence(R"({"kind":"hyperplane-sections","period":6})");
  for (std::size_t k = 1; k <= 6; ++k) families.push_back(sections.member(k));
  for (int m = 2; m <= 10; m += 4) {
    families.push_back(make_family(
        "blaschke-hyperplane", R"({"components":[{"kind":"blaschke","weight":0.5,"degree":)" + std::to_string(m) +
                                   R"(},{"kind":"blaschke","weight":0.5,"degree":)" + std::to_string(m + 1) +
                                   R"(,"zero_radius":0.2},{"kind":"linear","weight":0.5}]})"));
  }
  families.push_back(make_family("ode-flow", R"({"field":{"kind":"nth-derivative-zero","dimension":4}})"));

  Rng rng(mix_seed(opts.seed, 4));
  int violations = 0;
  int counted = 0;
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const ParametricFamily& f = families[static_cast<std::size_t>(trial) % families.size()];
    const ComplexVector v = uniform_complex_ball(f.param_dim(), rng);
    const AnalyticFunction h = f.slice(v);
    const ZeroCountResult z = slice_zero_count(f, h);
    if (!z.count) continue;
    ++counted;
    const LogSups sups = estimate_log_sups(h, f.disk_radius());
    const double bound = jensen_zero_bound(sups.outer, sups.inner, f.disk_radius());
    if (*z.count > bound) ++violations;
    if (bound > 0) worst_ratio = std::max(worst_ratio, *z.count / bound);
  }
  return {violations == 0 && counted >= 900, std::to_string(violations) + " violations over " + std::to_string(counted) +
                                                  " counted slices, max count/bound " + fmt(worst_ratio)};
}

// 5. Picard contraction, modulus, guard and agreement with Dormand-Prince.
Outcome picard_regime(const VerifyOptions& opts) {
  const int d = 3;
  const Ellipsoid e{1.0, Ellipsoid::theorem_a_budget(d), d};
  std::vector<double> ratio(500), modulus(500), guard(500), diff(500);
  parallel_for(500, opts.threads, [&](std::size_t i) {
    const PolarSystem sys = polar_reduce(sample_ellipsoid(e, mix_seed(opts.seed, 5, i)));
    guard[i] = denominator_guard(sys);
    for (Complex w : {Complex(0.75, 0.0), std::polar(0.75, kPi / 3.0), Complex(-0.3, 0.6)}) {
      const Trajectory p = picard_solve(sys, w);
      const Trajectory r = rk_solve(sys, w);
      ratio[i] = std::max(ratio[i], p.max_contraction_ratio);
      modulus[i] = std::max(modulus[i], p.sup_modulus());
      for (std::size_t j = 0; j < p.values.size(); ++j) diff[i] = std::max(diff[i], std::abs(p.values[j] - r.values[j]));
    }
  });
  const double max_ratio = *std::max_element(ratio.begin(), ratio.end());
  const double max_mod = *std::max_element(modulus.begin(), modulus.end());
  const double min_guard = *std::min_element(guard.begin(), guard.end());
  const double max_diff = *std::max_element(diff.begin(), diff.end());
  const bool ok = max_ratio < 0.55 && max_mod <= 1.0 + 1e-9 && min_guard > 0.5 && max_diff < 1e-8;
  return {ok, "max ratio " + fmt(max_ratio) + " (< 0.55), sup|r| " + fmt(max_mod, 6) + " (<= 1 + 1e-9), min guard " +
                  fmt(min_guard, 6) + " (> 1/2), Picard-RK " + fmt(max_diff) + " (< 1e-8)"};
}

// 6. Tail of the complex count for d = 3 fields.
Outcome theorem_a_properties(const VerifyOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  TheoremAConfig cfg;
  cfg.degree = 3;
  cfg.samples = 10000;
  RunOptions run;
  run.seed = mix_seed(opts.seed, 6);
  run.threads = opts.threads;
  const TheoremAResult r = run_theorem_a(cfg, run);
  const auto& f = r.complex_tail.tail_fractions;
  bool monotone = true;
  for (std::size_t i = 1; i < f.size(); ++i) monotone = monotone && f[i] <= f[i - 1];
  std::size_t order_violations = 0;
  std::size_t incomplete = 0;
  for (const FieldRecord& rec : r.records) {
    if (!rec.real_cycles || !rec.complex_zero_count) {
      if (!rec.is_center) ++incomplete;
      continue;
    }
    if (*rec.real_cycles > *rec.complex_zero_count) ++order_violations;
  }
  const TailTable& t = r.complex_tail;
  const bool decay = !t.insufficient_data && t.fit_c2 > 0.0 && t.c2_ci_low > 0.0;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool ok = monotone && decay && order_violations == 0 && incomplete == 0;
  return {ok, std::string("tail ") + (monotone ? "nonincreasing" : "NOT monotone") + ", c2 " + fmt(t.fit_c2) +
                  " CI [" + fmt(t.c2_ci_low) + ", " + fmt(t.c2_ci_high) + "], order violations " +
                  std::to_string(order_violations) + ", samples without both counts " + std::to_string(incomplete) +
                  ", " + fmt(secs) + " s"};
}

// 7. Mean equals the integral of the nonincreasing rearrangement.
Outcome expectation_identity(const VerifyOptions& opts) {
  Rng rng(mix_seed(opts.seed, 7));
  std::uniform_int_distribution<int> length(1, 2000);
  std::geometric_distribution<int> value(0.3);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> counts(static_cast<std::size_t>(length(rng)));
    for (int& c : counts) c = value(rng);
    const double mean = expectation_and_variance(counts).expectation;
    const double integral = rearrangement_integral(counts);
    worst = std::max(worst, std::abs(mean - integral) / std::max(std::abs(mean), 1e-300));
  }
  return {worst <= 1e-12, "max relative difference " + fmt(worst) + " (<= 1e-12)"};
}

// 8. Kac roots concentrate in the annulus and have uniform arguments.
Outcome kac_concentration(const VerifyOptions& opts) {
  KacConfig cfg;
  RunOptions run;
  run.seed = mix_seed(opts.seed, 8);
  run.threads = opts.threads;
  const KacRunResult r = run_kac(cfg, run);
  const bool ok = r.result.mean_fraction >= 0.85 && r.conservation_ok && r.uniformity.p_value > 0.01;
  return {ok, "mean fraction " + fmt(r.result.mean_fraction) + " (>= 0.85), conservation " +
                  (r.conservation_ok ? "exact" : "VIOLATED") + ", KS p " + fmt(r.uniformity.p_value) + " (> 0.01)"};
}

// 9. z^k P(1/z) swaps inside and outside counts of the inverted annulus.
Outcome reversal_duality(const VerifyOptions& opts) {
  Rng rng(mix_seed(opts.seed, 9));
  std::uniform_int_distribution<int> degree_dist(2, 200);
  std::uniform_real_distribution<double> eps_dist(0.02, 0.3);
  int exact = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int k = degree_dist(rng);
    const ComplexVector v = uniform_complex_ball(static_cast<std::size_t>(k) + 1, rng);
    const ComplexPoly p(v);
    const Annulus a = Annulus::symmetric(eps_dist(rng));
    const AnnulusCounts forward = annulus_counts_by_winding(p, a);
    const AnnulusCounts backward = annulus_counts_by_winding(p.reversed(), a.inverted());
    if (forward.inside == backward.outside && forward.outside == backward.inside && forward.annulus == backward.annulus &&
        forward.total() == k) {
      ++exact;
    }
  }
  return {exact == 100, std::to_string(exact) + "/100 exact"};
}

// 10. Normalised sums against the standard normal.
Outcome clt_calibration(const VerifyOptions& opts) {
  std::ostringstream detail;
  bool ok = true;
  const std::pair<const char*, const char*> runs[] = {
      {"bernoulli", R"({"kind":"repeat","family":"bernoulli"})"},
      {"hyperplane sections", R"({"kind":"hyperplane-sections"})"}};
  std::uint64_t stream = 0;
  for (const auto& [label, sequence] : runs) {
    CltConfig cfg;
    cfg.sequence = sequence;
    RunOptions run;
    run.seed = mix_seed(opts.seed, 10, stream++);
    run.threads = opts.threads;
    try {
      const CltReport r = run_clt(cfg, run);
      ok = ok && r.ks_vs_normal < 0.15;
      detail << label << ": KS " << fmt(r.ks_vs_normal) << " (< 0.15)  ";
    } catch (const Error& e) {
      ok = false;
      detail << label << ": " << e.what() << "  ";
    }
  }
  return {ok, detail.str()};
}

std::map<std::string, std::string> collect_outputs(const std::filesystem::path& root) {
  std::map<std::string, std::string> files;
  if (!std::filesystem::is_directory(root)) return files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    const bool wanted = name.ends_with(".jsonl") || name.ends_with(".jsonl.gz") || name.ends_with(".csv");
    if (!wanted) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    files[std::filesystem::relative(entry.path(), root).string()] = ss.str();
  }
  return files;
}

int dispatch(std::vector<std::string> args, std::string& errors) {
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = parse_and_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  errors = err.str().substr(0, err.str().find('\n'));
  return code;
}

// 11. Sub-runs at 1 and 8 threads write identical records and tables.
Outcome reproducibility(const VerifyOptions& opts, const std::filesystem::path& scratch) {
  const std::string seed = std::to_string(mix_seed(opts.seed, 11));
  std::ostringstream detail;
  bool ok = true;
  std::size_t compared = 0;
  for (const char* threads : {"1", "8"}) {
    const std::filesystem::path dir = scratch / (std::string("threads-") + threads);
    std::filesystem::remove_all(dir);
    const std::vector<std::vector<std::string>> runs = {
        {"theorem-a", "--samples", "48", "--bootstrap", "50"},
        {"tail", "--samples", "400", "--bootstrap", "50"},
        {"tail", "--samples", "200", "--gzip", "--family", "ode-flow", "--family-params",
         R"({"field":{"kind":"random-linear","dimension":3}})"},
        {"slln", "--samples", "300"},
        {"clt", "--n", "20", "--samples", "60", "--calibration", "300"},
        {"kac", "--k", "60", "--samples", "12"}};
    for (const auto& run : runs) {
      std::vector<std::string> args = {"cycle-census"};
      args.insert(args.end(), run.begin(), run.end());
      const std::string sub = (dir / (run[0] + "-" + std::to_string(&run - runs.data()))).string();
      args.insert(args.end(), {"--seed", seed, "--threads", threads, "--out", sub});
      std::string errors;
      const int code = dispatch(args, errors);
      if (code != kExitOk) {
        ok = false;
        detail << run[0] << " exited " << code << " at " << threads << " threads (" << errors << "); ";
      }
    }
  }
  const auto one = collect_outputs(scratch / "threads-1");
  const auto eight = collect_outputs(scratch / "threads-8");
  if (one.size() != eight.size()) ok = false;
  for (const auto& [name, content] : one) {
    auto it = eight.find(name);
    if (it == eight.end() || it->second != content) {
      ok = false;
      detail << name << " differs; ";
    } else {
      ++compared;
    }
  }
  ok = ok && compared >= 10;
  detail << compared << " JSONL/CSV files byte-identical across 1 and 8 threads";
  return {ok, detail.str()};
}

}  // namespace

std::string format_result_line(const CriterionResult& r) {
  char head[32];
  std::snprintf(head, sizeof head, "%s [%2d] ", r.passed ? "PASS" : "FAIL", r.id);
  return std::string(head) + r.title + ": " + r.detail + " (" + fmt(r.seconds) + " s)";
}

std::vector<CriterionResult> run_verify_suite(const VerifyOptions& options,
                                              const std::function<void(const CriterionResult&)>& on_result) {
  std::filesystem::path scratch = options.scratch_dir;
  bool owns_scratch = false;
  if (scratch.empty()) {
    scratch = std::filesystem::temp_directory_path() /
              ("cycle-census-verify-" + std::to_string(::getpid()) + "-" + std::to_string(options.seed));
    owns_scratch = true;
  }

  using Check = std::function<Outcome(const VerifyOptions&)>;
  const std::vector<std::pair<std::string, Check>> checks = {
      {"exact displacement oracle", exact_displacement},
      {"rigid ground-truth cycle counts", rigid_ground_truth},
      {"argument-principle exactness", argument_principle},
      {"Jensen bound soundness", jensen_soundness},
      {"Picard regime checks", picard_regime},
      {"tail property suite (d = 3, 10^4 samples)", theorem_a_properties},
      {"expectation identity", expectation_identity},
      {"Kac concentration", kac_concentration},
      {"reversal duality", reversal_duality},
      {"CLT calibration", clt_calibration},
      {"reproducibility across thread counts",
       [&scratch](const VerifyOptions& o) { return reproducibility(o, scratch); }},
  };

  std::vector<CriterionResult> results;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end()) continue;
    CriterionResult r;
    r.id = id;
    r.title = checks[i].first;
    const auto start = std::chrono::steady_clock::now();
    try {
      const Outcome o = checks[i].second(options);
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("threw: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (on_result) on_result(r);
    results.push_back(std::move(r));
  }
  if (owns_scratch) {
    std::error_code ec;
    std::filesystem::remove_all(scratch, ec);
  }
  return results;
}

}  // namespace cycle_census::cli
