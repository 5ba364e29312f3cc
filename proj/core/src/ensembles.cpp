#include "cycle_census/ensembles.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "cycle_census/error.hpp"
#include "cycle_census/family_registry.hpp"
#include "cycle_census/output.hpp"
#include "cycle_census/sampling.hpp"

namespace cycle_census {

using Json = nlohmann::ordered_json;

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::size_t>(n, 1024))));
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = std::numeric_limits<std::size_t>::max();
  std::exception_ptr error;
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("CYCLE_CENSUS_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 4096) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

Json optional_int(const std::optional<int>& v) { return v ? Json(*v) : Json(nullptr); }
Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void write_text(const RunOptions& opts, const std::string& name, const std::string& content) {
  if (opts.out_dir.empty()) return;
  write_file_atomic(opts.out_dir / name, content);
}

void write_jsonl(const RunOptions& opts, const std::string& stem, const std::string& content) {
  if (opts.out_dir.empty()) return;
  if (opts.gzip) write_gzip_atomic(opts.out_dir / (stem + ".jsonl.gz"), content);
  else write_file_atomic(opts.out_dir / (stem + ".jsonl"), content);
}

std::string tail_csv(const TailTable& t) {
  CsvTable csv({"T", "fraction", "count"});
  for (std::size_t i = 0; i < t.thresholds.size(); ++i) {
    csv.add_row({std::to_string(t.thresholds[i]), format_double(t.tail_fractions[i]), std::to_string(t.exceedances[i])});
  }
  return csv.str();
}

Json tail_json(const TailTable& t) {
  Json j;
  j["thresholds"] = t.thresholds;
  j["tail_fractions"] = t.tail_fractions;
  j["exceedances"] = t.exceedances;
  j["sample_count"] = t.sample_count;
  j["degenerate_count"] = t.degenerate_count;
  j["fit_c1"] = finite_or_null(t.fit_c1);
  j["fit_c2"] = finite_or_null(t.fit_c2);
  j["fit_r2"] = finite_or_null(t.fit_r2);
  j["insufficient_data"] = t.insufficient_data;
  j["c2_ci95"] = {finite_or_null(t.c2_ci_low), finite_or_null(t.c2_ci_high)};
  j["inclusion_rule"] = t.inclusion_rule;
  return j;
}

Json stats_json(const SummaryStats& s) {
  Json j;
  j["expectation"] = s.expectation;
  j["variance"] = s.variance;
  j["standard_error"] = s.standard_error;
  j["sample_count"] = s.sample_count;
  j["rearrangement_expectation"] = s.rearrangement_expectation;
  return j;
}

SummaryStats stats_or_empty(const std::vector<int>& counts) {
  if (counts.empty()) return SummaryStats{};
  return expectation_and_variance(counts);
}

void attach_bootstrap(TailTable& tail, std::span<const std::optional<int>> counts, std::size_t resamples,
                      std::uint64_t seed) {
  if (resamples == 0 || tail.insufficient_data) return;
  const auto [lo, hi] = bootstrap_decay_ci(counts, tail.thresholds, resamples, seed);
  tail.c2_ci_low = lo;
  tail.c2_ci_high = hi;
}

std::string timing_json(const std::vector<double>& times, double total) {
  Json j;
  j["total_seconds"] = total;
  j["per_sample_seconds"] = times;
  return j.dump(1);
}

FieldRecord count_field(const PlanarField& field, std::size_t index, std::uint64_t seed, double K,
                        const SolverConfig& solver, double budget) {
  FieldRecord r;
  r.sample_index = index;
  r.seed = seed;
  r.degree = field.degree();
  r.param_norm = field.norm();
  const auto start = std::chrono::steady_clock::now();
  try {
    const CycleCount c = count_limit_cycles(field, K, solver, budget);
    r.real_cycles = c.real_cycles;
    r.complex_zero_count = c.complex_zero_count;
    r.tangential_flags = c.tangential_flags;
    r.is_center = c.is_center;
    r.cycle_radii = c.cycle_radii;
    r.degenerate = !c.is_center && !c.complex_zero_count.has_value();
  } catch (const Error& e) {
    r.solver_failure = true;
    r.failure = e.what();
  }
  r.wall_time = seconds_since(start);
  return r;
}

FamilyRecord count_family(const ParametricFamily& family, std::span<const Complex> v, std::size_t index,
                          std::uint64_t seed, std::size_t member) {
  FamilyRecord r;
  r.sample_index = index;
  r.seed = seed;
  r.member = member;
  r.param_norm = euclidean_norm(v);
  const auto start = std::chrono::steady_clock::now();
  try {
    const ZeroCountResult z = family_zero_count(family, v);
    r.zero_count = z.count;
    r.degenerate = z.is_degenerate();
    r.contour_attempts = z.contour_attempts;
  } catch (const Error& e) {
    r.boundary_failure = e.code() == ErrorCode::kPersistentBoundaryZero;
    r.failure = e.what();
  }
  r.wall_time = seconds_since(start);
  return r;
}

FamilyRecord draw_family_sample(const ParametricFamily& family, std::uint64_t seed, std::size_t index,
                                std::size_t member) {
  Rng rng(seed);
  const ComplexVector v = uniform_complex_ball(family.param_dim(), rng);
  return count_family(family, v, index, seed, member);
}

bool usable(const FamilyRecord& r) { return r.zero_count.has_value(); }

}  // namespace

std::string field_record_json(const FieldRecord& r) {
  Json j;
  j["sample_index"] = r.sample_index;
  j["seed"] = r.seed;
  j["degree"] = r.degree;
  j["param_norm"] = r.param_norm;
  j["real_cycles"] = optional_int(r.real_cycles);
  j["complex_zero_count"] = optional_int(r.complex_zero_count);
  j["tangential_flags"] = r.tangential_flags;
  j["cycle_radii"] = r.cycle_radii;
  j["flags"] = {{"center", r.is_center}, {"degenerate", r.degenerate}, {"solver_failure", r.solver_failure}};
  if (!r.failure.empty()) j["failure"] = r.failure;
  return j.dump();
}

std::string family_record_json(const FamilyRecord& r) {
  Json j;
  j["sample_index"] = r.sample_index;
  j["seed"] = r.seed;
  j["member"] = r.member;
  j["param_norm"] = r.param_norm;
  j["zero_count"] = optional_int(r.zero_count);
  j["contour_attempts"] = r.contour_attempts;
  j["flags"] = {{"degenerate", r.degenerate}, {"boundary_failure", r.boundary_failure},
                {"solver_failure", !r.failure.empty() && !r.boundary_failure}};
  if (!r.failure.empty()) j["failure"] = r.failure;
  return j.dump();
}

double TheoremAConfig::effective_budget() const {
  return norm_budget > 0.0 ? norm_budget : Ellipsoid::theorem_a_budget(degree);
}

TheoremAResult run_theorem_a(const TheoremAConfig& cfg, const RunOptions& opts) {
  if (cfg.samples < 1) throw Error(ErrorCode::kInvalidArgument, "theorem-a needs at least one sample");
  const double budget = cfg.effective_budget();
  if (budget > Ellipsoid::theorem_a_budget(cfg.degree) * (1.0 + 1e-12)) {
    throw Error(ErrorCode::kInvalidArgument, "N must not exceed 1/(192 pi d^2) = " +
                                                 format_double(Ellipsoid::theorem_a_budget(cfg.degree)));
  }
  const Ellipsoid ellipsoid{1.0, budget, cfg.degree};
  const auto start = std::chrono::steady_clock::now();

  TheoremAResult result;
  result.records.resize(cfg.samples);
  parallel_for(cfg.samples, opts.threads, [&](std::size_t i) {
    const std::uint64_t seed = mix_seed(opts.seed, i);
    result.records[i] = count_field(sample_ellipsoid(ellipsoid, seed), i, seed, cfg.K, cfg.solver, budget);
  });

  std::vector<std::optional<int>> complex_counts, real_counts;
  std::vector<int> complex_valid, real_valid;
  std::size_t zero_cycles = 0;
  for (const FieldRecord& r : result.records) {
    if (r.solver_failure) {
      ++result.failures;
      continue;
    }
    if (r.is_center) ++result.centers;
    complex_counts.push_back(r.complex_zero_count);
    real_counts.push_back(r.real_cycles);
    if (r.complex_zero_count) complex_valid.push_back(*r.complex_zero_count);
    if (r.real_cycles) {
      real_valid.push_back(*r.real_cycles);
      if (*r.real_cycles == 0) ++zero_cycles;
    }
    if (r.real_cycles && r.complex_zero_count && *r.real_cycles > *r.complex_zero_count) ++result.order_violations;
  }
  if (complex_counts.empty()) {
    throw Error(ErrorCode::kAllSamplesFailed, "every theorem-a sample failed; first failure: " + result.records[0].failure);
  }
  result.complex_tail = empirical_tail(complex_counts, cfg.thresholds);
  result.real_tail = empirical_tail(real_counts, cfg.thresholds);
  attach_bootstrap(result.complex_tail, complex_counts, cfg.bootstrap_resamples, mix_seed(opts.seed, 0xB0075ULL, 1));
  attach_bootstrap(result.real_tail, real_counts, cfg.bootstrap_resamples, mix_seed(opts.seed, 0xB0075ULL, 2));
  result.complex_stats = stats_or_empty(complex_valid);
  result.real_stats = stats_or_empty(real_valid);
  result.fraction_zero_cycles =
      real_valid.empty() ? 0.0 : static_cast<double>(zero_cycles) / static_cast<double>(real_valid.size());

  if (!opts.out_dir.empty()) {
    std::string jsonl;
    std::vector<double> times;
    for (const FieldRecord& r : result.records) {
      jsonl += field_record_json(r) + "\n";
      times.push_back(r.wall_time);
    }
    write_jsonl(opts, "records", jsonl);
    write_text(opts, "tail.csv", tail_csv(result.complex_tail));
    write_text(opts, "tail-real.csv", tail_csv(result.real_tail));
    CsvTable moments({"k", "E", "D"});
    moments.add_row({std::to_string(cfg.degree), format_double(result.complex_stats.expectation),
                     format_double(result.complex_stats.variance)});
    write_text(opts, "moments.csv", moments.str());
    Json summary;
    summary["experiment"] = "theorem_a";
    summary["degree"] = cfg.degree;
    summary["norm_budget"] = budget;
    summary["samples"] = cfg.samples;
    summary["failures"] = result.failures;
    summary["centers"] = result.centers;
    summary["order_violations"] = result.order_violations;
    summary["fraction_zero_cycles"] = result.fraction_zero_cycles;
    summary["complex_tail"] = tail_json(result.complex_tail);
    summary["real_tail"] = tail_json(result.real_tail);
    summary["complex_moments"] = stats_json(result.complex_stats);
    summary["real_moments"] = stats_json(result.real_stats);
    summary["moment_rule"] = "centers, degenerate counts and solver failures excluded";
    write_text(opts, "summary.json", summary.dump(2) + "\n");
    write_text(opts, "plot.gp",
               plot_script("theorem-a", {{"tail.csv", "P(complex count >= T)", 1, 2, true},
                                         {"tail-real.csv", "P(real cycles >= T)", 1, 2, true}}));
    write_text(opts, "timing.json", timing_json(times, seconds_since(start)));
  }
  return result;
}

std::vector<RigidRecord> run_rigid_fields(const RigidConfig& cfg, const RunOptions& opts) {
  if (cfg.roots < 1) throw Error(ErrorCode::kInvalidArgument, "rigid fields need at least one root");
  if (cfg.root_max - cfg.root_min < cfg.min_separation * (cfg.roots - 1)) {
    throw Error(ErrorCode::kInvalidArgument, "root interval too short for the requested separation");
  }
  const int min_degree = 2 * cfg.roots + 1;
  if (cfg.degree != 0 && cfg.degree < min_degree) {
    throw Error(ErrorCode::kInvalidArgument, "rigid field degree must be >= 2l + 1");
  }
  std::vector<RigidRecord> out(cfg.samples);
  parallel_for(cfg.samples, opts.threads, [&](std::size_t i) {
    const std::uint64_t seed = mix_seed(opts.seed, i);
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // Roots: sorted uniform gaps above the minimum separation.
    std::vector<double> roots;
    const double slack = (cfg.root_max - cfg.root_min) - cfg.min_separation * (cfg.roots - 1);
    std::vector<double> offsets(static_cast<std::size_t>(cfg.roots));
    for (double& o : offsets) o = unit(rng) * slack;
    std::sort(offsets.begin(), offsets.end());
    for (int j = 0; j < cfg.roots; ++j) {
      roots.push_back(cfg.root_min + offsets[static_cast<std::size_t>(j)] + cfg.min_separation * j);
    }
    const double scale = std::exp(std::log(cfg.scale_min) + unit(rng) * (std::log(cfg.scale_max) - std::log(cfg.scale_min)));
    int degree = cfg.degree;
    if (degree == 0) degree = min_degree + static_cast<int>(unit(rng) * (std::max(9, min_degree) - min_degree + 1));
    degree = std::min(degree, std::max(9, min_degree));
    const PlanarField field = rigid_field(poly_from_real_roots(roots, scale), degree);
    RigidRecord rec;
    rec.record = count_field(field, i, seed, cfg.K, cfg.solver, 0.0);
    rec.roots = roots;
    rec.scale = scale;
    out[i] = std::move(rec);
  });
  if (!opts.out_dir.empty()) {
    std::string jsonl;
    for (const RigidRecord& r : out) jsonl += field_record_json(r.record) + "\n";
    write_jsonl(opts, "rigid-records", jsonl);
  }
  return out;
}

TailResult run_tail(const TailConfig& cfg, const RunOptions& opts) {
  if (cfg.samples < 1) throw Error(ErrorCode::kInvalidArgument, "tail run needs at least one sample");
  const ParametricFamily family = make_family(cfg.family, cfg.family_params);
  const auto start = std::chrono::steady_clock::now();
  TailResult result;
  result.records.resize(cfg.samples);
  parallel_for(cfg.samples, opts.threads, [&](std::size_t i) {
    result.records[i] = draw_family_sample(family, mix_seed(opts.seed, i), i, 0);
  });
  std::vector<std::optional<int>> counts;
  std::vector<int> valid;
  for (const FamilyRecord& r : result.records) {
    if (!r.failure.empty()) {
      ++result.failures;
      continue;
    }
    counts.push_back(r.zero_count);
    if (r.zero_count) valid.push_back(*r.zero_count);
  }
  if (counts.empty()) throw Error(ErrorCode::kAllSamplesFailed, "every tail sample failed: " + result.records[0].failure);
  result.tail = empirical_tail(counts, cfg.thresholds);
  attach_bootstrap(result.tail, counts, cfg.bootstrap_resamples, mix_seed(opts.seed, 0xB0075ULL, 3));
  result.stats = stats_or_empty(valid);

  if (!opts.out_dir.empty()) {
    std::string jsonl;
    std::vector<double> times;
    for (const FamilyRecord& r : result.records) {
      jsonl += family_record_json(r) + "\n";
      times.push_back(r.wall_time);
    }
    write_jsonl(opts, "records", jsonl);
    write_text(opts, "tail.csv", tail_csv(result.tail));
    CsvTable moments({"k", "E", "D"});
    moments.add_row({"1", format_double(result.stats.expectation), format_double(result.stats.variance)});
    write_text(opts, "moments.csv", moments.str());
    Json summary;
    summary["experiment"] = "theorem_b_tail";
    summary["family"] = cfg.family;
    summary["family_params"] = Json::parse(cfg.family_params.empty() ? "{}" : cfg.family_params);
    summary["bound_M"] = family.bound_M();
    summary["param_dim"] = family.param_dim();
    summary["samples"] = cfg.samples;
    summary["failures"] = result.failures;
    summary["tail"] = tail_json(result.tail);
    summary["moments"] = stats_json(result.stats);
    summary["moment_rule"] = "degenerate slices and boundary failures excluded";
    write_text(opts, "summary.json", summary.dump(2) + "\n");
    write_text(opts, "plot.gp", plot_script("tail", {{"tail.csv", "P(count >= T)", 1, 2, true}}));
    write_text(opts, "timing.json", timing_json(times, seconds_since(start)));
  }
  return result;
}

SllnResult run_slln(const SllnConfig& cfg, const RunOptions& opts) {
  if (cfg.horizon < 4) throw Error(ErrorCode::kInvalidArgument, "SLLN horizon must be >= 4");
  const FamilySequence seq = make_sequence(cfg.sequence);
  SllnResult result;
  result.records.resize(cfg.horizon);
  parallel_for(cfg.horizon, opts.threads, [&](std::size_t i) {
    const std::size_t k = i + 1;
    const ParametricFamily family = seq.member(k);
    result.records[i] = draw_family_sample(family, mix_seed(opts.seed, k), i, k);
  });

  std::vector<std::optional<int>> counts;
  std::vector<int> valid;
  long long sum = 0;
  for (const FamilyRecord& r : result.records) {
    if (!usable(r)) {
      if (r.degenerate) counts.push_back(std::nullopt);
      continue;
    }
    counts.push_back(r.zero_count);
    valid.push_back(*r.zero_count);
    sum += *r.zero_count;
    result.running_means.push_back(static_cast<double>(sum) / static_cast<double>(valid.size()));
  }
  if (valid.empty()) throw Error(ErrorCode::kAllSamplesFailed, "no usable SLLN draws");
  const SummaryStats stats = expectation_and_variance(valid);
  result.mean = stats.expectation;
  result.standard_error = stats.standard_error;
  const std::size_t q = result.running_means.size() - result.running_means.size() / 4;
  const auto [lo, hi] = std::minmax_element(result.running_means.begin() + static_cast<std::ptrdiff_t>(q),
                                            result.running_means.end());
  result.last_quarter_range = *hi - *lo;
  result.stabilized = result.last_quarter_range < 3.0 * result.standard_error;

  result.tail = empirical_tail(counts, cfg.thresholds);
  if (!result.tail.insufficient_data) {
    double env = 0.0;
    for (int t = 1; t < 10000; ++t) {
      const double term = std::min(1.0, result.tail.fit_c1 * std::exp(-result.tail.fit_c2 * t));
      env += term;
      if (term < 1e-15) break;
    }
    result.envelope = env;
  } else {
    result.envelope = std::numeric_limits<double>::quiet_NaN();
  }
  const ParametricFamily first = seq.member(1);
  const double scale = std::log(first.bound_M()) * std::log(static_cast<double>(first.param_dim()) + 1.0);
  result.envelope_constant = result.envelope / scale;
  result.within_envelope = std::isfinite(result.envelope) && result.mean <= result.envelope + 3.0 * result.standard_error;

  if (!opts.out_dir.empty()) {
    std::string jsonl;
    for (const FamilyRecord& r : result.records) jsonl += family_record_json(r) + "\n";
    write_jsonl(opts, "records", jsonl);
    CsvTable running({"n", "running_mean"});
    for (std::size_t i = 0; i < result.running_means.size(); ++i) {
      running.add_row({std::to_string(i + 1), format_double(result.running_means[i])});
    }
    write_text(opts, "running-mean.csv", running.str());
    write_text(opts, "tail.csv", tail_csv(result.tail));
    Json summary;
    summary["experiment"] = "slln";
    summary["sequence"] = Json::parse(seq.description);
    summary["horizon"] = cfg.horizon;
    summary["mean"] = result.mean;
    summary["standard_error"] = result.standard_error;
    summary["last_quarter_range"] = result.last_quarter_range;
    summary["stabilized"] = result.stabilized;
    summary["tail"] = tail_json(result.tail);
    summary["envelope"] = finite_or_null(result.envelope);
    summary["envelope_constant"] = finite_or_null(result.envelope_constant);
    summary["within_envelope"] = result.within_envelope;
    write_text(opts, "summary.json", summary.dump(2) + "\n");
    write_text(opts, "plot.gp", plot_script("slln", {{"running-mean.csv", "running mean", 1, 2, false}}));
  }
  return result;
}

namespace {

// A usable count for member k; degenerate or failed draws are redrawn from a
// derived stream (they form a null set of parameters).
int draw_count(const ParametricFamily& family, std::uint64_t seed) {
  for (std::uint64_t attempt = 0; attempt < 16; ++attempt) {
    const FamilyRecord r = draw_family_sample(family, attempt == 0 ? seed : mix_seed(seed, attempt), 0, 0);
    if (r.zero_count) return *r.zero_count;
  }
  throw Error(ErrorCode::kSolverFailure, "family '" + family.name() + "': 16 consecutive unusable draws");
}

}  // namespace

CltReport run_clt(const CltConfig& cfg, const RunOptions& opts) {
  if (cfg.n < 1 || cfg.repetitions < 2 || cfg.calibration_draws < 2) {
    throw Error(ErrorCode::kInvalidArgument, "CLT needs n >= 1, repetitions >= 2, calibration draws >= 2");
  }
  const FamilySequence seq = make_sequence(cfg.sequence);
  std::vector<ParametricFamily> members;
  members.reserve(cfg.n);
  for (std::size_t k = 1; k <= cfg.n; ++k) members.push_back(seq.member(k));

  CltReport report;
  report.n = cfg.n;
  report.means.assign(cfg.n, 0.0);
  report.variances.assign(cfg.n, 0.0);
  const std::uint64_t calibration_seed = mix_seed(opts.seed, 0xCA11B0ULL);
  parallel_for(cfg.n, opts.threads, [&](std::size_t i) {
    std::vector<int> counts(cfg.calibration_draws);
    for (std::size_t j = 0; j < cfg.calibration_draws; ++j) {
      counts[j] = draw_count(members[i], mix_seed(calibration_seed, i, j));
    }
    const SummaryStats s = expectation_and_variance(counts);
    report.means[i] = s.expectation;
    report.variances[i] = s.variance;
  });
  for (std::size_t i = 0; i < cfg.n; ++i) {
    if (report.variances[i] < 1e-6) {
      throw Error(ErrorCode::kDegenerateVariance, "calibrated D(N_k) = " + format_double(report.variances[i]) +
                                                      " < 1e-6 at k = " + std::to_string(i + 1));
    }
  }
  if (cfg.check_separation) {
    const double s_prime = 0.5 * members.front().disk_radius();
    report.separation = check_separation_conditions(members, cfg.delta, s_prime);
    for (std::size_t i = 0; i < report.separation.size(); ++i) {
      if (!report.separation[i].first || !report.separation[i].second) {
        throw Error(ErrorCode::kSeparationViolated,
                    "separation conditions fail at k = " + std::to_string(i + 1) + " (a = " +
                        (report.separation[i].first ? "true" : "false") + ", b = " +
                        (report.separation[i].second ? "true" : "false") + ")");
      }
    }
  }
  double b2 = 0.0;
  for (double v : report.variances) b2 += v;
  report.B_n = std::sqrt(b2);

  const std::uint64_t test_seed = mix_seed(opts.seed, 0x7E57ULL);
  report.normalized_sums.assign(cfg.repetitions, 0.0);
  parallel_for(cfg.repetitions, opts.threads, [&](std::size_t rep) {
    double total = 0.0;
    for (std::size_t i = 0; i < cfg.n; ++i) {
      total += draw_count(members[i], mix_seed(test_seed, rep, i)) - report.means[i];
    }
    report.normalized_sums[rep] = total / report.B_n;
  });
  const KsResult ks = ks_standard_normal(report.normalized_sums);
  report.ks_vs_normal = ks.statistic;
  report.ks_p_value = ks.p_value;

  if (!opts.out_dir.empty()) {
    CsvTable clt({"repetition", "normalized_sum"});
    for (std::size_t r = 0; r < report.normalized_sums.size(); ++r) {
      clt.add_row({std::to_string(r), format_double(report.normalized_sums[r])});
    }
    write_text(opts, "clt.csv", clt.str());
    CsvTable moments({"k", "E", "D"});
    for (std::size_t i = 0; i < cfg.n; ++i) {
      moments.add_row({std::to_string(i + 1), format_double(report.means[i]), format_double(report.variances[i])});
    }
    write_text(opts, "moments.csv", moments.str());
    Json summary;
    summary["experiment"] = "clt";
    summary["sequence"] = Json::parse(seq.description);
    summary["n"] = cfg.n;
    summary["repetitions"] = cfg.repetitions;
    summary["calibration_draws"] = cfg.calibration_draws;
    summary["B_n"] = report.B_n;
    summary["ks_vs_normal"] = report.ks_vs_normal;
    summary["ks_p_value"] = report.ks_p_value;
    summary["separation_checked"] = cfg.check_separation;
    write_text(opts, "summary.json", summary.dump(2) + "\n");
    write_text(opts, "plot.gp", plot_script("clt", {{"clt.csv", "normalized sums", 1, 2, false},
                                                    {"moments.csv", "calibrated E(N_k)", 1, 2, false}}));
  }
  return report;
}

KacRunResult run_kac(const KacConfig& cfg, const RunOptions& opts) {
  if (cfg.samples < 1) throw Error(ErrorCode::kInvalidArgument, "Kac run needs at least one sample");
  std::vector<KacSample> samples(cfg.samples);
  parallel_for(cfg.samples, opts.threads, [&](std::size_t i) { samples[i] = kac_sample(cfg.k, cfg.epsilon, opts.seed, i); });

  KacRunResult out;
  double fraction_sum = 0.0;
  for (const KacSample& s : samples) {
    fraction_sum += static_cast<double>(s.counts.annulus) / static_cast<double>(cfg.k);
    out.result.arguments.insert(out.result.arguments.end(), s.arguments.begin(), s.arguments.end());
    out.result.per_sample.push_back(s.counts);
    if (s.counts.total() != cfg.k) out.conservation_ok = false;
  }
  out.result.mean_fraction = fraction_sum / static_cast<double>(cfg.samples);
  out.uniformity = uniformity_test(out.result.arguments);

  if (!opts.out_dir.empty()) {
    CsvTable kac({"k", "sample_index", "annulus_count", "inside_count", "outside_count"});
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const AnnulusCounts& c = samples[i].counts;
      kac.add_row({std::to_string(cfg.k), std::to_string(i), std::to_string(c.annulus), std::to_string(c.inside),
                   std::to_string(c.outside)});
    }
    write_text(opts, "kac.csv", kac.str());
    CsvTable angles({"angle"});
    for (double a : out.result.arguments) angles.add_row({format_double(a)});
    write_text(opts, "angles.csv", angles.str());
    Json summary;
    summary["experiment"] = "kac";
    summary["k"] = cfg.k;
    summary["samples"] = cfg.samples;
    summary["epsilon"] = cfg.epsilon;
    summary["mean_fraction"] = out.result.mean_fraction;
    summary["conservation_ok"] = out.conservation_ok;
    summary["ks_statistic"] = out.uniformity.statistic;
    summary["ks_p_value"] = out.uniformity.p_value;
    write_text(opts, "summary.json", summary.dump(2) + "\n");
    write_text(opts, "plot.gp", plot_script("kac", {{"kac.csv", "annulus count per sample", 2, 3, false}}));
  }
  return out;
}

}  // namespace cycle_census
