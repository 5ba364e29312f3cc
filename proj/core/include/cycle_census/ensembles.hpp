#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cycle_census/poincare.hpp"
#include "cycle_census/random_poly.hpp"
#include "cycle_census/stats.hpp"

namespace cycle_census {

inline constexpr std::uint64_t kDefaultSeed = 1729;

// Runs body(i) for i in [0, n) on `threads` workers pulling indices from a
// shared counter. The first exception (lowest index) is rethrown after all
// workers stop. Results must be written by index for deterministic merges.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

// --threads fallback: CYCLE_CENSUS_THREADS, else hardware concurrency (>= 1).
unsigned default_thread_count();

struct RunOptions {
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 1;
  std::filesystem::path out_dir;  // empty: no files
  bool gzip = false;
};

// One sampled field.
struct FieldRecord {
  std::size_t sample_index = 0;
  std::uint64_t seed = 0;
  int degree = 0;
  double param_norm = 0.0;
  std::optional<int> real_cycles;
  std::optional<int> complex_zero_count;
  int tangential_flags = 0;
  bool is_center = false;
  bool solver_failure = false;
  bool degenerate = false;  // complex count returned the sentinel on a non-center
  std::string failure;
  std::vector<double> cycle_radii;
  double wall_time = 0.0;  // seconds; not part of the JSONL record
};

// One sampled family parameter.
struct FamilyRecord {
  std::size_t sample_index = 0;
  std::uint64_t seed = 0;
  std::size_t member = 0;  // sequence index k (0 for single-family runs)
  double param_norm = 0.0;
  std::optional<int> zero_count;  // empty: degenerate sentinel or failure
  bool degenerate = false;
  bool boundary_failure = false;
  int contour_attempts = 0;
  std::string failure;
  double wall_time = 0.0;
};

std::string field_record_json(const FieldRecord& r);
std::string family_record_json(const FamilyRecord& r);

struct TheoremAConfig {
  int degree = 3;
  double norm_budget = 0.0;  // <= 0: 1/(192 pi d^2)
  std::size_t samples = 10000;
  double K = 0.5;
  std::vector<int> thresholds = {0, 1, 2, 3, 4, 5, 6, 7, 8};
  SolverConfig solver;
  std::size_t bootstrap_resamples = 400;

  double effective_budget() const;
};

struct TheoremAResult {
  std::vector<FieldRecord> records;
  TailTable complex_tail;
  TailTable real_tail;
  SummaryStats complex_stats;
  SummaryStats real_stats;
  double fraction_zero_cycles = 0.0;
  std::size_t failures = 0;
  std::size_t centers = 0;
  std::size_t order_violations = 0;  // real_cycles > complex_zero_count
};

// Fields uniform in E(1, N); both counts per field. Throws AllSamplesFailed.
TheoremAResult run_theorem_a(const TheoremAConfig& cfg, const RunOptions& opts);

// Rigid systems with l random roots (as ground truth for cycle counting).
struct RigidConfig {
  int roots = 3;
  std::size_t samples = 20;
  int degree = 0;  // 0: uniform in [2l + 1, 9] per sample
  double root_min = 0.01;
  double root_max = 0.24;
  double min_separation = 0.03;
  double scale_min = 1e-2;
  double scale_max = 1e-1;
  double K = 0.5;
  SolverConfig solver;
};

struct RigidRecord {
  FieldRecord record;
  std::vector<double> roots;  // roots of f(u); cycles at sqrt(root)
  double scale = 0.0;
};

std::vector<RigidRecord> run_rigid_fields(const RigidConfig& cfg, const RunOptions& opts);

struct TailConfig {
  std::string family = "blaschke-hyperplane";
  std::string family_params =
      R"({"components":[{"kind":"linear","weight":0.6},{"kind":"blaschke","weight":0.7,"degree":3}]})";
  std::size_t samples = 10000;
  std::vector<int> thresholds = {0, 1, 2, 3, 4, 5, 6, 7, 8};
  std::size_t bootstrap_resamples = 400;
};

struct TailResult {
  std::vector<FamilyRecord> records;
  TailTable tail;
  SummaryStats stats;
  std::size_t failures = 0;
};

// Parameters uniform in the unit complex ball of the family.
TailResult run_tail(const TailConfig& cfg, const RunOptions& opts);

struct SllnConfig {
  std::string sequence = R"({"kind":"hyperplane-sections"})";
  std::size_t horizon = 2000;
  std::vector<int> thresholds = {0, 1, 2, 3, 4, 5, 6, 7, 8};
};

struct SllnResult {
  std::vector<FamilyRecord> records;
  std::vector<double> running_means;  // after each valid draw
  double mean = 0.0;
  double standard_error = 0.0;
  double last_quarter_range = 0.0;
  bool stabilized = false;  // last-quarter range < 3 standard errors
  TailTable tail;
  // sum_{T >= 1} min(1, c1 e^{-c2 T}) from the fitted tail, and the constant
  // C with envelope = C log M log(N + 1) for the first member.
  double envelope = 0.0;
  double envelope_constant = 0.0;
  bool within_envelope = false;  // mean <= envelope + 3 SE
};

SllnResult run_slln(const SllnConfig& cfg, const RunOptions& opts);

struct CltConfig {
  std::string sequence = R"({"kind":"repeat","family":"bernoulli"})";
  std::size_t n = 200;
  std::size_t repetitions = 500;
  std::size_t calibration_draws = 10000;
  double delta = 0.05;
  bool check_separation = true;
};

struct CltReport {
  std::size_t n = 0;
  double B_n = 0.0;
  std::vector<double> normalized_sums;
  double ks_vs_normal = 0.0;
  double ks_p_value = 0.0;
  std::vector<double> means;      // calibration E(N_k)
  std::vector<double> variances;  // calibration D(N_k)
  std::vector<std::pair<bool, bool>> separation;
};

// Throws DegenerateVariance when some calibrated D(N_k) < 1e-6 and
// SeparationViolated when the separation premise fails for some k.
CltReport run_clt(const CltConfig& cfg, const RunOptions& opts);

struct KacConfig {
  int k = 200;
  std::size_t samples = 50;
  double epsilon = 0.1;
};

struct KacRunResult {
  KacResult result;
  KsResult uniformity;
  bool conservation_ok = true;
};

KacRunResult run_kac(const KacConfig& cfg, const RunOptions& opts);

}  // namespace cycle_census
