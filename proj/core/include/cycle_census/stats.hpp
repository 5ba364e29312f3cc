#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cycle_census {

// Empirical P(count >= T) with a log-linear fit tail ~ c1 exp(-c2 T).
struct TailTable {
  std::vector<int> thresholds;
  std::vector<double> tail_fractions;
  std::vector<std::size_t> exceedances;
  std::size_t sample_count = 0;
  std::size_t degenerate_count = 0;
  double fit_c1 = 0.0;
  double fit_c2 = 0.0;
  double fit_r2 = 0.0;
  // Fewer than two thresholds had >= 30 exceedances; fit fields are NaN.
  bool insufficient_data = false;
  // Percentile bootstrap interval for fit_c2 (NaN unless requested).
  double c2_ci_low = 0.0;
  double c2_ci_high = 0.0;
  std::string inclusion_rule = "degenerate entries count as >= T for every T";
};

inline constexpr std::size_t kMinExceedances = 30;

// Missing entries are the degenerate sentinel (+infinity).
TailTable empirical_tail(std::span<const std::optional<int>> counts, std::span<const int> thresholds);

// 95% (by default) percentile bootstrap interval for the fitted decay rate.
// Deterministic for a fixed seed; resamples without a fit are skipped.
std::pair<double, double> bootstrap_decay_ci(std::span<const std::optional<int>> counts,
                                             std::span<const int> thresholds, std::size_t resamples,
                                             std::uint64_t seed, double level = 0.95);

// 0, 1, ..., max_threshold.
std::vector<int> default_thresholds(int max_threshold);

struct SummaryStats {
  double expectation = 0.0;
  double variance = 0.0;  // unbiased (n - 1); 0 for a single sample
  std::size_t sample_count = 0;
  double rearrangement_expectation = 0.0;
  double standard_error = 0.0;
};

// Throws EmptyInput for an empty vector.
SummaryStats expectation_and_variance(std::span<const int> counts);

// Midpoint Riemann sum over [0,1] of the nonincreasing rearrangement x -> c_(ceil(n x)).
double rearrangement_integral(std::span<const int> counts);

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

// Asymptotic Kolmogorov tail with Stephens' small-sample correction.
double kolmogorov_pvalue(double statistic, std::size_t n);

// One-sample KS against U[0,1); throws EmptyInput.
KsResult ks_uniform(std::vector<double> samples);
// One-sample KS against N(0,1); throws EmptyInput.
KsResult ks_standard_normal(std::vector<double> samples);

}  // namespace cycle_census
