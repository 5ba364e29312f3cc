#include "cycle_census/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "cycle_census/error.hpp"

namespace cycle_census {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void fit_tail(TailTable& table) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < table.thresholds.size(); ++i) {
    if (table.exceedances[i] >= kMinExceedances) {
      xs.push_back(static_cast<double>(table.thresholds[i]));
      ys.push_back(std::log(table.tail_fractions[i]));
    }
  }
  if (xs.size() < 2) {
    table.insufficient_data = true;
    table.fit_c1 = table.fit_c2 = table.fit_r2 = kNaN;
    return;
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  table.fit_c2 = -slope;
  table.fit_c1 = std::exp(intercept);
  table.fit_r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
}

}  // namespace

TailTable empirical_tail(std::span<const std::optional<int>> counts, std::span<const int> thresholds) {
  if (counts.empty()) throw Error(ErrorCode::kEmptyInput, "empirical tail needs at least one count");
  TailTable table;
  table.thresholds.assign(thresholds.begin(), thresholds.end());
  table.sample_count = counts.size();
  for (const auto& c : counts) {
    if (!c) ++table.degenerate_count;
  }
  for (int t : thresholds) {
    std::size_t hits = 0;
    for (const auto& c : counts) {
      if (!c || *c >= t) ++hits;
    }
    table.exceedances.push_back(hits);
    table.tail_fractions.push_back(static_cast<double>(hits) / static_cast<double>(counts.size()));
  }
  fit_tail(table);
  table.c2_ci_low = table.c2_ci_high = kNaN;
  return table;
}

std::pair<double, double> bootstrap_decay_ci(std::span<const std::optional<int>> counts,
                                             std::span<const int> thresholds, std::size_t resamples,
                                             std::uint64_t seed, double level) {
  if (counts.empty()) throw Error(ErrorCode::kEmptyInput, "bootstrap needs at least one count");
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::kInvalidArgument, "confidence level must lie in (0,1)");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, counts.size() - 1);
  std::vector<std::optional<int>> resample(counts.size());
  std::vector<double> rates;
  rates.reserve(resamples);
  for (std::size_t b = 0; b < resamples; ++b) {
    for (auto& slot : resample) slot = counts[pick(rng)];
    const TailTable t = empirical_tail(resample, thresholds);
    if (!t.insufficient_data) rates.push_back(t.fit_c2);
  }
  if (rates.empty()) return {kNaN, kNaN};
  std::sort(rates.begin(), rates.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(rates.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, rates.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return rates[lo] * (1.0 - frac) + rates[hi] * frac;
  };
  const double alpha = 0.5 * (1.0 - level);
  return {quantile(alpha), quantile(1.0 - alpha)};
}

std::vector<int> default_thresholds(int max_threshold) {
  std::vector<int> t;
  for (int i = 0; i <= max_threshold; ++i) t.push_back(i);
  return t;
}

double rearrangement_integral(std::span<const int> counts) {
  if (counts.empty()) throw Error(ErrorCode::kEmptyInput, "rearrangement of an empty vector");
  std::vector<int> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const std::size_t n = sorted.size();
  const double width = 1.0 / static_cast<double>(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // Cell midpoint x = (i + 1/2)/n falls in the i-th step of the rearrangement.
    const double x = (static_cast<double>(i) + 0.5) * width;
    const auto step = std::min(n - 1, static_cast<std::size_t>(x * static_cast<double>(n)));
    total += static_cast<double>(sorted[step]) * width;
  }
  return total;
}

SummaryStats expectation_and_variance(std::span<const int> counts) {
  if (counts.empty()) throw Error(ErrorCode::kEmptyInput, "expectation of an empty count vector");
  SummaryStats s;
  s.sample_count = counts.size();
  const double n = static_cast<double>(counts.size());
  long long sum = 0;
  for (int c : counts) sum += c;
  s.expectation = static_cast<double>(sum) / n;
  double ss = 0.0;
  for (int c : counts) ss += (c - s.expectation) * (c - s.expectation);
  s.variance = counts.size() > 1 ? ss / (n - 1.0) : 0.0;
  s.standard_error = std::sqrt(s.variance / n);
  s.rearrangement_expectation = rearrangement_integral(counts);
  return s;
}

double kolmogorov_pvalue(double statistic, std::size_t n) {
  if (n == 0) return 1.0;
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * statistic;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 1.0 : -1.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

template <class Cdf>
KsResult ks_against(std::vector<double> samples, Cdf cdf) {
  if (samples.empty()) throw Error(ErrorCode::kEmptyInput, "KS test on an empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, kolmogorov_pvalue(d, samples.size())};
}

}  // namespace

KsResult ks_uniform(std::vector<double> samples) {
  return ks_against(std::move(samples), [](double x) { return std::clamp(x, 0.0, 1.0); });
}

KsResult ks_standard_normal(std::vector<double> samples) {
  return ks_against(std::move(samples), [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); });
}

}  // namespace cycle_census
