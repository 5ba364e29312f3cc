#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cycle_census/analytic_core.hpp"

namespace cycle_census {

// A holomorphic family f_v(z), v in the complex ball B_c(0, r) of C^N, z in
// the unit disk, bounded by M; zeros are counted in the closed disk |z| <= s.
class ParametricFamily {
 public:
  // Builds the slice z -> f_v(z) for one parameter; may precompute per v.
  using SliceFactory = std::function<AnalyticFunction(std::span<const Complex>)>;

  ParametricFamily(std::string name, std::size_t param_dim, double bound_M, double param_radius,
                   double disk_radius, SliceFactory factory);

  const std::string& name() const noexcept { return name_; }
  std::size_t param_dim() const noexcept { return param_dim_; }
  double bound_M() const noexcept { return bound_M_; }
  double param_radius() const noexcept { return param_radius_; }
  double disk_radius() const noexcept { return disk_radius_; }

  AnalyticFunction slice(std::span<const Complex> v) const;
  Complex evaluate(std::span<const Complex> v, Complex z) const;

  // Contour options used by family_zero_count.
  WindingOptions winding;
  // Tolerance (relative to M) for detect_identically_zero inside family_zero_count.
  double zero_tol = 1e-12;

 private:
  std::string name_;
  std::size_t param_dim_;
  double bound_M_;
  double param_radius_;
  double disk_radius_;
  SliceFactory factory_;
};

// Radius multipliers for the contour jitter sequence (first entry is the base radius).
inline constexpr double kJitterMultipliers[] = {1.0, 1.7, 2.3, 3.1, 0.7, 0.45, 2.7, 3.6};

// Contour radius s (1 + eta * multiplier), eta = min(0.02, ((s+1)/2 - s) / (4s)).
double jitter_radius(double s, std::size_t attempt);

// Zeros of f_v in the closed disk |z| <= s, with multiplicity. Degenerate
// sentinel when the slice is identically zero; PersistentBoundaryZero when
// every jittered contour hits a zero but the slice is not identically zero.
ZeroCountResult family_zero_count(const ParametricFamily& family, std::span<const Complex> v);
ZeroCountResult slice_zero_count(const ParametricFamily& family, const AnalyticFunction& slice);

// max |f_v| on 4 rings x 16 angles inside |z| < (s+1)/2 is below tol * M.
bool detect_identically_zero(const ParametricFamily& family, std::span<const Complex> v, double tol = 1e-12);
bool slice_identically_zero(const ParametricFamily& family, const AnalyticFunction& slice, double tol = 1e-12);

// ((sup_{|z|=(s+1)/2} log|f_v| - log M) / log M, (sup_{|z|=s} log|f_v| - log M) / log M).
std::pair<double, double> normalized_log_sups(const ParametricFamily& family, std::span<const Complex> v,
                                              std::size_t grid_points = 512);

struct SeparationOptions {
  // Parameter-grid size per family: 32^min(N,3) points; 4096 for N > 3.
  std::size_t max_grid_points = 0;
  std::size_t circle_points = 128;
};

// Per family (a, b): (a) some v in the closed unit ball with min |f_v| on the
// closed s-disk above delta; (b) some v' with max |f_v'| on D_{s'} above delta
// and a zero in D_{s'}. Witness search over a quasi-random parameter grid.
std::vector<std::pair<bool, bool>> check_separation_conditions(std::span<const ParametricFamily> families,
                                                               double delta, double s_prime,
                                                               const SeparationOptions& options = {});

}  // namespace cycle_census
