#include "cycle_census/parametric_family.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cycle_census/error.hpp"
#include "cycle_census/sampling.hpp"

namespace cycle_census {

ParametricFamily::ParametricFamily(std::string name, std::size_t param_dim, double bound_M, double param_radius,
                                   double disk_radius, SliceFactory factory)
    : name_(std::move(name)),
      param_dim_(param_dim),
      bound_M_(bound_M),
      param_radius_(param_radius),
      disk_radius_(disk_radius),
      factory_(std::move(factory)) {
  if (param_dim_ < 1) throw Error(ErrorCode::kInvalidArgument, "family '" + name_ + "': parameter dimension must be >= 1");
  if (!(bound_M_ > 1.0)) throw Error(ErrorCode::kInvalidArgument, "family '" + name_ + "': bound M must exceed 1");
  if (!(param_radius_ > 1.0)) throw Error(ErrorCode::kInvalidArgument, "family '" + name_ + "': parameter radius must exceed 1");
  if (!(disk_radius_ > 0.0 && disk_radius_ < 1.0)) {
    throw Error(ErrorCode::kInvalidGeometry, "family '" + name_ + "': disk radius must lie in (0,1)");
  }
  if (!factory_) throw Error(ErrorCode::kInvalidArgument, "family '" + name_ + "': missing evaluator");
}

AnalyticFunction ParametricFamily::slice(std::span<const Complex> v) const {
  if (v.size() != param_dim_) {
    throw Error(ErrorCode::kInvalidArgument, "family '" + name_ + "' expects " + std::to_string(param_dim_) +
                                                 " parameters, got " + std::to_string(v.size()));
  }
  return factory_(v);
}

Complex ParametricFamily::evaluate(std::span<const Complex> v, Complex z) const { return slice(v)(z); }

double jitter_radius(double s, std::size_t attempt) {
  const double eta = std::min(0.02, (0.5 * (s + 1.0) - s) / (4.0 * s));
  const std::size_t n = std::size(kJitterMultipliers);
  return s * (1.0 + eta * kJitterMultipliers[attempt % n]);
}

namespace {

void require_inside(const ParametricFamily& family, std::span<const Complex> v) {
  const double norm = euclidean_norm(v);
  if (!(norm < family.param_radius())) {
    throw Error(ErrorCode::kInvalidArgument, "parameter norm " + std::to_string(norm) +
                                                 " outside the family ball of radius " +
                                                 std::to_string(family.param_radius()));
  }
}

}  // namespace

bool slice_identically_zero(const ParametricFamily& family, const AnalyticFunction& slice, double tol) {
  const double big = 0.5 * (family.disk_radius() + 1.0);
  const double rings[] = {0.2, 0.45, 0.7, 0.95};
  double peak = 0.0;
  for (std::size_t ring = 0; ring < 4; ++ring) {
    for (int j = 0; j < 16; ++j) {
      const double theta = kTwoPi * (static_cast<double>(j) + 0.25 * static_cast<double>(ring)) / 16.0;
      peak = std::max(peak, std::abs(slice(std::polar(big * rings[ring], theta))));
    }
  }
  return peak < tol * family.bound_M();
}

bool detect_identically_zero(const ParametricFamily& family, std::span<const Complex> v, double tol) {
  require_inside(family, v);
  return slice_identically_zero(family, family.slice(v), tol);
}

ZeroCountResult slice_zero_count(const ParametricFamily& family, const AnalyticFunction& slice) {
  const std::size_t attempts = std::size(kJitterMultipliers);
  for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
    const double rho = jitter_radius(family.disk_radius(), attempt);
    ZeroCountResult result;
    bool failed = false;
    try {
      result = winding_zero_count(slice, rho, family.winding);
      failed = result.is_degenerate();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNonConvergence) throw;
      failed = true;
      result.contour_radius = rho;
    }
    result.contour_attempts = static_cast<int>(attempt) + 1;
    if (!failed) return result;
    if (attempt == 0 && slice_identically_zero(family, slice, family.zero_tol)) {
      result.count.reset();
      return result;
    }
  }
  throw Error(ErrorCode::kPersistentBoundaryZero,
              "family '" + family.name() + "': every jittered contour met a zero");
}

ZeroCountResult family_zero_count(const ParametricFamily& family, std::span<const Complex> v) {
  require_inside(family, v);
  return slice_zero_count(family, family.slice(v));
}

std::pair<double, double> normalized_log_sups(const ParametricFamily& family, std::span<const Complex> v,
                                              std::size_t grid_points) {
  require_inside(family, v);
  const AnalyticFunction h = family.slice(v);
  if (slice_identically_zero(family, h, family.zero_tol)) {
    throw Error(ErrorCode::kDegenerateSlice, "family '" + family.name() + "': slice is identically zero");
  }
  const LogSups sups = estimate_log_sups(h, family.disk_radius(), grid_points);
  const double log_m = std::log(family.bound_M());
  return {(sups.outer - log_m) / log_m, (sups.inner - log_m) / log_m};
}

namespace {

struct CircleProbe {
  std::optional<int> zeros;
  double min_modulus = 0.0;
  double max_modulus = 0.0;
};

CircleProbe probe_circle(const AnalyticFunction& h, double radius, std::size_t points) {
  CircleProbe probe;
  WindingOptions options;
  options.initial_panels = points;
  try {
    const ZeroCountResult r = winding_zero_count(h, radius, options);
    probe.zeros = r.count;
    probe.min_modulus = r.min_modulus_on_contour;
    probe.max_modulus = r.max_modulus_on_contour;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNonConvergence) throw;
  }
  return probe;
}

}  // namespace

std::vector<std::pair<bool, bool>> check_separation_conditions(std::span<const ParametricFamily> families,
                                                               double delta, double s_prime,
                                                               const SeparationOptions& options) {
  if (!(delta > 0.0)) throw Error(ErrorCode::kInvalidArgument, "separation delta must be positive");
  std::vector<std::pair<bool, bool>> out;
  out.reserve(families.size());
  for (const ParametricFamily& family : families) {
    const double s = family.disk_radius();
    if (!(s_prime > 0.0 && s_prime < s)) {
      throw Error(ErrorCode::kInvalidGeometry, "need 0 < s' < s for family '" + family.name() + "'");
    }
    const std::size_t n = family.param_dim();
    std::size_t grid = n > 3 ? 4096 : static_cast<std::size_t>(std::pow(32.0, static_cast<double>(n)));
    if (options.max_grid_points > 0) grid = std::min(grid, options.max_grid_points);

    bool a_holds = false;
    bool b_holds = false;
    for (std::size_t i = 0; i < grid && !(a_holds && b_holds); ++i) {
      const ComplexVector point = halton_complex_ball(n, i);
      // Local refinement: also try the same direction on the unit sphere.
      ComplexVector on_sphere = point;
      const double norm = euclidean_norm(point);
      if (norm > 0.0) {
        for (Complex& c : on_sphere) c /= norm;
      }
      for (const ComplexVector* v : std::initializer_list<const ComplexVector*>{&point, &on_sphere}) {
        const AnalyticFunction h = family.slice(*v);
        if (!a_holds) {
          const CircleProbe p = probe_circle(h, s, options.circle_points);
          a_holds = p.zeros.has_value() && *p.zeros == 0 && p.min_modulus > delta;
        }
        if (!b_holds) {
          const CircleProbe p = probe_circle(h, s_prime, options.circle_points);
          b_holds = p.zeros.has_value() && *p.zeros >= 1 && p.max_modulus > delta;
        }
      }
    }
    out.emplace_back(a_holds, b_holds);
  }
  return out;
}

}  // namespace cycle_census
