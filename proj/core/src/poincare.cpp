#include "cycle_census/poincare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <json.hpp>

#include "cycle_census/error.hpp"

namespace cycle_census {

void SolverConfig::validate() const {
  if (theta_points < 4 || theta_points % 2 != 0) {
    throw Error(ErrorCode::kInvalidArgument, "theta_points must be an even integer >= 4");
  }
  if (!(picard_tol > 0.0) || picard_max_iter < 1) {
    throw Error(ErrorCode::kInvalidArgument, "picard_tol must be positive and picard_max_iter >= 1");
  }
  if (!(rk_tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "rk_tol must be positive");
  if (grid_points_w < 2) throw Error(ErrorCode::kInvalidArgument, "grid_points_w must be >= 2");
  if (!(w_guard > 0.0) || !(bisection_tol > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "w_guard and bisection_tol must be positive");
  }
}

std::string solver_config_to_json(const SolverConfig& cfg, int indent) {
  nlohmann::ordered_json j;
  j["theta_points"] = cfg.theta_points;
  j["picard_tol"] = cfg.picard_tol;
  j["picard_max_iter"] = cfg.picard_max_iter;
  j["rk_tol"] = cfg.rk_tol;
  j["center_tol"] = cfg.center_tol;
  j["grid_points_w"] = cfg.grid_points_w;
  return j.dump(indent);
}

SolverConfig solver_config_from_json(const std::string& text) {
  SolverConfig cfg;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("solver config JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "solver config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "theta_points") cfg.theta_points = value.get<int>();
      else if (key == "picard_tol") cfg.picard_tol = value.get<double>();
      else if (key == "picard_max_iter") cfg.picard_max_iter = value.get<int>();
      else if (key == "rk_tol") cfg.rk_tol = value.get<double>();
      else if (key == "center_tol") cfg.center_tol = value.get<double>();
      else if (key == "grid_points_w") cfg.grid_points_w = value.get<int>();
      else throw Error(ErrorCode::kInvalidArgument, "unknown solver config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("solver config JSON: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

double Trajectory::sup_modulus() const noexcept {
  double m = 0.0;
  for (const Complex& r : values) m = std::max(m, std::abs(r));
  return m;
}

std::string cycle_count_to_json(const CycleCount& count, int indent) {
  nlohmann::ordered_json j;
  j["real_cycles"] = count.real_cycles ? nlohmann::ordered_json(*count.real_cycles) : nlohmann::ordered_json(nullptr);
  j["tangential_flags"] = count.tangential_flags;
  j["complex_zero_count"] =
      count.complex_zero_count ? nlohmann::ordered_json(*count.complex_zero_count) : nlohmann::ordered_json(nullptr);
  j["is_center"] = count.is_center;
  j["cycle_radii"] = count.cycle_radii;
  j["max_abs_displacement"] = count.max_abs_displacement;
  j["center_tol"] = count.center_tol;
  return j.dump(indent);
}

double denominator_guard(const PolarSystem& sys, int r_points, int theta_points) {
  const int d = sys.degree();
  std::vector<Complex> fs(static_cast<std::size_t>(d)), gs(static_cast<std::size_t>(d));
  double guard = std::numeric_limits<double>::infinity();
  for (int j = 0; j < theta_points; ++j) {
    const double theta = kTwoPi * static_cast<double>(j) / static_cast<double>(theta_points);
    sys.radial_angular_terms(theta, fs, gs);
    for (int i = 0; i < r_points; ++i) {
      const double r = r_points > 1 ? static_cast<double>(i) / static_cast<double>(r_points - 1) : 0.0;
      Complex q{0.0, 0.0};
      for (int k = d; k >= 1; --k) q = q * r + gs[static_cast<std::size_t>(k - 1)];
      guard = std::min(guard, std::abs(1.0 + q));
    }
  }
  return guard;
}

// ---------------------------------------------------------------------------
// Picard iteration on the cached grid.

struct DisplacementMap::Tables {
  int nodes = 0;
  int degree = 0;
  double h = 0.0;
  bool real = false;
  std::vector<Complex> f, g;    // [node * degree + (k-1)]
  std::vector<double> fr, gr;   // real copies when the system is real
};

namespace {

struct PicardStats {
  int iterations = 0;
  double final_diff = 0.0;
  double max_ratio = 0.0;
};

// r_{n+1}(theta_j) = w + int_0^{theta_j} r_n P / (1 + Q) dt, cumulative Simpson.
template <class C, class T>
PicardStats picard_iterate(const C* ft, const C* gt, int degree, int nodes, double h, T w,
                           const SolverConfig& cfg, std::vector<T>& r) {
  r.assign(static_cast<std::size_t>(nodes), w);
  std::vector<T> rhs(static_cast<std::size_t>(nodes));
  std::vector<T> next(static_cast<std::size_t>(nodes));
  PicardStats stats;
  double prev_diff = -1.0;
  int slow_streak = 0;
  const double scale = std::max(1.0, std::abs(w));
  for (int iter = 1; iter <= cfg.picard_max_iter; ++iter) {
    for (int j = 0; j < nodes; ++j) {
      const C* fj = ft + static_cast<std::ptrdiff_t>(j) * degree;
      const C* gj = gt + static_cast<std::ptrdiff_t>(j) * degree;
      const T rj = r[static_cast<std::size_t>(j)];
      T p = T(fj[degree - 1]);
      T q = T(gj[degree - 1]);
      for (int k = degree - 2; k >= 0; --k) {
        p = p * rj + fj[k];
        q = q * rj + gj[k];
      }
      rhs[static_cast<std::size_t>(j)] = rj * p / (1.0 + q);
    }
    next[0] = w;
    for (int m = 0; m + 2 < nodes; m += 2) {
      const T f0 = rhs[static_cast<std::size_t>(m)];
      const T f1 = rhs[static_cast<std::size_t>(m) + 1];
      const T f2 = rhs[static_cast<std::size_t>(m) + 2];
      const T base = next[static_cast<std::size_t>(m)];
      next[static_cast<std::size_t>(m) + 1] = base + (h / 12.0) * (5.0 * f0 + 8.0 * f1 - f2);
      next[static_cast<std::size_t>(m) + 2] = base + (h / 3.0) * (f0 + 4.0 * f1 + f2);
    }
    double diff = 0.0;
    for (int j = 0; j < nodes; ++j) {
      diff = std::max(diff, std::abs(next[static_cast<std::size_t>(j)] - r[static_cast<std::size_t>(j)]));
    }
    r.swap(next);
    stats.iterations = iter;
    stats.final_diff = diff;
    if (!std::isfinite(diff)) {
      throw Error(ErrorCode::kNonConvergence, "Picard iterate left the finite range");
    }
    if (prev_diff > 1e-13 * scale) {
      const double ratio = diff / prev_diff;
      stats.max_ratio = std::max(stats.max_ratio, ratio);
      slow_streak = ratio > 0.9 ? slow_streak + 1 : 0;
      if (slow_streak >= 3) {
        throw Error(ErrorCode::kNoContraction,
                    "successive Picard differences failed to shrink by 0.9 for 3 iterations (ratio " +
                        std::to_string(ratio) + ")");
      }
    }
    if (diff < cfg.picard_tol) return stats;
    prev_diff = diff;
  }
  if (stats.final_diff > 10.0 * cfg.picard_tol) {
    throw Error(ErrorCode::kNonConvergence, "Picard iteration did not reach tolerance in " +
                                                std::to_string(cfg.picard_max_iter) + " iterations (residual " +
                                                std::to_string(stats.final_diff) + ")");
  }
  return stats;
}

void require_initial_value(Complex w) {
  if (!(std::abs(w) <= 0.75 + 1e-12)) {
    throw Error(ErrorCode::kInvalidArgument, "initial value must satisfy |w| <= 3/4, got |w| = " +
                                                 std::to_string(std::abs(w)));
  }
}

}  // namespace

DisplacementMap::DisplacementMap(PolarSystem sys, SolverConfig cfg)
    : sys_(std::move(sys)), cfg_(cfg), tables_(std::make_unique<Tables>()) {
  cfg_.validate();
  guard_ = denominator_guard(sys_);
  Tables& t = *tables_;
  t.degree = sys_.degree();
  t.nodes = cfg_.theta_points + 1;
  t.h = kTwoPi / static_cast<double>(cfg_.theta_points);
  t.real = sys_.is_real();
  const std::size_t size = static_cast<std::size_t>(t.nodes) * static_cast<std::size_t>(t.degree);
  t.f.resize(size);
  t.g.resize(size);
  for (int j = 0; j < t.nodes; ++j) {
    const double theta = t.h * static_cast<double>(j);
    const std::size_t off = static_cast<std::size_t>(j) * static_cast<std::size_t>(t.degree);
    sys_.radial_angular_terms(theta, std::span<Complex>(t.f).subspan(off, static_cast<std::size_t>(t.degree)),
                              std::span<Complex>(t.g).subspan(off, static_cast<std::size_t>(t.degree)));
  }
  if (t.real) {
    t.fr.resize(size);
    t.gr.resize(size);
    for (std::size_t i = 0; i < size; ++i) {
      t.fr[i] = t.f[i].real();
      t.gr[i] = t.g[i].real();
    }
  }
}

DisplacementMap::~DisplacementMap() = default;
DisplacementMap::DisplacementMap(DisplacementMap&&) noexcept = default;
DisplacementMap& DisplacementMap::operator=(DisplacementMap&&) noexcept = default;

const PolarSystem& DisplacementMap::system() const noexcept { return sys_; }
const SolverConfig& DisplacementMap::config() const noexcept { return cfg_; }
double DisplacementMap::guard() const noexcept { return guard_; }

namespace {

void require_guard(double guard) {
  if (!(guard > 0.4)) {
    throw Error(ErrorCode::kInvalidArgument, "field outside the solver regime: min |1 + Q| = " +
                                                 std::to_string(guard) + " <= 0.4");
  }
}

}  // namespace

Trajectory DisplacementMap::picard(Complex w) const {
  require_initial_value(w);
  require_guard(guard_);
  const Tables& t = *tables_;
  Trajectory traj;
  traj.solver = SolverKind::kPicard;
  traj.theta_grid.resize(static_cast<std::size_t>(t.nodes));
  for (int j = 0; j < t.nodes; ++j) traj.theta_grid[static_cast<std::size_t>(j)] = t.h * static_cast<double>(j);
  traj.theta_grid.back() = kTwoPi;

  PicardStats stats;
  if (t.real && w.imag() == 0.0) {
    std::vector<double> r;
    stats = picard_iterate<double, double>(t.fr.data(), t.gr.data(), t.degree, t.nodes, t.h, w.real(), cfg_, r);
    traj.values.assign(r.begin(), r.end());
  } else if (t.real) {
    stats = picard_iterate<double, Complex>(t.fr.data(), t.gr.data(), t.degree, t.nodes, t.h, w, cfg_,
                                            traj.values);
  } else {
    stats = picard_iterate<Complex, Complex>(t.f.data(), t.g.data(), t.degree, t.nodes, t.h, w, cfg_,
                                             traj.values);
  }
  traj.iterations_or_steps = stats.iterations;
  traj.final_residual = stats.final_diff;
  traj.max_contraction_ratio = stats.max_ratio;
  return traj;
}

Complex DisplacementMap::operator()(Complex w) const {
  require_initial_value(w);
  require_guard(guard_);
  const Tables& t = *tables_;
  if (t.real && w.imag() == 0.0) return real_displacement(w.real());
  std::vector<Complex> r;
  if (t.real) {
    picard_iterate<double, Complex>(t.fr.data(), t.gr.data(), t.degree, t.nodes, t.h, w, cfg_, r);
  } else {
    picard_iterate<Complex, Complex>(t.f.data(), t.g.data(), t.degree, t.nodes, t.h, w, cfg_, r);
  }
  return r.back() - w;
}

double DisplacementMap::real_displacement(double w) const {
  require_initial_value(w);
  require_guard(guard_);
  const Tables& t = *tables_;
  if (!t.real) throw Error(ErrorCode::kInvalidArgument, "real displacement requested for a complex system");
  std::vector<double> r;
  picard_iterate<double, double>(t.fr.data(), t.gr.data(), t.degree, t.nodes, t.h, w, cfg_, r);
  return r.back() - w;
}

Trajectory picard_solve(const PolarSystem& sys, Complex w, const SolverConfig& cfg) {
  return DisplacementMap(sys, cfg).picard(w);
}

Complex displacement(const PolarSystem& sys, Complex w, const SolverConfig& cfg) {
  return DisplacementMap(sys, cfg)(w);
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4) oracle with Hairer's dense output.

Trajectory rk_solve(const PolarSystem& sys, Complex w, const SolverConfig& cfg) {
  cfg.validate();
  require_initial_value(w);
  require_guard(denominator_guard(sys));

  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                   a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;
  constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                   d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                   d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  const int panels = cfg.theta_points;
  const double grid_h = kTwoPi / static_cast<double>(panels);
  Trajectory traj;
  traj.solver = SolverKind::kRungeKutta;
  traj.theta_grid.resize(static_cast<std::size_t>(panels) + 1);
  for (int j = 0; j <= panels; ++j) traj.theta_grid[static_cast<std::size_t>(j)] = grid_h * static_cast<double>(j);
  traj.theta_grid.back() = kTwoPi;
  traj.values.assign(static_cast<std::size_t>(panels) + 1, w);

  const double atol = cfg.rk_tol;
  const double rtol = cfg.rk_tol;
  double t = 0.0;
  Complex y = w;
  Complex k1 = sys.rhs(y, t);
  double h = kTwoPi / 64.0;
  std::size_t next_node = 1;
  int steps = 0;
  double last_err = 0.0;

  while (t < kTwoPi) {
    if (h < 1e-12) {
      throw Error(ErrorCode::kStepUnderflow, "Runge-Kutta step fell below 1e-12 at theta = " + std::to_string(t));
    }
    const bool last = t + h >= kTwoPi;
    if (last) h = kTwoPi - t;
    const Complex k2 = sys.rhs(y + h * (a21 * k1), t + c2 * h);
    const Complex k3 = sys.rhs(y + h * (a31 * k1 + a32 * k2), t + c3 * h);
    const Complex k4 = sys.rhs(y + h * (a41 * k1 + a42 * k2 + a43 * k3), t + c4 * h);
    const Complex k5 = sys.rhs(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), t + c5 * h);
    const Complex k6 = sys.rhs(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), t + h);
    const Complex y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const double t_new = last ? kTwoPi : t + h;
    const Complex k7 = sys.rhs(y_new, t_new);
    const Complex err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double sk = atol + rtol * std::max(std::abs(y), std::abs(y_new));
    const double err_norm = std::abs(err) / sk;
    if (!std::isfinite(err_norm)) {
      throw Error(ErrorCode::kStepUnderflow, "Runge-Kutta stage left the finite range");
    }
    if (err_norm <= 1.0) {
      const Complex ydiff = y_new - y;
      const Complex bspl = h * k1 - ydiff;
      const Complex rc3 = bspl;
      const Complex rc4 = ydiff - h * k7 - bspl;
      const Complex rc5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      while (next_node <= static_cast<std::size_t>(panels) &&
             traj.theta_grid[next_node] <= t_new + 1e-15) {
        const double s = (traj.theta_grid[next_node] - t) / h;
        const double s1 = 1.0 - s;
        traj.values[next_node] = y + s * (ydiff + s1 * (rc3 + s * (rc4 + s1 * rc5)));
        ++next_node;
      }
      t = t_new;
      y = y_new;
      k1 = k7;
      ++steps;
      last_err = err_norm;
      if (last) break;
    }
    const double fac = err_norm > 0.0 ? 0.9 * std::pow(err_norm, -0.2) : 5.0;
    h *= std::clamp(fac, 0.2, 5.0);
  }
  traj.values.back() = y;
  traj.iterations_or_steps = steps;
  traj.final_residual = last_err * atol;
  return traj;
}

double displacement_bound(int degree, double norm_budget) {
  return 16.0 * kPi * static_cast<double>(degree) * norm_budget;
}

double displacement_normalizer(double norm_budget) { return 0.5 * std::expm1(kPi * norm_budget); }

ParametricFamily displacement_family(int degree, double norm_budget, const SolverConfig& cfg) {
  if (degree < 1) throw Error(ErrorCode::kInvalidArgument, "degree must be >= 1");
  if (!(norm_budget > 0.0)) throw Error(ErrorCode::kInvalidArgument, "norm budget must be positive");
  cfg.validate();
  const double normalizer = displacement_normalizer(norm_budget);
  const std::size_t dim = PlanarField::dimension(degree);
  auto factory = [degree, norm_budget, normalizer, cfg](std::span<const Complex> u) -> AnalyticFunction {
    ComplexVector coeffs(u.begin(), u.end());
    for (Complex& c : coeffs) c *= norm_budget;
    auto map = std::make_shared<const DisplacementMap>(PolarSystem(degree, std::move(coeffs)), cfg);
    return [map, normalizer](Complex z) { return (*map)(0.75 * z) / normalizer; };
  };
  ParametricFamily family("displacement", dim, 32.0 * static_cast<double>(degree), 2.0, 2.0 / 3.0,
                          std::move(factory));
  // p(v, .) is dominated by a few low-order terms; adaptive bisection catches the rest.
  family.winding.initial_panels = 64;
  return family;
}

ZeroCountResult complex_displacement_count(const PlanarField& field, double norm_budget, const SolverConfig& cfg) {
  const ParametricFamily family = displacement_family(field.degree(), norm_budget, cfg);
  ComplexVector u = field.complex_coefficients();
  for (Complex& c : u) c /= norm_budget;
  return family_zero_count(family, u);
}

CycleCount count_limit_cycles(const PlanarField& field, double K, const SolverConfig& cfg, double norm_budget) {
  if (!(K > 0.0 && K <= 0.75)) throw Error(ErrorCode::kInvalidArgument, "K must lie in (0, 3/4]");
  cfg.validate();
  if (!(K > cfg.w_guard)) throw Error(ErrorCode::kInvalidArgument, "K must exceed the guard interval around 0");
  const DisplacementMap map(polar_reduce(field), cfg);
  require_guard(map.guard());

  const int d = field.degree();
  const double norm = field.norm();
  CycleCount out;
  out.center_tol = cfg.center_tol > 0.0 ? cfg.center_tol : 1e-11 * 16.0 * kPi * static_cast<double>(d) * norm;

  auto p_at = [&](double w) {
    try {
      return map.real_displacement(w);
    } catch (const Error& e) {
      throw Error(ErrorCode::kSolverFailure, "at w = " + std::to_string(w) + ": " + e.what());
    }
  };

  const int n = cfg.grid_points_w;
  std::vector<double> ws(static_cast<std::size_t>(n));
  std::vector<double> ps(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    ws[static_cast<std::size_t>(i)] =
        i + 1 == n ? K : cfg.w_guard + (K - cfg.w_guard) * static_cast<double>(i) / static_cast<double>(n - 1);
    ps[static_cast<std::size_t>(i)] = p_at(ws[static_cast<std::size_t>(i)]);
    out.max_abs_displacement = std::max(out.max_abs_displacement, std::abs(ps[static_cast<std::size_t>(i)]));
  }
  if (out.max_abs_displacement <= out.center_tol) {
    out.is_center = true;
    return out;
  }

  auto sign = [](double x) { return (x > 0.0) - (x < 0.0); };
  int last = -1;  // index of the last grid point with nonzero p
  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    if (ps[ui] == 0.0) continue;
    if (last >= 0 && sign(ps[ui]) != sign(ps[static_cast<std::size_t>(last)])) {
      if (last + 1 == i) {
        double a = ws[static_cast<std::size_t>(last)];
        double b = ws[ui];
        double pa = ps[static_cast<std::size_t>(last)];
        while (b - a > cfg.bisection_tol) {
          const double m = 0.5 * (a + b);
          const double pm = p_at(m);
          if (pm == 0.0) {
            a = b = m;
            break;
          }
          if (sign(pm) == sign(pa)) {
            a = m;
            pa = pm;
          } else {
            b = m;
          }
        }
        out.cycle_radii.push_back(0.5 * (a + b));
      } else {
        // Exact zeros on the grid between the two signs.
        out.cycle_radii.push_back(0.5 * (ws[static_cast<std::size_t>(last) + 1] + ws[ui - 1]));
      }
    }
    last = i;
  }
  out.real_cycles = static_cast<int>(out.cycle_radii.size());

  // Runs of grid points below center_tol whose flanks carry the same sign.
  for (int i = 0; i < n;) {
    if (std::abs(ps[static_cast<std::size_t>(i)]) >= out.center_tol) {
      ++i;
      continue;
    }
    int j = i;
    while (j < n && std::abs(ps[static_cast<std::size_t>(j)]) < out.center_tol) ++j;
    const int before = i > 0 ? sign(ps[static_cast<std::size_t>(i) - 1]) : 0;
    const int after = j < n ? sign(ps[static_cast<std::size_t>(j)]) : 0;
    bool crosses = before != 0 && after != 0 && before != after;
    for (int m = i; m + 1 < j && !crosses; ++m) {
      const int sa = sign(ps[static_cast<std::size_t>(m)]);
      const int sb = sign(ps[static_cast<std::size_t>(m) + 1]);
      crosses = sa != 0 && sb != 0 && sa != sb;
    }
    if (!crosses) ++out.tangential_flags;
    i = j;
  }

  const double budget = norm_budget > 0.0 ? norm_budget : std::max(Ellipsoid::theorem_a_budget(d), norm);
  out.complex_zero_count = complex_displacement_count(field, budget, cfg).count;
  return out;
}

}  // namespace cycle_census
