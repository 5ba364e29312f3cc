#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cycle_census/analytic_core.hpp"
#include "cycle_census/parametric_family.hpp"
#include "cycle_census/planar_field.hpp"

namespace cycle_census {

struct SolverConfig {
  // Number of Simpson panels on [0, 2pi] (even); the grid has theta_points + 1 nodes.
  int theta_points = 1024;
  double picard_tol = 1e-12;
  int picard_max_iter = 60;
  double rk_tol = 1e-12;
  // <= 0 selects 1e-11 * 16 pi d |v| for the field being counted.
  double center_tol = 0.0;
  int grid_points_w = 512;
  double w_guard = 1e-4;
  double bisection_tol = 1e-10;

  void validate() const;
};

std::string solver_config_to_json(const SolverConfig& cfg, int indent = -1);
// Missing keys keep their defaults; unknown keys are rejected.
SolverConfig solver_config_from_json(const std::string& text);

enum class SolverKind { kPicard, kRungeKutta };

struct Trajectory {
  std::vector<double> theta_grid;
  std::vector<Complex> values;
  SolverKind solver = SolverKind::kPicard;
  int iterations_or_steps = 0;
  double final_residual = 0.0;
  // Largest ||r_{n+1} - r_n|| / ||r_n - r_{n-1}|| seen past the first iteration
  // (Picard only; 0 when the iteration converged before a ratio was measurable).
  double max_contraction_ratio = 0.0;

  double sup_modulus() const noexcept;
};

struct CycleCount {
  // Both counts are empty for centers.
  std::optional<int> real_cycles;
  int tangential_flags = 0;
  std::optional<int> complex_zero_count;
  bool is_center = false;
  std::vector<double> cycle_radii;
  double max_abs_displacement = 0.0;
  double center_tol = 0.0;
};

std::string cycle_count_to_json(const CycleCount& count, int indent = -1);

// min |1 + Q(v, r, theta)| over r in {0, 0.05, ..., 1} x 720 angles.
double denominator_guard(const PolarSystem& sys, int r_points = 21, int theta_points = 720);

// Caches f_k, g_k on the solver grid for one system so that repeated solves
// with different initial values are cheap. Real systems with real w take a
// pure double path.
class DisplacementMap {
 public:
  DisplacementMap(PolarSystem sys, SolverConfig cfg = {});
  ~DisplacementMap();
  DisplacementMap(DisplacementMap&&) noexcept;
  DisplacementMap& operator=(DisplacementMap&&) noexcept;

  const PolarSystem& system() const noexcept;
  const SolverConfig& config() const noexcept;
  double guard() const noexcept;

  Trajectory picard(Complex w) const;
  // r(2 pi) - w.
  Complex operator()(Complex w) const;
  double real_displacement(double w) const;

 private:
  struct Tables;
  PolarSystem sys_;
  SolverConfig cfg_;
  double guard_ = 0.0;
  std::unique_ptr<Tables> tables_;
};

Trajectory picard_solve(const PolarSystem& sys, Complex w, const SolverConfig& cfg = {});
// Dormand-Prince 5(4) on the same ODE, dense output on the Picard grid.
Trajectory rk_solve(const PolarSystem& sys, Complex w, const SolverConfig& cfg = {});
Complex displacement(const PolarSystem& sys, Complex w, const SolverConfig& cfg = {});

// 16 pi d N: a-priori bound on |p(v, w)| for |v| <= N, |w| <= 3/4.
double displacement_bound(int degree, double norm_budget);

// (e^{pi N} - 1) / 2 = p(v0, 1/2).
double displacement_normalizer(double norm_budget);

// f_u(z) = p(N u, 3z/4) / p(v0, 1/2) with u in C^{d(d+3)}: a family in
// H(32d, 2, 2/3). The parameter is the field coefficient vector divided by N.
ParametricFamily displacement_family(int degree, double norm_budget, const SolverConfig& cfg = {});

// Zeros of w -> p(field, w) in the closed disk |w| <= 1/2 via the family above
// with u = field / N_budget.
ZeroCountResult complex_displacement_count(const PlanarField& field, double norm_budget,
                                           const SolverConfig& cfg = {});

// Limit cycles in 0 < r <= K (sign changes of p on a w grid, refined by
// bisection) plus the complex count of zeros of p in |w| <= 1/2. A
// nonpositive norm_budget means max(1/(192 pi d^2), |v|).
CycleCount count_limit_cycles(const PlanarField& field, double K, const SolverConfig& cfg = {},
                              double norm_budget = 0.0);

}  // namespace cycle_census
