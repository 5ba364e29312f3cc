#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "cycle_census/analytic_core.hpp"
#include "cycle_census/parametric_family.hpp"

namespace cycle_census {

// Linear right-hand side dx/dz = A x on C^N for the flow family.
struct OdeFieldSpec {
  enum class Kind {
    kZero,                // A = 0
    kNthDerivativeZero,   // x_i' = x_{i+1}, x_N' = 0: x_1 is a polynomial of degree N - 1
    kLinear,              // explicit A
    kRandomLinear,        // Gaussian A rescaled to operator norm `norm`, drawn from the seed
  };
  Kind kind = Kind::kZero;
  int dimension = 1;
  ComplexVector matrix;  // row-major N x N (kLinear)
  double norm = 0.5;     // kRandomLinear
  double domain_radius = 1.0;  // r: initial values live in B_c(0, 3r/4)
};

// {"kind": "zero" | "nth-derivative-zero" | "linear" | "random-linear",
//  "dimension": N, "matrix": [[re or [re, im], ...], ...], "norm": x, "r": r}
OdeFieldSpec ode_field_from_json(const std::string& text);

struct OdeFlowGeometry {
  double K = 0.0;   // sup |f| over D_1 x B_c(0, r)
  double K1 = 0.0;  // sup of the Jacobian operator norm
  double R = 0.0;   // 0.999 min{r / (4K), 1 / K1, 1}
};

// The matrix actually used (random draws resolved with `seed`), row-major.
ComplexVector ode_flow_matrix(const OdeFieldSpec& spec, std::uint64_t seed);
OdeFlowGeometry ode_flow_geometry(const OdeFieldSpec& spec, std::uint64_t seed);

// x(z) from x(0) = x0 by successive approximations along the segment [0, z]
// (cumulative Simpson on `nodes` points). Throws NonConvergence.
ComplexVector ode_flow_solve(std::span<const Complex> matrix, std::span<const Complex> x0, Complex z,
                             std::size_t nodes = 257);

// f_v(z) = x_1(R z; (r/2) v) / (r/2): parameter ball radius 3/2, bound M = 2,
// zeros counted in |z| <= t / R. Throws RadiusViolation when t >= R.
ParametricFamily ode_flow_family(const OdeFieldSpec& spec, double t, std::uint64_t seed);

}  // namespace cycle_census
