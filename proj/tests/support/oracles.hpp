#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "cycle_census/planar_field.hpp"

namespace oracle {

using Complex = std::complex<double>;

// Right-hand side of the Cartesian system, monomials evaluated directly.
void cartesian_rhs(const cycle_census::PlanarField& field, double x, double y, double& dx, double& dy);

// dr/dtheta derived from the Cartesian system (no polar reduction):
//   r' = (xF + yG)/r,  theta' = 1 + (xG - yF)/r^2.
double radial_slope(const cycle_census::PlanarField& field, double r, double theta);

// Classical RK4 in theta with `steps` equal steps; returns r(2 pi).
double return_radius(const cycle_census::PlanarField& field, double w, int steps = 4096);

// Rigid system with f(u) = c (u - u0): y = r^2 solves y' = 2 c y (y - u0), so
//   y(theta) = u0 / (1 - (1 - u0/y0) e^{2 c u0 theta}).
double logistic_rigid_radius(double c, double u0, double r0, double theta);

// All roots by Durand-Kerner (Weierstrass) iteration; coefficients ascending.
std::vector<Complex> durand_kerner(const std::vector<Complex>& coeffs, int max_iter = 2000);

// exp(z A) x0 for a row-major n x n matrix, via Eigen's matrix exponential.
std::vector<Complex> matrix_exp_apply(const std::vector<Complex>& a, int n, Complex z, const std::vector<Complex>& x0);

// Winding number of the closed polyline through `values` (last joins first).
int polyline_winding(const std::vector<Complex>& values);

// Standard normal CDF.
double normal_cdf(double x);

}  // namespace oracle
