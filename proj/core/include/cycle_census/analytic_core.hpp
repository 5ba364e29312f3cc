#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace cycle_census {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;
using AnalyticFunction = std::function<Complex(Complex)>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Polynomial with complex coefficients in ascending degree. Trailing exact
// zeros are trimmed so the leading coefficient is nonzero unless the
// polynomial is identically zero (then coeffs() == {0} and degree() == 0).
class ComplexPoly {
 public:
  ComplexPoly();
  explicit ComplexPoly(ComplexVector coeffs);

  // prod (z - root_i), times `leading`.
  static ComplexPoly from_roots(std::span<const Complex> roots, Complex leading = 1.0);

  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const noexcept;
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  double max_abs_coeff() const noexcept;

  Complex operator()(Complex z) const noexcept;
  // Value and first derivative in one Horner pass.
  std::pair<Complex, Complex> eval_with_derivative(Complex z) const noexcept;

  ComplexPoly derivative() const;
  // z^degree * p(1/z).
  ComplexPoly reversed() const;
  ComplexPoly scaled(Complex factor) const;

 private:
  ComplexVector coeffs_;
};

// Result of an argument-principle count on a circle |z| = contour_radius.
// A missing count is the degenerate sentinel (f vanishes on or numerically
// at the contour, or is identically zero).
struct ZeroCountResult {
  std::optional<int> count;
  double contour_radius = 0.0;
  double min_modulus_on_contour = 0.0;
  double max_modulus_on_contour = 0.0;
  double winding_residual = 0.0;
  std::size_t evaluations = 0;
  int contour_attempts = 1;

  bool is_degenerate() const noexcept { return !count.has_value(); }
};

struct WindingOptions {
  // Degenerate if min |f| on the contour < tol * max |f| on the contour.
  double tol = 1e-12;
  std::size_t initial_panels = 256;
  std::size_t max_panels = std::size_t{1} << 18;
  // Panels whose principal phase increment exceeds this are bisected.
  double max_phase_step = kPi / 2.0;
};

// Zeros of f (with multiplicity) strictly inside |z| = rho, as the winding
// number of theta -> f(rho e^{i theta}) by phase unwrapping with adaptive
// bisection. Throws NonConvergence when a panel at minimum width still turns
// by more than max_phase_step while |f| stays above the degeneracy floor.
ZeroCountResult winding_zero_count(const AnalyticFunction& f, double rho,
                                   const WindingOptions& options = {});

// c(s) for the Jensen-type bound #zeros in the closed s-disk <= c(s)(M1 - M2),
// with M1, M2 the log-sups of |h| on the disks of radius (s+1)/2 and s.
// c(s) = 1 / log((R^2 + s^2) / (2 s R)), R = (s+1)/2.
double jensen_constant(double s);

// c(s) * (M1 - M2). Throws InvalidGeometry for s outside (0,1) and
// OrderViolation when M1 < M2 - order_tol.
double jensen_zero_bound(double m1, double m2, double s, double order_tol = 1e-9);

struct LogSups {
  double outer = 0.0;  // sup log|h| on |z| = (s+1)/2
  double inner = 0.0;  // sup log|h| on |z| = s
};

// Grid estimate of the two log-sups (maximum principle: circles suffice).
LogSups estimate_log_sups(const AnalyticFunction& h, double s, std::size_t grid_points = 512);

// All roots with multiplicity: companion-matrix eigenvalues followed by
// Newton polishing. Throws ZeroPolynomial for (numerically) zero input.
std::vector<Complex> polynomial_roots(const ComplexPoly& p);

// Backward-error style residual |p(z)| / max(1,|z|)^deg used by the polisher.
double scaled_residual(const ComplexPoly& p, Complex z);

}  // namespace cycle_census
