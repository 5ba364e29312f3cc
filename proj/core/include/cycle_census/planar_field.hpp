#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cycle_census/analytic_core.hpp"

namespace cycle_census {

// Perturbation (F, G) of the linear rotation x' = -y + F, y' = x + G, with
//   F_k(x,y) = sum_i a_{k,i} x^i y^{k-i},  G_k(x,y) = sum_i b_{k,i} x^i y^{k-i},
// for 1 <= k <= degree, 0 <= i <= k. Coefficients are stored flat as the
// parameter vector v in R^{d(d+3)}: all a rows (k ascending), then all b rows.
class PlanarField {
 public:
  explicit PlanarField(int degree);
  PlanarField(int degree, std::vector<double> coefficients);

  static std::size_t dimension(int degree) noexcept {
    return static_cast<std::size_t>(degree) * static_cast<std::size_t>(degree + 3);
  }
  // Offset of row k inside the a (or b) block.
  static std::size_t row_offset(int k) noexcept {
    return static_cast<std::size_t>(k - 1) * static_cast<std::size_t>(k + 2) / 2;
  }

  int degree() const noexcept { return degree_; }
  std::span<const double> coefficients() const noexcept { return coeffs_; }

  double a(int k, int i) const { return coeffs_[index_a(k, i)]; }
  double b(int k, int i) const { return coeffs_[index_b(k, i)]; }
  void set_a(int k, int i, double value) { coeffs_[index_a(k, i)] = value; }
  void set_b(int k, int i, double value) { coeffs_[index_b(k, i)] = value; }

  std::span<const double> a_row(int k) const;
  std::span<const double> b_row(int k) const;

  // |F_k|, |G_k|: Euclidean norms of the degree-k coefficient rows.
  double row_norm_f(int k) const;
  double row_norm_g(int k) const;
  // Euclidean norm |v| of the full coefficient vector.
  double norm() const;

  // Cartesian right-hand side of the perturbation.
  double eval_f(double x, double y) const;
  double eval_g(double x, double y) const;

  // Complexified coefficient vector (imaginary parts zero).
  ComplexVector complex_coefficients() const;

  PlanarField scaled(double factor) const;
  PlanarField operator+(const PlanarField& other) const;

 private:
  std::size_t index_a(int k, int i) const;
  std::size_t index_b(int k, int i) const;

  int degree_;
  std::vector<double> coeffs_;
};

// E(a, N): sum_k (a^{k-1}|F_k|)^2 + sum_k (a^{k-1}|G_k|)^2 <= N^2.
struct Ellipsoid {
  double a = 1.0;
  double norm_budget = 0.0;
  int degree = 1;

  void validate() const;
  // Largest N for which the return-map machinery is guaranteed: 1/(192 pi d^2).
  static double theorem_a_budget(int degree) noexcept;
};

bool ellipsoid_membership(const PlanarField& field, const Ellipsoid& ellipsoid);

// Uniform (Lebesgue) sample of E(a, N): unit-ball point in dimension d(d+3),
// degree-k coordinates scaled by N a^{-(k-1)}.
PlanarField sample_ellipsoid(const Ellipsoid& ellipsoid, std::uint64_t seed);

// Field of the system after x -> x/a, y -> y/a: degree-k rows times a^{k-1}.
PlanarField rescale_to_unit(const PlanarField& field, double a);

// Polar reduction dr/dtheta = r P / (1 + Q) with
//   f_k = F_k(c,s) c + G_k(c,s) s,  g_k = -F_k(c,s) s + G_k(c,s) c,
//   P = sum_k r^{k-1} f_k,  Q = sum_k r^{k-1} g_k,  (c,s) = (cos, sin) theta.
// The coefficient vector may be complex (holomorphic extension in v).
class PolarSystem {
 public:
  PolarSystem(int degree, ComplexVector coefficients);

  int degree() const noexcept { return degree_; }
  std::span<const Complex> coefficients() const noexcept { return coeffs_; }
  bool is_real() const noexcept;
  double coefficient_norm() const noexcept;

  Complex f(int k, double theta) const;
  Complex g(int k, double theta) const;
  // All f_k, g_k (k = 1..d) at one angle; outputs sized `degree`.
  void radial_angular_terms(double theta, std::span<Complex> f_out, std::span<Complex> g_out) const;

  Complex P(Complex r, double theta) const;
  Complex Q(Complex r, double theta) const;
  // r P / (1 + Q).
  Complex rhs(Complex r, double theta) const;

  PolarSystem scaled(Complex factor) const;

 private:
  int degree_;
  ComplexVector coeffs_;
};

PolarSystem polar_reduce(const PlanarField& field);

// max over k and a theta grid of |F_k(cos,sin)|, |G_k(cos,sin)|, divided by |v|.
// Throws ZeroField when |v| = 0.
double trig_norm_check(const PlanarField& field, std::size_t theta_points = 720);

// Rigid system x' = -y + x f(x^2+y^2), y' = x + y f(x^2+y^2) with
// f(u) = sum_j poly[j] u^j. Requires degree >= 2 deg(f) + 1.
PlanarField rigid_field(std::span<const double> poly, int degree);

// f(u) = scale * prod_i (u - roots[i]) expanded into ascending coefficients.
std::vector<double> poly_from_real_roots(std::span<const double> roots, double scale);

// F = (N/2) x, G = (N/2) y: dr/dtheta = (N/2) r.
PlanarField v0_field(int degree, double norm_budget);

// The field of the same system in coordinates rotated by angle phi.
PlanarField rotate_field(const PlanarField& field, double phi);

// {"degree": d, "a": [[a_10, a_11], ...], "b": [...]}; rows per k.
std::string field_to_json(const PlanarField& field, int indent = -1);
PlanarField field_from_json(const std::string& text);

}  // namespace cycle_census
