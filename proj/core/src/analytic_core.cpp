#include "cycle_census/analytic_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "cycle_census/error.hpp"

namespace cycle_census {

ComplexPoly::ComplexPoly() : coeffs_{Complex{0.0, 0.0}} {}

ComplexPoly::ComplexPoly(ComplexVector coeffs) : coeffs_(std::move(coeffs)) {
  while (coeffs_.size() > 1 && coeffs_.back() == Complex{0.0, 0.0}) coeffs_.pop_back();
  if (coeffs_.empty()) coeffs_.push_back(Complex{0.0, 0.0});
}

ComplexPoly ComplexPoly::from_roots(std::span<const Complex> roots, Complex leading) {
  ComplexVector c{leading};
  for (const Complex& root : roots) {
    ComplexVector next(c.size() + 1, Complex{0.0, 0.0});
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= root * c[i];
    }
    c = std::move(next);
  }
  return ComplexPoly(std::move(c));
}

bool ComplexPoly::is_zero() const noexcept {
  return coeffs_.size() == 1 && coeffs_[0] == Complex{0.0, 0.0};
}

double ComplexPoly::max_abs_coeff() const noexcept {
  double m = 0.0;
  for (const Complex& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

Complex ComplexPoly::operator()(Complex z) const noexcept {
  Complex acc = coeffs_.back();
  for (std::size_t i = coeffs_.size() - 1; i-- > 0;) acc = acc * z + coeffs_[i];
  return acc;
}

std::pair<Complex, Complex> ComplexPoly::eval_with_derivative(Complex z) const noexcept {
  Complex value = coeffs_.back();
  Complex deriv{0.0, 0.0};
  for (std::size_t i = coeffs_.size() - 1; i-- > 0;) {
    deriv = deriv * z + value;
    value = value * z + coeffs_[i];
  }
  return {value, deriv};
}

ComplexPoly ComplexPoly::derivative() const {
  if (coeffs_.size() == 1) return ComplexPoly();
  ComplexVector d(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = static_cast<double>(i) * coeffs_[i];
  return ComplexPoly(std::move(d));
}

ComplexPoly ComplexPoly::reversed() const {
  ComplexVector r(coeffs_.rbegin(), coeffs_.rend());
  return ComplexPoly(std::move(r));
}

ComplexPoly ComplexPoly::scaled(Complex factor) const {
  ComplexVector c = coeffs_;
  for (Complex& x : c) x *= factor;
  return ComplexPoly(std::move(c));
}

ZeroCountResult winding_zero_count(const AnalyticFunction& f, double rho,
                                   const WindingOptions& options) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw Error(ErrorCode::kInvalidGeometry, "contour radius must be positive, got " + std::to_string(rho));
  }
  const std::size_t n0 = std::max<std::size_t>(options.initial_panels, 3);
  const double min_width = kTwoPi / static_cast<double>(std::max(options.max_panels, n0));

  ZeroCountResult result;
  result.contour_radius = rho;

  double min_mod = std::numeric_limits<double>::infinity();
  double max_mod = 0.0;
  auto eval = [&](double theta) {
    const Complex value = f(std::polar(rho, theta));
    const double m = std::abs(value);
    min_mod = std::min(min_mod, m);
    max_mod = std::max(max_mod, m);
    ++result.evaluations;
    return value;
  };

  std::vector<Complex> nodes(n0);
  for (std::size_t j = 0; j < n0; ++j) nodes[j] = eval(kTwoPi * static_cast<double>(j) / static_cast<double>(n0));

  struct Panel {
    double a, b;
    Complex fa, fb;
  };
  std::vector<Panel> stack;
  double total_phase = 0.0;
  bool degenerate = false;
  bool unresolved = false;

  for (std::size_t j = 0; j < n0; ++j) {
    const double a = kTwoPi * static_cast<double>(j) / static_cast<double>(n0);
    const double b = kTwoPi * static_cast<double>(j + 1) / static_cast<double>(n0);
    stack.push_back({a, b, nodes[j], nodes[(j + 1) % n0]});
    while (!stack.empty()) {
      const Panel p = stack.back();
      stack.pop_back();
      const double step = std::arg(p.fb * std::conj(p.fa));
      if (std::abs(step) <= options.max_phase_step) {
        total_phase += step;
        continue;
      }
      const double floor = options.tol * max_mod;
      if (std::abs(p.fa) <= floor || std::abs(p.fb) <= floor) {
        degenerate = true;
        total_phase += step;
        continue;
      }
      if (p.b - p.a <= min_width * (1.0 + 1e-9)) {
        unresolved = true;
        total_phase += step;
        continue;
      }
      const double mid = 0.5 * (p.a + p.b);
      const Complex fm = eval(mid);
      stack.push_back({mid, p.b, fm, p.fb});
      stack.push_back({p.a, mid, p.fa, fm});
    }
  }

  result.min_modulus_on_contour = min_mod;
  result.max_modulus_on_contour = max_mod;
  if (max_mod == 0.0 || !std::isfinite(max_mod) || min_mod < options.tol * max_mod) degenerate = true;
  if (degenerate) return result;
  if (unresolved) {
    throw Error(ErrorCode::kNonConvergence,
                "phase step above threshold at minimum panel width on |z| = " + std::to_string(rho) +
                    " (zero on or near the contour)");
  }

  const double winding = total_phase / kTwoPi;
  const double rounded = std::round(winding);
  result.count = static_cast<int>(rounded);
  result.winding_residual = std::abs(winding - rounded);
  return result;
}

double jensen_constant(double s) {
  if (!(s > 0.0 && s < 1.0)) {
    throw Error(ErrorCode::kInvalidGeometry, "disk radius s must lie in (0,1), got " + std::to_string(s));
  }
  const double big = 0.5 * (s + 1.0);
  return 1.0 / std::log((big * big + s * s) / (2.0 * s * big));
}

double jensen_zero_bound(double m1, double m2, double s, double order_tol) {
  const double c = jensen_constant(s);
  if (m1 < m2 - order_tol) {
    throw Error(ErrorCode::kOrderViolation, "outer log-sup " + std::to_string(m1) +
                                                " below inner log-sup " + std::to_string(m2));
  }
  return c * std::max(0.0, m1 - m2);
}

LogSups estimate_log_sups(const AnalyticFunction& h, double s, std::size_t grid_points) {
  if (!(s > 0.0 && s < 1.0)) {
    throw Error(ErrorCode::kInvalidGeometry, "disk radius s must lie in (0,1), got " + std::to_string(s));
  }
  const double big = 0.5 * (s + 1.0);
  double outer = 0.0;
  double inner = 0.0;
  for (std::size_t j = 0; j < grid_points; ++j) {
    const double theta = kTwoPi * static_cast<double>(j) / static_cast<double>(grid_points);
    outer = std::max(outer, std::abs(h(std::polar(big, theta))));
    inner = std::max(inner, std::abs(h(std::polar(s, theta))));
  }
  return {std::log(outer), std::log(inner)};
}

double scaled_residual(const ComplexPoly& p, Complex z) {
  if (std::abs(z) <= 1.0) return std::abs(p(z));
  // |p(z)| / |z|^deg == |rev(1/z)|
  const auto c = p.coeffs();
  const Complex u = 1.0 / z;
  Complex acc = c.front();
  for (std::size_t i = 1; i < c.size(); ++i) acc = acc * u + c[i];
  return std::abs(acc);
}

namespace {

// Newton step on p for |z| <= 1, on the reversed polynomial in u = 1/z
// otherwise, so that neither the step nor the residual overflows.
Complex newton_step(const ComplexPoly& p, const ComplexPoly& rev, Complex z) {
  if (std::abs(z) <= 1.0) {
    const auto [value, deriv] = p.eval_with_derivative(z);
    if (deriv == Complex{0.0, 0.0}) return z;
    return z - value / deriv;
  }
  const Complex u = 1.0 / z;
  const auto [value, deriv] = rev.eval_with_derivative(u);
  if (deriv == Complex{0.0, 0.0}) return z;
  const Complex u_next = u - value / deriv;
  if (u_next == Complex{0.0, 0.0}) return z;
  return 1.0 / u_next;
}

}  // namespace

std::vector<Complex> polynomial_roots(const ComplexPoly& p) {
  if (p.is_zero() || p.max_abs_coeff() < 1e-300) {
    throw Error(ErrorCode::kZeroPolynomial, "cannot take roots of the zero polynomial");
  }
  const auto all = p.coeffs();
  std::size_t zero_roots = 0;
  while (zero_roots < all.size() && all[zero_roots] == Complex{0.0, 0.0}) ++zero_roots;

  std::vector<Complex> roots(zero_roots, Complex{0.0, 0.0});
  const ComplexPoly q(ComplexVector(all.begin() + static_cast<std::ptrdiff_t>(zero_roots), all.end()));
  const int n = q.degree();
  if (n <= 0) return roots;

  const auto c = q.coeffs();
  std::vector<Complex> estimates;
  if (n == 1) {
    estimates.push_back(-c[0] / c[1]);
  } else {
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -c[static_cast<std::size_t>(i)] / c[static_cast<std::size_t>(n)];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorCode::kNonConvergence, "companion eigenvalue iteration failed");
    }
    const auto& ev = solver.eigenvalues();
    estimates.assign(ev.data(), ev.data() + ev.size());
  }

  const ComplexPoly rev = q.reversed();
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const Complex start = estimates[i];
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < estimates.size(); ++j) {
      if (j != i) nearest = std::min(nearest, std::abs(estimates[j] - start));
    }
    Complex z = start;
    double residual = scaled_residual(q, z);
    for (int iter = 0; iter < 60 && residual > 0.0; ++iter) {
      const Complex next = newton_step(q, rev, z);
      if (!std::isfinite(next.real()) || !std::isfinite(next.imag())) break;
      // Never let polishing hop onto a neighbouring root.
      if (std::abs(next - start) > 0.5 * nearest) break;
      const double next_residual = scaled_residual(q, next);
      if (!(next_residual < residual)) break;
      const bool tiny_step = std::abs(next - z) <= 4.0 * eps * std::max(1.0, std::abs(z));
      z = next;
      residual = next_residual;
      if (tiny_step) break;
    }
    roots.push_back(z);
  }
  return roots;
}

}  // namespace cycle_census
