#include "oracles.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

void cartesian_rhs(const cycle_census::PlanarField& field, double x, double y, double& dx, double& dy) {
  dx = 0.0;
  dy = 0.0;
  for (int k = 1; k <= field.degree(); ++k) {
    for (int i = 0; i <= k; ++i) {
      const double m = std::pow(x, i) * std::pow(y, k - i);
      dx += field.a(k, i) * m;
      dy += field.b(k, i) * m;
    }
  }
}

double radial_slope(const cycle_census::PlanarField& field, double r, double theta) {
  const double x = r * std::cos(theta);
  const double y = r * std::sin(theta);
  double f = 0.0, g = 0.0;
  cartesian_rhs(field, x, y, f, g);
  const double rdot = (x * f + y * g) / r;
  const double thetadot = 1.0 + (x * g - y * f) / (r * r);
  return rdot / thetadot;
}

double return_radius(const cycle_census::PlanarField& field, double w, int steps) {
  const double h = 2.0 * std::numbers::pi / steps;
  double r = w;
  for (int n = 0; n < steps; ++n) {
    const double t = n * h;
    const double k1 = radial_slope(field, r, t);
    const double k2 = radial_slope(field, r + 0.5 * h * k1, t + 0.5 * h);
    const double k3 = radial_slope(field, r + 0.5 * h * k2, t + 0.5 * h);
    const double k4 = radial_slope(field, r + h * k3, t + h);
    r += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return r;
}

double logistic_rigid_radius(double c, double u0, double r0, double theta) {
  const double y0 = r0 * r0;
  const double y = u0 / (1.0 - (1.0 - u0 / y0) * std::exp(2.0 * c * u0 * theta));
  return std::sqrt(y);
}

std::vector<Complex> durand_kerner(const std::vector<Complex>& coeffs, int max_iter) {
  const int n = static_cast<int>(coeffs.size()) - 1;
  std::vector<Complex> monic(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) monic[i] = coeffs[i] / coeffs.back();
  auto eval = [&](Complex z) {
    Complex acc = 0.0;
    for (int i = n; i >= 0; --i) acc = acc * z + monic[static_cast<std::size_t>(i)];
    return acc;
  };
  double bound = 0.0;
  for (int i = 0; i < n; ++i) bound = std::max(bound, std::abs(monic[static_cast<std::size_t>(i)]));
  std::vector<Complex> z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = std::polar(0.5 + 0.5 * bound, 0.4 + 2.0 * std::numbers::pi * i / n);
  for (int it = 0; it < max_iter; ++it) {
    double change = 0.0;
    for (int i = 0; i < n; ++i) {
      Complex denom = 1.0;
      for (int j = 0; j < n; ++j) {
        if (j != i) denom *= z[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(j)];
      }
      const Complex step = eval(z[static_cast<std::size_t>(i)]) / denom;
      z[static_cast<std::size_t>(i)] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-15) break;
  }
  return z;
}

std::vector<Complex> matrix_exp_apply(const std::vector<Complex>& a, int n, Complex z, const std::vector<Complex>& x0) {
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = z * a[static_cast<std::size_t>(i * n + j)];
  }
  const Eigen::MatrixXcd e = m.exp();
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = x0[static_cast<std::size_t>(i)];
  const Eigen::VectorXcd out = e * v;
  return std::vector<Complex>(out.data(), out.data() + n);
}

int polyline_winding(const std::vector<Complex>& values) {
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Complex a = values[i];
    const Complex b = values[(i + 1) % values.size()];
    total += std::arg(b / a);
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace oracle
