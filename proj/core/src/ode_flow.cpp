#include "cycle_census/ode_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "cycle_census/error.hpp"
#include "cycle_census/sampling.hpp"

namespace cycle_census {

namespace {

Complex complex_from_json(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw Error(ErrorCode::kInvalidArgument, "expected a number or [re, im] pair");
}

double operator_norm(std::span<const Complex> matrix, int n) {
  Eigen::MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = matrix[static_cast<std::size_t>(i * n + j)];
  if (a.isZero(0.0)) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  return svd.singularValues()(0);
}

}  // namespace

OdeFieldSpec ode_field_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("ode field JSON: ") + e.what());
  }
  OdeFieldSpec spec;
  try {
    const std::string kind = j.value("kind", std::string("zero"));
    if (kind == "zero") spec.kind = OdeFieldSpec::Kind::kZero;
    else if (kind == "nth-derivative-zero") spec.kind = OdeFieldSpec::Kind::kNthDerivativeZero;
    else if (kind == "linear") spec.kind = OdeFieldSpec::Kind::kLinear;
    else if (kind == "random-linear") spec.kind = OdeFieldSpec::Kind::kRandomLinear;
    else throw Error(ErrorCode::kInvalidArgument, "unknown ode field kind '" + kind + "'");
    spec.domain_radius = j.value("r", 1.0);
    spec.norm = j.value("norm", 0.5);
    if (j.contains("matrix")) {
      const auto& rows = j.at("matrix");
      spec.dimension = static_cast<int>(rows.size());
      for (const auto& row : rows) {
        if (row.size() != rows.size()) throw Error(ErrorCode::kInvalidArgument, "ode field matrix must be square");
        for (const auto& entry : row) spec.matrix.push_back(complex_from_json(entry));
      }
    }
    spec.dimension = j.value("dimension", spec.dimension);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("ode field JSON: ") + e.what());
  }
  return spec;
}

ComplexVector ode_flow_matrix(const OdeFieldSpec& spec, std::uint64_t seed) {
  const int n = spec.dimension;
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "ode dimension must be >= 1");
  if (!(spec.domain_radius > 0.0)) throw Error(ErrorCode::kInvalidArgument, "ode domain radius must be positive");
  const auto size = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  ComplexVector a(size, Complex{0.0, 0.0});
  switch (spec.kind) {
    case OdeFieldSpec::Kind::kZero:
      break;
    case OdeFieldSpec::Kind::kNthDerivativeZero:
      for (int i = 0; i + 1 < n; ++i) a[static_cast<std::size_t>(i * n + i + 1)] = 1.0;
      break;
    case OdeFieldSpec::Kind::kLinear:
      if (spec.matrix.size() != size) {
        throw Error(ErrorCode::kInvalidArgument, "linear ode field needs an N x N matrix");
      }
      a = spec.matrix;
      break;
    case OdeFieldSpec::Kind::kRandomLinear: {
      if (!(spec.norm > 0.0)) throw Error(ErrorCode::kInvalidArgument, "random linear field needs norm > 0");
      Rng rng(seed);
      std::normal_distribution<double> gauss(0.0, 1.0);
      for (Complex& c : a) c = Complex{gauss(rng), gauss(rng)};
      const double norm = operator_norm(a, n);
      for (Complex& c : a) c *= spec.norm / norm;
      break;
    }
  }
  return a;
}

OdeFlowGeometry ode_flow_geometry(const OdeFieldSpec& spec, std::uint64_t seed) {
  const ComplexVector a = ode_flow_matrix(spec, seed);
  OdeFlowGeometry g;
  g.K1 = operator_norm(a, spec.dimension);
  g.K = g.K1 * spec.domain_radius;
  double bound = 1.0;
  if (g.K > 0.0) bound = std::min(bound, spec.domain_radius / (4.0 * g.K));
  if (g.K1 > 0.0) bound = std::min(bound, 1.0 / g.K1);
  g.R = 0.999 * bound;
  return g;
}

ComplexVector ode_flow_solve(std::span<const Complex> matrix, std::span<const Complex> x0, Complex z,
                             std::size_t nodes) {
  const std::size_t n = x0.size();
  if (matrix.size() != n * n) throw Error(ErrorCode::kInvalidArgument, "matrix and initial value sizes disagree");
  if (nodes < 3 || nodes % 2 == 0) throw Error(ErrorCode::kInvalidArgument, "Simpson grid needs an odd node count >= 3");
  // x(s z) = x0 + int_0^s A x(sigma z) z dsigma on s in [0, 1].
  const double h = 1.0 / static_cast<double>(nodes - 1);
  std::vector<Complex> x(nodes * n), next(nodes * n), rhs(nodes * n);
  for (std::size_t j = 0; j < nodes; ++j)
    for (std::size_t i = 0; i < n; ++i) x[j * n + i] = x0[i];
  const double scale = std::max(1.0, euclidean_norm(x0));
  double prev = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 200; ++iter) {
    for (std::size_t j = 0; j < nodes; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        Complex acc{0.0, 0.0};
        for (std::size_t m = 0; m < n; ++m) acc += matrix[i * n + m] * x[j * n + m];
        rhs[j * n + i] = acc * z;
      }
    }
    for (std::size_t i = 0; i < n; ++i) next[i] = x0[i];
    for (std::size_t m = 0; m + 2 < nodes; m += 2) {
      for (std::size_t i = 0; i < n; ++i) {
        const Complex f0 = rhs[m * n + i], f1 = rhs[(m + 1) * n + i], f2 = rhs[(m + 2) * n + i];
        const Complex base = next[m * n + i];
        next[(m + 1) * n + i] = base + (h / 12.0) * (5.0 * f0 + 8.0 * f1 - f2);
        next[(m + 2) * n + i] = base + (h / 3.0) * (f0 + 4.0 * f1 + f2);
      }
    }
    double diff = 0.0;
    for (std::size_t idx = 0; idx < x.size(); ++idx) diff = std::max(diff, std::abs(next[idx] - x[idx]));
    x.swap(next);
    // Stop at the rounding floor: tiny and no longer shrinking.
    if (diff <= 4e-15 * scale || (diff < 1e-12 * scale && diff >= 0.5 * prev)) break;
    prev = diff;
    if (!std::isfinite(diff)) throw Error(ErrorCode::kNonConvergence, "flow iteration left the finite range");
    if (iter == 199) throw Error(ErrorCode::kNonConvergence, "flow iteration did not converge in 200 steps");
  }
  return ComplexVector(x.end() - static_cast<std::ptrdiff_t>(n), x.end());
}

ParametricFamily ode_flow_family(const OdeFieldSpec& spec, double t, std::uint64_t seed) {
  const OdeFlowGeometry geom = ode_flow_geometry(spec, seed);
  if (!(t > 0.0) || t >= geom.R) {
    throw Error(ErrorCode::kRadiusViolation, "disk radius t = " + std::to_string(t) + " must lie in (0, R = " +
                                                 std::to_string(geom.R) + ")");
  }
  auto matrix = std::make_shared<const ComplexVector>(ode_flow_matrix(spec, seed));
  const double half_r = 0.5 * spec.domain_radius;
  const double big_r = geom.R;
  auto factory = [matrix, half_r, big_r](std::span<const Complex> v) -> AnalyticFunction {
    ComplexVector x0(v.begin(), v.end());
    for (Complex& c : x0) c *= half_r;
    return [matrix, x0 = std::move(x0), half_r, big_r](Complex z) {
      return ode_flow_solve(*matrix, x0, big_r * z)[0] / half_r;
    };
  };
  return ParametricFamily("ode-flow", static_cast<std::size_t>(spec.dimension), 2.0, 1.5, t / geom.R,
                          std::move(factory));
}

}  // namespace cycle_census
