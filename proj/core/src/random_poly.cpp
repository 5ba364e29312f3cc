#include "cycle_census/random_poly.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cycle_census/error.hpp"
#include "cycle_census/sampling.hpp"

namespace cycle_census {

CoeffFamily::CoeffFamily(std::string name, int k, std::size_t param_dim, int coeff_degree, CoefficientMap coefficients)
    : name_(std::move(name)), k_(k), param_dim_(param_dim), coeff_degree_(coeff_degree), map_(std::move(coefficients)) {
  if (k_ < 1) throw Error(ErrorCode::kInvalidArgument, "polynomial degree k must be >= 1");
  if (param_dim_ < 1) throw Error(ErrorCode::kInvalidArgument, "parameter dimension must be >= 1");
  if (!map_) throw Error(ErrorCode::kInvalidArgument, "coefficient family needs a coefficient map");
}

CoeffFamily CoeffFamily::kac(int k) {
  const auto n = static_cast<std::size_t>(k) + 1;
  return CoeffFamily("kac", k, n, 1, [](std::span<const Complex> v) { return ComplexVector(v.begin(), v.end()); });
}

CoeffFamily CoeffFamily::roots_of_unity(int k) {
  return CoeffFamily("roots-of-unity", k, 1, 0, [k](std::span<const Complex>) {
    ComplexVector c(static_cast<std::size_t>(k) + 1, Complex{0.0, 0.0});
    c.front() = -1.0;
    c.back() = 1.0;
    return c;
  });
}

CoeffFamily CoeffFamily::unit_ends(int k) {
  return CoeffFamily("unit-ends", k, 1, 0, [k](std::span<const Complex>) {
    ComplexVector c(static_cast<std::size_t>(k) + 1, Complex{0.0, 0.0});
    c.front() = 1.0;
    c.back() = 1.0;
    return c;
  });
}

ComplexVector CoeffFamily::coefficients(std::span<const Complex> v) const {
  if (v.size() != param_dim_) {
    throw Error(ErrorCode::kInvalidArgument, "family '" + name_ + "' expects " + std::to_string(param_dim_) +
                                                 " parameters, got " + std::to_string(v.size()));
  }
  ComplexVector c = map_(v);
  if (c.size() != static_cast<std::size_t>(k_) + 1) {
    throw Error(ErrorCode::kInvalidArgument, "family '" + name_ + "' produced the wrong number of coefficients");
  }
  return c;
}

ComplexPoly CoeffFamily::instantiate(std::span<const Complex> v) const { return ComplexPoly(coefficients(v)); }

bool check_coefficient_conditions(const CoeffFamily& family, std::size_t samples, std::uint64_t seed, double tol) {
  double end_sup[2] = {0.0, 0.0};
  auto visit = [&](const ComplexVector& v) {
    const ComplexVector c = family.coefficients(v);
    for (const Complex& a : c) {
      if (std::abs(a) > 1.0 + tol) return false;
    }
    end_sup[0] = std::max(end_sup[0], std::abs(c.front()));
    end_sup[1] = std::max(end_sup[1], std::abs(c.back()));
    return true;
  };
  // Coordinate axes first: linear maps attain their sups there.
  const std::size_t n = family.param_dim();
  for (std::size_t j = 0; j < n; ++j) {
    ComplexVector e(n, Complex{0.0, 0.0});
    e[j] = 1.0;
    if (!visit(e)) return false;
  }
  for (std::size_t s = 0; s < samples; ++s) {
    Rng rng(mix_seed(seed, s));
    ComplexVector v = uniform_complex_ball(n, rng);
    if (s % 2 == 1) {
      const double norm = euclidean_norm(v);
      if (norm > 0.0)
        for (Complex& c : v) c /= norm;
    }
    if (!visit(v)) return false;
  }
  return end_sup[0] >= 1.0 - tol && end_sup[1] >= 1.0 - tol;
}

Annulus Annulus::symmetric(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorCode::kInvalidGeometry, "annulus epsilon must lie in (0,1), got " + std::to_string(epsilon));
  }
  return {1.0 - epsilon, 1.0 + epsilon};
}

Annulus Annulus::inverted() const {
  validate();
  return {1.0 / outer, 1.0 / inner};
}

void Annulus::validate() const {
  if (!(inner > 0.0 && inner < outer && std::isfinite(outer))) {
    throw Error(ErrorCode::kInvalidGeometry, "annulus needs 0 < inner < outer");
  }
}

AnnulusCounts annulus_counts_by_roots(const ComplexPoly& p, const Annulus& annulus) {
  annulus.validate();
  AnnulusCounts counts;
  for (const Complex& root : polynomial_roots(p)) {
    const double m = std::abs(root);
    if (m <= annulus.inner) ++counts.inside;
    else if (m < annulus.outer) ++counts.annulus;
    else ++counts.outside;
  }
  return counts;
}

AnnulusCounts annulus_counts_by_winding(const ComplexPoly& p, const Annulus& annulus) {
  annulus.validate();
  if (p.is_zero()) throw Error(ErrorCode::kZeroPolynomial, "cannot count zeros of the zero polynomial");
  WindingOptions options;
  options.initial_panels = std::max<std::size_t>(256, 8 * static_cast<std::size_t>(p.degree()));
  const AnalyticFunction f = [&p](Complex z) { return p(z); };
  const ZeroCountResult in = winding_zero_count(f, annulus.inner, options);
  const ZeroCountResult out = winding_zero_count(f, annulus.outer, options);
  if (in.is_degenerate() || out.is_degenerate()) {
    throw Error(ErrorCode::kNonConvergence, "polynomial vanishes on an annulus boundary circle");
  }
  AnnulusCounts counts;
  counts.inside = *in.count;
  counts.annulus = *out.count - *in.count;
  counts.outside = p.degree() - *out.count;
  return counts;
}

int annulus_zero_count(const CoeffFamily& family, std::span<const Complex> v, const Annulus& annulus) {
  return annulus_counts_by_roots(family.instantiate(v), annulus).annulus;
}

KacSample kac_sample(int k, double epsilon, std::uint64_t seed, std::size_t index) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "Kac experiment needs k >= 2");
  const Annulus annulus = Annulus::symmetric(epsilon);
  Rng rng(mix_seed(seed, index));
  const ComplexVector v = uniform_complex_ball(static_cast<std::size_t>(k) + 1, rng);
  const ComplexPoly p = CoeffFamily::kac(k).instantiate(v);
  KacSample sample;
  for (const Complex& root : polynomial_roots(p)) {
    const double m = std::abs(root);
    if (m <= annulus.inner) ++sample.counts.inside;
    else if (m < annulus.outer) ++sample.counts.annulus;
    else ++sample.counts.outside;
    sample.arguments.push_back(std::arg(root));
  }
  return sample;
}

KacResult kac_experiment(int k, std::size_t samples, double epsilon, std::uint64_t seed) {
  if (samples < 1) throw Error(ErrorCode::kInvalidArgument, "Kac experiment needs at least one sample");
  KacResult result;
  double fraction_sum = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    KacSample s = kac_sample(k, epsilon, seed, i);
    fraction_sum += static_cast<double>(s.counts.annulus) / static_cast<double>(k);
    result.arguments.insert(result.arguments.end(), s.arguments.begin(), s.arguments.end());
    result.per_sample.push_back(s.counts);
  }
  result.mean_fraction = fraction_sum / static_cast<double>(samples);
  return result;
}

KsResult uniformity_test(std::span<const double> angles) {
  std::vector<double> u;
  u.reserve(angles.size());
  for (double theta : angles) {
    double x = (theta + kPi) / kTwoPi;
    x -= std::floor(x);
    u.push_back(x);
  }
  return ks_uniform(std::move(u));
}

std::vector<RatioRow> expectation_lower_bound_check(std::span<const CoeffFamily> families, double epsilon,
                                                    std::size_t samples, std::uint64_t seed) {
  if (samples < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one sample per family");
  const Annulus annulus = Annulus::symmetric(epsilon);
  std::vector<RatioRow> rows;
  for (std::size_t f = 0; f < families.size(); ++f) {
    const CoeffFamily& family = families[f];
    std::vector<double> ratios;
    for (std::size_t i = 0; i < samples; ++i) {
      Rng rng(mix_seed(seed, f, i));
      const ComplexVector v = uniform_complex_ball(family.param_dim(), rng);
      ratios.push_back(static_cast<double>(annulus_zero_count(family, v, annulus)) / family.k());
    }
    double mean = 0.0;
    for (double r : ratios) mean += r;
    mean /= static_cast<double>(ratios.size());
    double ss = 0.0;
    for (double r : ratios) ss += (r - mean) * (r - mean);
    const double var = ratios.size() > 1 ? ss / static_cast<double>(ratios.size() - 1) : 0.0;
    rows.push_back({family.k(), mean, std::sqrt(var / static_cast<double>(ratios.size())), ratios.size()});
  }
  return rows;
}

bool is_monotone_within_noise(std::span<const RatioRow> rows, double sigmas) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double se = std::hypot(rows[i].standard_error, rows[i - 1].standard_error);
    if (rows[i].ratio < rows[i - 1].ratio - sigmas * se) return false;
  }
  return true;
}

}  // namespace cycle_census
