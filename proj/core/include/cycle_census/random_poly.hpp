#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cycle_census/analytic_core.hpp"
#include "cycle_census/stats.hpp"

namespace cycle_census {

// P_{k,v}(z) = sum_i a_ik(v) z^i with coefficients polynomial in v in C^n.
class CoeffFamily {
 public:
  using CoefficientMap = std::function<ComplexVector(std::span<const Complex>)>;

  CoeffFamily(std::string name, int k, std::size_t param_dim, int coeff_degree, CoefficientMap coefficients);

  // a_ik(v) = v_{i+1}: the linear (Kac) case, n = k + 1.
  static CoeffFamily kac(int k);
  // z^k - 1 (no effective parameter).
  static CoeffFamily roots_of_unity(int k);
  // a_0 = a_k = 1, middle coefficients 0.
  static CoeffFamily unit_ends(int k);

  const std::string& name() const noexcept { return name_; }
  int k() const noexcept { return k_; }
  std::size_t param_dim() const noexcept { return param_dim_; }
  int coeff_degree() const noexcept { return coeff_degree_; }

  ComplexVector coefficients(std::span<const Complex> v) const;
  ComplexPoly instantiate(std::span<const Complex> v) const;

 private:
  std::string name_;
  int k_;
  std::size_t param_dim_;
  int coeff_degree_;
  CoefficientMap map_;
};

// Spot check of the coefficient conditions on `samples` points of the closed
// unit ball: |a_ik| <= 1 (middle), |a_0k|, |a_kk| <= 1 with a witness >= 1 - tol.
bool check_coefficient_conditions(const CoeffFamily& family, std::size_t samples, std::uint64_t seed,
                                  double tol = 1e-9);

// {inner < |z| < outer}.
struct Annulus {
  double inner = 0.9;
  double outer = 1.1;

  // 1 - eps < |z| < 1 + eps.
  static Annulus symmetric(double epsilon);
  // Image under z -> 1/z: 1/outer < |z| < 1/inner.
  Annulus inverted() const;
  void validate() const;
};

struct AnnulusCounts {
  int inside = 0;   // |z| <= inner
  int annulus = 0;  // inner < |z| < outer
  int outside = 0;  // |z| >= outer

  int total() const noexcept { return inside + annulus + outside; }
  bool operator==(const AnnulusCounts&) const = default;
};

// Classification of the roots from polynomial_roots.
AnnulusCounts annulus_counts_by_roots(const ComplexPoly& p, const Annulus& annulus);
// Argument-principle counts on |z| = inner and |z| = outer.
AnnulusCounts annulus_counts_by_winding(const ComplexPoly& p, const Annulus& annulus);

// Roots of P_{k,v} in the annulus. Throws ZeroPolynomial.
int annulus_zero_count(const CoeffFamily& family, std::span<const Complex> v, const Annulus& annulus);

struct KacSample {
  AnnulusCounts counts;
  std::vector<double> arguments;  // root arguments in (-pi, pi]
};

// One Kac draw: v uniform in the complex unit ball of C^{k+1}, seeded by mix_seed(seed, index).
KacSample kac_sample(int k, double epsilon, std::uint64_t seed, std::size_t index);

struct KacResult {
  double mean_fraction = 0.0;
  std::vector<double> arguments;
  std::vector<AnnulusCounts> per_sample;
};

KacResult kac_experiment(int k, std::size_t samples, double epsilon, std::uint64_t seed);

// KS statistic of (theta + pi) / (2 pi) against U[0,1).
KsResult uniformity_test(std::span<const double> angles);

struct RatioRow {
  int k = 0;
  double ratio = 0.0;           // E[annulus count] / k
  double standard_error = 0.0;  // of the ratio
  std::size_t samples = 0;
};

std::vector<RatioRow> expectation_lower_bound_check(std::span<const CoeffFamily> families, double epsilon,
                                                    std::size_t samples, std::uint64_t seed);

// Each ratio is at least the previous one minus 3 combined standard errors.
bool is_monotone_within_noise(std::span<const RatioRow> rows, double sigmas = 3.0);

}  // namespace cycle_census
