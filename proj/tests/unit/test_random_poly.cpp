#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cycle_census/error.hpp"
#include "cycle_census/random_poly.hpp"
#include "cycle_census/sampling.hpp"
#include "oracles.hpp"

using namespace cycle_census;

TEST(Annulus, ValidationAndInversion) {
  EXPECT_THROW((Annulus{1.1, 0.9}.validate()), Error);
  EXPECT_THROW((Annulus{-0.1, 0.9}.validate()), Error);
  const Annulus a = Annulus::symmetric(0.1);
  EXPECT_DOUBLE_EQ(a.inner, 0.9);
  EXPECT_DOUBLE_EQ(a.outer, 1.1);
  const Annulus b = a.inverted();
  EXPECT_DOUBLE_EQ(b.inner, 1.0 / 1.1);
  EXPECT_DOUBLE_EQ(b.outer, 1.0 / 0.9);
}

TEST(AnnulusCount, Examples) {
  for (int k : {1, 5, 40}) {
    ComplexVector c(static_cast<std::size_t>(k) + 1, 0.0);
    c[0] = -1.0;
    c.back() = 1.0;
    const ComplexPoly p(c);
    EXPECT_EQ(annulus_counts_by_roots(p, Annulus::symmetric(0.05)).annulus, k);
    EXPECT_EQ(annulus_counts_by_winding(p, Annulus::symmetric(0.05)).annulus, k);
  }
  const ComplexPoly line({-2.0, 1.0});
  const AnnulusCounts c = annulus_counts_by_roots(line, Annulus::symmetric(0.5));
  EXPECT_EQ(c.annulus, 0);
  EXPECT_EQ(c.outside, 1);
}

// Roots and winding are independent counting methods and must agree exactly.
TEST(AnnulusCount, RootsAgreeWithWindingOnKac) {
  const CoeffFamily kac = CoeffFamily::kac(200);
  for (std::uint64_t i = 0; i < 8; ++i) {
    Rng rng(mix_seed(55, i));
    const ComplexPoly p = kac.instantiate(uniform_complex_ball(kac.param_dim(), rng));
    const Annulus a = Annulus::symmetric(0.1);
    try {
      EXPECT_EQ(annulus_counts_by_roots(p, a), annulus_counts_by_winding(p, a)) << "instance " << i;
    } catch (const Error& e) {
      // Refusal is only acceptable when a root really sits on a boundary circle.
      ASSERT_EQ(e.code(), ErrorCode::kNonConvergence);
      double gap = 1.0;
      for (const Complex& z : oracle::durand_kerner({p.coeffs().begin(), p.coeffs().end()})) {
        gap = std::min({gap, std::abs(std::abs(z) - a.inner), std::abs(std::abs(z) - a.outer)});
      }
      EXPECT_LT(gap, 1e-4) << "instance " << i;
    }
  }
}

TEST(AnnulusCount, RootsMatchDurandKernerOracle) {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 3 + trial;
    ComplexVector c;
    for (int i = 0; i <= k; ++i) c.push_back({g(rng), g(rng)});
    const Annulus a = Annulus::symmetric(0.15);
    AnnulusCounts expect;
    for (const Complex& z : oracle::durand_kerner(c)) {
      const double r = std::abs(z);
      if (r <= a.inner) ++expect.inside;
      else if (r >= a.outer) ++expect.outside;
      else ++expect.annulus;
    }
    EXPECT_EQ(annulus_counts_by_roots(ComplexPoly(c), a), expect) << "trial " << trial;
  }
}

// Property: z^k P(1/z) swaps inside and outside counts of the inverted annulus.
TEST(AnnulusCount, PropertyReversalDuality) {
  Rng rng(91);
  std::uniform_int_distribution<int> deg(2, 80);
  std::uniform_real_distribution<double> eps(0.02, 0.4);
  for (int trial = 0; trial < 60; ++trial) {
    const int k = deg(rng);
    const ComplexPoly p(uniform_complex_ball(static_cast<std::size_t>(k) + 1, rng));
    const Annulus a = Annulus::symmetric(eps(rng));
    const AnnulusCounts f = annulus_counts_by_roots(p, a);
    const AnnulusCounts b = annulus_counts_by_roots(p.reversed(), a.inverted());
    ASSERT_EQ(f.inside, b.outside) << "trial " << trial;
    ASSERT_EQ(f.outside, b.inside) << "trial " << trial;
    ASSERT_EQ(f.annulus, b.annulus) << "trial " << trial;
    ASSERT_EQ(f.total(), k);
  }
}

TEST(Kac, SampleConservesRootsAndIsDeterministic) {
  const KacSample a = kac_sample(60, 0.1, 7, 3);
  const KacSample b = kac_sample(60, 0.1, 7, 3);
  EXPECT_EQ(a.counts.total(), 60);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_EQ(a.arguments, b.arguments);
  for (double t : a.arguments) {
    EXPECT_GT(t, -kPi - 1e-15);
    EXPECT_LE(t, kPi);
  }
}

TEST(Kac, ExperimentConcentrates) {
  const KacResult r = kac_experiment(200, 10, 0.1, 5);
  EXPECT_GE(r.mean_fraction, 0.85);
  EXPECT_EQ(r.per_sample.size(), 10u);
  EXPECT_EQ(r.arguments.size(), 2000u);
}

TEST(Uniformity, EquispacedAndConstantAngles) {
  std::vector<double> grid(1000);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = -kPi + kTwoPi * (i + 0.5) / 1000.0;
  const KsResult u = uniformity_test(grid);
  EXPECT_LE(u.statistic, 1.0 / 1000.0 + 1e-12);
  EXPECT_GT(u.p_value, 0.999);
  EXPECT_LT(uniformity_test(std::vector<double>(1000, 0.2)).p_value, 1e-6);
}

TEST(LowerBound, DeterministicFamiliesHaveRatioOne) {
  std::vector<CoeffFamily> unity, ends;
  for (int k : {5, 17, 64}) {
    unity.push_back(CoeffFamily::roots_of_unity(k));
    ends.push_back(CoeffFamily::unit_ends(k));
  }
  for (const RatioRow& row : expectation_lower_bound_check(unity, 0.05, 3, 1)) EXPECT_DOUBLE_EQ(row.ratio, 1.0);
  for (const RatioRow& row : expectation_lower_bound_check(ends, 0.05, 3, 1)) EXPECT_DOUBLE_EQ(row.ratio, 1.0);
}

TEST(LowerBound, KacRatiosIncrease) {
  std::vector<CoeffFamily> fams;
  for (int k : {25, 50, 100, 200}) fams.push_back(CoeffFamily::kac(k));
  const auto rows = expectation_lower_bound_check(fams, 0.1, 30, 3);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_TRUE(is_monotone_within_noise(rows));
  EXPECT_GT(rows.back().ratio, rows.front().ratio);
  EXPECT_LE(rows.back().ratio, 1.0);
}

TEST(CoefficientConditions, BuiltInFamilies) {
  EXPECT_TRUE(check_coefficient_conditions(CoeffFamily::kac(20), 200, 4));
  EXPECT_TRUE(check_coefficient_conditions(CoeffFamily::roots_of_unity(20), 50, 4));
  EXPECT_TRUE(check_coefficient_conditions(CoeffFamily::unit_ends(20), 50, 4));
  const CoeffFamily doubled("doubled", 3, 4, 1, [](std::span<const Complex> v) {
    return ComplexVector{2.0 * v[0], v[1], v[2], v[3]};
  });
  EXPECT_FALSE(check_coefficient_conditions(doubled, 200, 4));
}

TEST(AnnulusZeroCount, ZeroPolynomialThrows) {
  const CoeffFamily kac = CoeffFamily::kac(4);
  const ComplexVector v(5, 0.0);
  try {
    annulus_zero_count(kac, v, Annulus::symmetric(0.1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroPolynomial);
  }
}
