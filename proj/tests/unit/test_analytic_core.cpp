#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cycle_census/analytic_core.hpp"
#include "cycle_census/error.hpp"
#include "oracles.hpp"

using namespace cycle_census;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::kInvalidArgument;
}

// Greedy matching distance between two root multisets.
double multiset_distance(std::vector<Complex> a, std::vector<Complex> b) {
  double worst = 0.0;
  for (const Complex& x : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](Complex p, Complex q) { return std::abs(p - x) < std::abs(q - x); });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

}  // namespace

TEST(Winding, TripleZeroAtOrigin) {
  const auto r = winding_zero_count([](Complex z) { return z * z * z; }, 0.5);
  ASSERT_TRUE(r.count);
  EXPECT_EQ(*r.count, 3);
}

TEST(Winding, BlaschkeProductZeros) {
  const double s = 2.0 / 3.0;
  std::vector<Complex> zeros;
  for (int j = 0; j < 4; ++j) zeros.push_back(std::polar(s, 0.3 + kTwoPi * j / 4.0));
  auto b = [zeros](Complex z) {
    Complex acc = 1.0;
    for (const Complex& a : zeros) acc *= (z - a) / (1.0 - std::conj(a) * z);
    return acc;
  };
  const auto r = winding_zero_count(b, s * 1.01);
  ASSERT_TRUE(r.count);
  EXPECT_EQ(*r.count, 4);
}

TEST(Winding, PlacedRootsSixInside) {
  std::vector<Complex> roots;
  for (int j = 0; j < 6; ++j) roots.push_back(std::polar(0.3 + 0.1 * j, 1.1 * j));
  for (int j = 0; j < 4; ++j) roots.push_back(std::polar(1.2 + 0.2 * j, 0.7 * j + 0.2));
  const ComplexPoly p = ComplexPoly::from_roots(roots);
  const auto r = winding_zero_count([&p](Complex z) { return p(z); }, 1.0);
  ASSERT_TRUE(r.count);
  EXPECT_EQ(*r.count, 6);
}

TEST(Winding, ZeroOnContourIsDegenerate) {
  EXPECT_FALSE(winding_zero_count([](Complex z) { return z - 1.0; }, 1.0).count.has_value());
  EXPECT_FALSE(winding_zero_count([](Complex) { return Complex{0.0, 0.0}; }, 0.5).count.has_value());
}

TEST(Winding, MultiplicityCounts) {
  const auto r = winding_zero_count([](Complex z) { return std::pow(z - 0.2, 2) * (z + 0.1); }, 0.7);
  ASSERT_TRUE(r.count);
  EXPECT_EQ(*r.count, 3);
}

// Property: count equals the number of placed roots inside, over random
// radii and clustered roots (ties to the contour kept away by 1e-3).
TEST(Winding, PropertyMatchesPlacedRoots) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const double rho = 0.3 + u(rng);
    const int n = 1 + static_cast<int>(u(rng) * 14);
    std::vector<Complex> roots;
    int inside = 0;
    while (static_cast<int>(roots.size()) < n) {
      const double rad = 2.0 * rho * u(rng);
      if (std::abs(rad - rho) < 1e-3) continue;
      roots.push_back(std::polar(rad, kTwoPi * u(rng)));
      inside += rad < rho;
    }
    const ComplexPoly p = ComplexPoly::from_roots(roots, Complex(0.3, -2.0));
    const auto r = winding_zero_count([&p](Complex z) { return p(z); }, rho);
    ASSERT_TRUE(r.count) << "trial " << trial;
    ASSERT_EQ(*r.count, inside) << "trial " << trial;
  }
}

TEST(Jensen, ConstantModulusGivesZero) { EXPECT_DOUBLE_EQ(jensen_zero_bound(0.3, 0.3, 0.5), 0.0); }

TEST(Jensen, ErrorsOnGeometryAndOrder) {
  EXPECT_EQ(code_of([] { jensen_zero_bound(1.0, 0.0, 1.0); }), ErrorCode::kInvalidGeometry);
  EXPECT_EQ(code_of([] { jensen_zero_bound(1.0, 0.0, 0.0); }), ErrorCode::kInvalidGeometry);
  EXPECT_EQ(code_of([] { jensen_zero_bound(0.0, 1.0, 0.5); }), ErrorCode::kOrderViolation);
}

TEST(Jensen, ConstantMatchesClosedForm) {
  const double s = 2.0 / 3.0;
  const double big_r = (s + 1.0) / 2.0;
  EXPECT_NEAR(jensen_constant(s), 1.0 / std::log((big_r * big_r + s * s) / (2.0 * s * big_r)), 1e-14);
}

// The bound must hold for zeros placed exactly on the boundary of the s-disk,
// the extremal case of the Blaschke-factor argument.
TEST(Jensen, PropertyBoundHoldsForPolynomials) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const double s = 0.2 + 0.7 * u(rng);
    std::vector<Complex> roots;
    const int n = 1 + static_cast<int>(u(rng) * 8);
    for (int j = 0; j < n; ++j) roots.push_back(std::polar(s * (trial % 3 == 0 ? 1.0 : u(rng)), kTwoPi * u(rng)));
    const ComplexPoly p = ComplexPoly::from_roots(roots);
    const AnalyticFunction h = [&p](Complex z) { return p(z); };
    const LogSups sups = estimate_log_sups(h, s, 2048);
    ASSERT_LE(n, jensen_zero_bound(sups.outer, sups.inner, s) + 1e-9) << "trial " << trial;
  }
}

TEST(Roots, QuadraticAndRootsOfUnity) {
  auto r = polynomial_roots(ComplexPoly({1.0, 0.0, 1.0}));
  EXPECT_LT(multiset_distance(r, {Complex(0, 1), Complex(0, -1)}), 1e-12);
  for (int k : {3, 7, 20}) {
    ComplexVector c(static_cast<std::size_t>(k) + 1, 0.0);
    c[0] = -1.0;
    c.back() = 1.0;
    std::vector<Complex> expect;
    for (int j = 0; j < k; ++j) expect.push_back(std::polar(1.0, kTwoPi * j / k));
    EXPECT_LT(multiset_distance(polynomial_roots(ComplexPoly(c)), expect), 1e-12) << "k = " << k;
  }
}

TEST(Roots, RecoversPlacedDegree12) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Complex> roots;
    for (int j = 0; j < 12; ++j) roots.push_back({u(rng), u(rng)});
    const auto found = polynomial_roots(ComplexPoly::from_roots(roots));
    ASSERT_EQ(found.size(), 12u);
    EXPECT_LT(multiset_distance(found, roots), 1e-8) << "trial " << trial;
  }
}

TEST(Roots, AgreeWithDurandKerner) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 40; ++trial) {
    const int k = 2 + trial % 15;
    std::vector<Complex> c;
    for (int i = 0; i <= k; ++i) c.push_back({g(rng), g(rng)});
    const auto ours = polynomial_roots(ComplexPoly(c));
    const auto theirs = oracle::durand_kerner(c);
    EXPECT_LT(multiset_distance(ours, theirs), 1e-7) << "trial " << trial;
  }
}

TEST(Roots, ZeroPolynomialThrows) {
  EXPECT_EQ(code_of([] { polynomial_roots(ComplexPoly({0.0, 0.0})); }), ErrorCode::kZeroPolynomial);
}

TEST(ComplexPoly, ReversedAndDerivative) {
  const ComplexPoly p({1.0, 2.0, 3.0});
  const ComplexPoly r = p.reversed();
  ASSERT_EQ(r.degree(), 2);
  EXPECT_EQ(r.coeffs()[0], Complex(3.0));
  EXPECT_EQ(r.coeffs()[2], Complex(1.0));
  const ComplexPoly d = p.derivative();
  EXPECT_EQ(d.degree(), 1);
  EXPECT_EQ(d(Complex(2.0)), Complex(14.0));
  const auto [v, dv] = p.eval_with_derivative(Complex(0.5, 1.0));
  EXPECT_LT(std::abs(v - p(Complex(0.5, 1.0))), 1e-15);
  EXPECT_LT(std::abs(dv - d(Complex(0.5, 1.0))), 1e-15);
}
