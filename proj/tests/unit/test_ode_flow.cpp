#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cycle_census/error.hpp"
#include "cycle_census/ode_flow.hpp"
#include "cycle_census/sampling.hpp"
#include "oracles.hpp"

using namespace cycle_census;

TEST(OdeFlow, ZeroFieldIsConstant) {
  OdeFieldSpec spec;
  spec.dimension = 2;
  const OdeFlowGeometry g = ode_flow_geometry(spec, 0);
  const ParametricFamily f = ode_flow_family(spec, 0.5 * g.R, 0);
  const ComplexVector v = {Complex(0.4, 0.1), Complex(-0.2)};
  for (Complex z : {Complex(0.0), Complex(0.3, 0.2), Complex(-0.6)}) {
    EXPECT_LT(std::abs(f.evaluate(v, z) - v[0]), 1e-14);
  }
  const auto r = family_zero_count(f, v);
  ASSERT_TRUE(r.count);
  EXPECT_EQ(*r.count, 0);
}

// x_i' = x_{i+1}, x_N' = 0: x_1(z) = sum_j x0_{j+1} z^j / j!.
TEST(OdeFlow, NthDerivativeZeroGivesTaylorPolynomial) {
  OdeFieldSpec spec;
  spec.kind = OdeFieldSpec::Kind::kNthDerivativeZero;
  spec.dimension = 4;
  const ComplexVector a = ode_flow_matrix(spec, 0);
  const ComplexVector x0 = {0.3, Complex(-0.2, 0.1), 0.5, Complex(0.0, -0.4)};
  for (Complex z : {Complex(0.5), Complex(-0.3, 0.7), Complex(0.9, 0.1)}) {
    Complex expect = 0.0, term = 1.0;
    for (int j = 0; j < 4; ++j) {
      expect += x0[static_cast<std::size_t>(j)] * term;
      term *= z / static_cast<double>(j + 1);
    }
    EXPECT_LT(std::abs(ode_flow_solve(a, x0, z)[0] - expect), 1e-12);
  }
}

TEST(OdeFlow, LinearMatchesMatrixExponential) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    OdeFieldSpec spec;
    spec.kind = OdeFieldSpec::Kind::kRandomLinear;
    spec.dimension = 3 + static_cast<int>(seed % 3);
    spec.norm = 0.4;
    const ComplexVector a = ode_flow_matrix(spec, seed);
    Rng rng(seed);
    const ComplexVector x0 = uniform_complex_ball(static_cast<std::size_t>(spec.dimension), rng);
    const Complex z = std::polar(0.8, 0.9 * static_cast<double>(seed));
    const ComplexVector ours = ode_flow_solve(a, x0, z);
    const auto expect = oracle::matrix_exp_apply(a, spec.dimension, z, x0);
    for (std::size_t i = 0; i < ours.size(); ++i) EXPECT_LT(std::abs(ours[i] - expect[i]), 1e-11) << "seed " << seed;
  }
}

TEST(OdeFlow, ExplicitLinearFromJson) {
  const OdeFieldSpec spec = ode_field_from_json(R"({"kind":"linear","dimension":2,"matrix":[[0,1],[-1,0]]})");
  const ComplexVector a = ode_flow_matrix(spec, 0);
  const ComplexVector x0 = {1.0, 0.0};
  // x1 = cos z for the rotation generator.
  EXPECT_LT(std::abs(ode_flow_solve(a, x0, 0.7)[0] - std::cos(0.7)), 1e-12);
  EXPECT_THROW(ode_field_from_json(R"({"kind":"linear","dimension":2,"matrix":[[0,1]]})"), Error);
  EXPECT_THROW(ode_field_from_json(R"({"kind":"swirl"})"), Error);
}

TEST(OdeFlow, GeometryAndRadiusViolation) {
  OdeFieldSpec spec;
  spec.kind = OdeFieldSpec::Kind::kRandomLinear;
  spec.dimension = 3;
  spec.norm = 0.5;
  const OdeFlowGeometry g = ode_flow_geometry(spec, 4);
  EXPECT_NEAR(g.K1, 0.5, 1e-12);
  EXPECT_NEAR(g.K, 0.5 * spec.domain_radius, 1e-12);
  EXPECT_NEAR(g.R, 0.999 * std::min({spec.domain_radius / (4.0 * g.K), 1.0 / g.K1, 1.0}), 1e-15);
  try {
    ode_flow_family(spec, g.R, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRadiusViolation);
  }
  const ParametricFamily f = ode_flow_family(spec, 0.5 * g.R, 4);
  EXPECT_EQ(f.bound_M(), 2.0);
  EXPECT_NEAR(f.disk_radius(), 0.5, 1e-15);
}

// Property: |f_v| stays below the family bound over the parameter ball and disk.
TEST(OdeFlow, PropertyBoundedByM) {
  OdeFieldSpec spec;
  spec.kind = OdeFieldSpec::Kind::kRandomLinear;
  spec.dimension = 3;
  spec.norm = 0.8;
  const OdeFlowGeometry g = ode_flow_geometry(spec, 9);
  const ParametricFamily f = ode_flow_family(spec, 0.5 * g.R, 9);
  Rng rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    ComplexVector v = uniform_complex_ball(3, rng);
    for (Complex& c : v) c *= 1.5;
    const Complex z = std::polar(std::sqrt(u(rng)), kTwoPi * u(rng));
    ASSERT_LE(std::abs(f.evaluate(v, z)), f.bound_M()) << "trial " << trial;
  }
}
