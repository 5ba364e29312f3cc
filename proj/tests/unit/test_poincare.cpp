#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cycle_census/error.hpp"
#include "cycle_census/planar_field.hpp"
#include "cycle_census/poincare.hpp"
#include "cycle_census/sampling.hpp"
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

PlanarField three_root_field(double c = 0.5) {
  return rigid_field(poly_from_real_roots(std::vector<double>{0.04, 0.09, 0.16}, c), 7);
}

}  // namespace

TEST(Solvers, V0ClosedForm) {
  const double n = Ellipsoid::theorem_a_budget(4);
  const PolarSystem sys = polar_reduce(v0_field(4, n));
  for (Complex w : {Complex(0.3), Complex(0.7), Complex(0.2, 0.5)}) {
    const Trajectory p = picard_solve(sys, w);
    const Trajectory r = rk_solve(sys, w);
    ASSERT_EQ(p.values.size(), p.theta_grid.size());
    for (std::size_t j = 0; j < p.values.size(); ++j) {
      const Complex expect = std::exp(n * p.theta_grid[j] / 2.0) * w;
      ASSERT_LT(std::abs(p.values[j] - expect), 1e-10);
      ASSERT_LT(std::abs(r.values[j] - expect), 1e-10);
    }
  }
}

TEST(Solvers, ZeroFieldIsConstant) {
  const PolarSystem sys = polar_reduce(PlanarField(3));
  const Trajectory p = picard_solve(sys, 0.4);
  for (const Complex& v : p.values) EXPECT_EQ(v, Complex(0.4));
  EXPECT_EQ(displacement(sys, 0.6), Complex(0.0));
}

TEST(Solvers, RigidMatchesLogisticClosedForm) {
  const double c = 0.3, u0 = 0.09;
  const PolarSystem sys = polar_reduce(rigid_field(std::vector<double>{-c * u0, c}, 3));
  for (double w : {0.1, 0.25, 0.4, 0.5}) {
    const Trajectory p = picard_solve(sys, w);
    const Trajectory r = rk_solve(sys, w);
    for (std::size_t j = 0; j < p.values.size(); j += 7) {
      const double expect = oracle::logistic_rigid_radius(c, u0, w, p.theta_grid[j]);
      ASSERT_NEAR(p.values[j].real(), expect, 1e-10) << "w " << w << " theta " << p.theta_grid[j];
      ASSERT_NEAR(r.values[j].real(), expect, 1e-10) << "w " << w << " theta " << p.theta_grid[j];
    }
  }
}

// Property: the return map agrees with RK4 on the Cartesian system (no polar reduction).
TEST(Solvers, PropertyReturnMapMatchesCartesianOracle) {
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 1 + trial % 5;
    const Ellipsoid e{1.0, Ellipsoid::theorem_a_budget(d), d};
    const PlanarField f = sample_ellipsoid(e, mix_seed(31, trial));
    const DisplacementMap map(polar_reduce(f));
    for (double w : {0.15, 0.45, 0.75}) {
      ASSERT_NEAR(w + map.real_displacement(w), oracle::return_radius(f, w), 1e-11) << "trial " << trial << " w " << w;
    }
  }
}

TEST(Solvers, PicardRejectsNonContractingSystem) {
  const PolarSystem sys = polar_reduce(v0_field(2, 50.0));
  EXPECT_EQ(code_of([&] { picard_solve(sys, 0.5); }), ErrorCode::kNoContraction);
}

TEST(Solvers, RkFailsLoudlyOnBlowUp) {
  // r' = r^3 blows up before theta = 2 pi when started at 0.75.
  PlanarField f(3);
  f.set_a(3, 3, 1.0);  // x^3
  f.set_a(3, 1, 1.0);  // x y^2
  f.set_b(3, 2, 1.0);  // x^2 y
  f.set_b(3, 0, 1.0);  // y^3
  const ErrorCode c = code_of([&] { rk_solve(polar_reduce(f), 0.75); });
  EXPECT_TRUE(c == ErrorCode::kStepUnderflow || c == ErrorCode::kNonConvergence) << static_cast<int>(c);
}

TEST(Displacement, RigidRootIsFixedPoint) {
  const DisplacementMap map(polar_reduce(three_root_field()));
  for (double w : {0.2, 0.3, 0.4}) EXPECT_LT(std::abs(map.real_displacement(w)), 1e-13);
  EXPECT_GT(std::abs(map.real_displacement(0.25)), 1e-6);
}

TEST(Guard, ExamplesAndSamples) {
  EXPECT_EQ(denominator_guard(polar_reduce(PlanarField(3))), 1.0);
  EXPECT_EQ(denominator_guard(polar_reduce(v0_field(3, 0.01))), 1.0);
  const Ellipsoid e{1.0, Ellipsoid::theorem_a_budget(3), 3};
  for (std::uint64_t i = 0; i < 200; ++i) {
    ASSERT_GT(denominator_guard(polar_reduce(sample_ellipsoid(e, mix_seed(3, i)))), 0.5);
  }
}

TEST(CountCycles, RigidThreeRoots) {
  const CycleCount c = count_limit_cycles(three_root_field(), 0.5);
  ASSERT_TRUE(c.real_cycles);
  EXPECT_EQ(*c.real_cycles, 3);
  ASSERT_EQ(c.cycle_radii.size(), 3u);
  EXPECT_NEAR(c.cycle_radii[0], 0.2, 1e-8);
  EXPECT_NEAR(c.cycle_radii[1], 0.3, 1e-8);
  EXPECT_NEAR(c.cycle_radii[2], 0.4, 1e-8);
  EXPECT_FALSE(c.is_center);
  EXPECT_EQ(c.tangential_flags, 0);
}

TEST(CountCycles, V0AndCenter) {
  const CycleCount v0 = count_limit_cycles(v0_field(3, 0.01), 0.5);
  ASSERT_TRUE(v0.real_cycles);
  EXPECT_EQ(*v0.real_cycles, 0);
  EXPECT_FALSE(v0.is_center);
  ASSERT_TRUE(v0.complex_zero_count);
  EXPECT_EQ(*v0.complex_zero_count, 1);

  const CycleCount zero = count_limit_cycles(PlanarField(3), 0.5);
  EXPECT_TRUE(zero.is_center);
  EXPECT_FALSE(zero.real_cycles);
  EXPECT_FALSE(zero.complex_zero_count);
}

TEST(CountCycles, RejectsBadArguments) {
  EXPECT_EQ(code_of([] { count_limit_cycles(v0_field(2, 0.01), 0.9); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { count_limit_cycles(v0_field(2, 0.01), 0.0); }), ErrorCode::kInvalidArgument);
}

// The complex count against an independent tabulation: p on |w| = 1/2 from
// the RK solver, winding of the sampled polyline.
TEST(ComplexCount, RigidMatchesTabulatedWinding) {
  const PlanarField f = three_root_field();
  const PolarSystem sys = polar_reduce(f);
  std::vector<Complex> values;
  for (int j = 0; j < 720; ++j) {
    const Complex w = std::polar(0.5, kTwoPi * j / 720.0);
    values.push_back(rk_solve(sys, w).values.back() - w);
  }
  const int expect = oracle::polyline_winding(values);
  EXPECT_GE(expect, 7);
  const ZeroCountResult z = complex_displacement_count(f, std::max(Ellipsoid::theorem_a_budget(7), f.norm()));
  ASSERT_TRUE(z.count);
  EXPECT_EQ(*z.count, expect);
}

TEST(ComplexCount, ZeroFieldIsDegenerate) {
  EXPECT_FALSE(complex_displacement_count(PlanarField(2), Ellipsoid::theorem_a_budget(2)).count);
}

TEST(ComplexCount, NormalisationPinsV0) {
  const double n = Ellipsoid::theorem_a_budget(3);
  EXPECT_NEAR(displacement_normalizer(n), std::expm1(kPi * n) / 2.0, 1e-18);
  EXPECT_NEAR(displacement(polar_reduce(v0_field(3, n)), 0.5).real(), displacement_normalizer(n), 1e-14);
  EXPECT_DOUBLE_EQ(displacement_bound(3, n), 16.0 * kPi * 3.0 * n);
}

// Property: cycle counts do not depend on the choice of axes.
TEST(CountCycles, PropertyRotationInvariance) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 12; ++trial) {
    const double r1 = 0.02 + 0.08 * u(rng);
    const double r2 = r1 + 0.05 + 0.05 * u(rng);
    const PlanarField rigid = rigid_field(poly_from_real_roots(std::vector<double>{r1, r2}, 0.05), 5);
    const Ellipsoid e{1.0, 1e-5, 5};
    const PlanarField f = rigid + sample_ellipsoid(e, mix_seed(43, trial));
    const CycleCount base = count_limit_cycles(f, 0.5);
    const CycleCount turned = count_limit_cycles(rotate_field(f, kTwoPi * u(rng)), 0.5);
    ASSERT_TRUE(base.real_cycles && turned.real_cycles);
    ASSERT_EQ(*base.real_cycles, 2) << "trial " << trial;
    ASSERT_EQ(*turned.real_cycles, *base.real_cycles) << "trial " << trial;
  }
}

TEST(SolverConfigJson, RoundTripAndValidation) {
  SolverConfig cfg;
  cfg.theta_points = 512;
  cfg.rk_tol = 1e-10;
  const SolverConfig back = solver_config_from_json(solver_config_to_json(cfg));
  EXPECT_EQ(back.theta_points, 512);
  EXPECT_EQ(back.rk_tol, 1e-10);
  EXPECT_THROW(solver_config_from_json(R"({"theta_pointz": 10})"), Error);
  cfg.theta_points = 511;
  EXPECT_THROW(cfg.validate(), Error);
}
