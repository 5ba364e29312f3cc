#include <benchmark/benchmark.h>

#include "cycle_census/analytic_core.hpp"
#include "cycle_census/planar_field.hpp"
#include "cycle_census/poincare.hpp"
#include "cycle_census/random_poly.hpp"
#include "cycle_census/sampling.hpp"

using namespace cycle_census;

namespace {

PlanarField sample_field(int degree, std::uint64_t seed) {
  return sample_ellipsoid(Ellipsoid{1.0, Ellipsoid::theorem_a_budget(degree), degree}, seed);
}

ComplexPoly kac_poly(int k, std::uint64_t seed) {
  const CoeffFamily kac = CoeffFamily::kac(k);
  Rng rng(seed);
  return kac.instantiate(uniform_complex_ball(kac.param_dim(), rng));
}

}  // namespace

static void BM_PicardSolve(benchmark::State& state) {
  const PolarSystem sys = polar_reduce(sample_field(static_cast<int>(state.range(0)), 11));
  for (auto _ : state) benchmark::DoNotOptimize(picard_solve(sys, Complex(0.3, 0.1)));
}
BENCHMARK(BM_PicardSolve)->Arg(3)->Arg(6)->Arg(10);

static void BM_RkSolve(benchmark::State& state) {
  const PolarSystem sys = polar_reduce(sample_field(static_cast<int>(state.range(0)), 11));
  for (auto _ : state) benchmark::DoNotOptimize(rk_solve(sys, Complex(0.3, 0.1)));
}
BENCHMARK(BM_RkSolve)->Arg(3)->Arg(6);

static void BM_WindingCount(benchmark::State& state) {
  const ComplexPoly p = kac_poly(static_cast<int>(state.range(0)), 5);
  const AnalyticFunction f = [&p](Complex z) { return p(z); };
  WindingOptions opts;
  opts.initial_panels = 8 * static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(winding_zero_count(f, 0.95, opts));
}
BENCHMARK(BM_WindingCount)->Arg(32)->Arg(200);

static void BM_PolynomialRoots(benchmark::State& state) {
  const ComplexPoly p = kac_poly(static_cast<int>(state.range(0)), 6);
  for (auto _ : state) benchmark::DoNotOptimize(polynomial_roots(p));
}
BENCHMARK(BM_PolynomialRoots)->Arg(12)->Arg(200);

static void BM_CountLimitCycles(benchmark::State& state) {
  const PlanarField f = sample_field(static_cast<int>(state.range(0)), 21);
  for (auto _ : state) benchmark::DoNotOptimize(count_limit_cycles(f, 0.5));
}
BENCHMARK(BM_CountLimitCycles)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
