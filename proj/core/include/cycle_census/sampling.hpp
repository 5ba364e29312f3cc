#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "cycle_census/analytic_core.hpp"

namespace cycle_census {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; counter-based seed derivation for sample i of a run.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) noexcept;
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) noexcept;

// Uniform (Lebesgue) point in the closed real unit ball of R^dim.
std::vector<double> uniform_real_ball(std::size_t dim, Rng& rng);

// Uniform (Lebesgue) point in the complex unit ball of C^dim (= real ball in R^{2 dim}).
ComplexVector uniform_complex_ball(std::size_t dim, Rng& rng);

// Deterministic quasi-random points in the complex ball of C^dim: Halton
// coordinates mapped through the normal quantile (direction) and u^{1/(2 dim)}
// (radius). Point `index` does not depend on how many others are requested.
ComplexVector halton_complex_ball(std::size_t dim, std::size_t index);

double euclidean_norm(std::span<const Complex> v) noexcept;

}  // namespace cycle_census
