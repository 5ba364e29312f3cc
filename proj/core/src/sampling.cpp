#include "cycle_census/sampling.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

namespace cycle_census {

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) noexcept {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) noexcept {
  return mix_seed(mix_seed(master, stream), index);
}

std::vector<double> uniform_real_ball(std::size_t dim, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> x(dim);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& xi : x) {
      xi = gauss(rng);
      norm2 += xi * xi;
    }
  } while (norm2 == 0.0);
  const double radius = std::pow(unif(rng), 1.0 / static_cast<double>(dim));
  const double scale = radius / std::sqrt(norm2);
  for (double& xi : x) xi *= scale;
  return x;
}

ComplexVector uniform_complex_ball(std::size_t dim, Rng& rng) {
  const std::vector<double> x = uniform_real_ball(2 * dim, rng);
  ComplexVector v(dim);
  for (std::size_t i = 0; i < dim; ++i) v[i] = Complex{x[2 * i], x[2 * i + 1]};
  return v;
}

namespace {

constexpr std::array<unsigned, 32> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31,
                                              37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79,
                                              83, 89, 97, 101, 103, 107, 109, 113, 127, 131};

double radical_inverse(std::size_t index, unsigned base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

}  // namespace

ComplexVector halton_complex_ball(std::size_t dim, std::size_t index) {
  const std::size_t real_dim = 2 * dim;
  const boost::math::normal_distribution<double> normal;
  std::vector<double> x(real_dim);
  double norm2 = 0.0;
  // Skip index 0 (all coordinates 0) and offset so early points are spread.
  const std::size_t h = index + 17;
  for (std::size_t i = 0; i < real_dim; ++i) {
    const unsigned base = kPrimes[(i + 1) % kPrimes.size()];
    double u = radical_inverse(h, base);
    u = std::clamp(u, 1e-12, 1.0 - 1e-12);
    x[i] = boost::math::quantile(normal, u);
    norm2 += x[i] * x[i];
  }
  const double radius = std::pow(std::clamp(radical_inverse(h, kPrimes[0]), 1e-12, 1.0),
                                 1.0 / static_cast<double>(real_dim));
  const double scale = norm2 > 0.0 ? radius / std::sqrt(norm2) : 0.0;
  ComplexVector v(dim);
  for (std::size_t i = 0; i < dim; ++i) v[i] = Complex{x[2 * i] * scale, x[2 * i + 1] * scale};
  return v;
}

double euclidean_norm(std::span<const Complex> v) noexcept {
  double s = 0.0;
  for (const Complex& c : v) s += std::norm(c);
  return std::sqrt(s);
}

}  // namespace cycle_census
