#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace srlab {

// Every random draw in the library goes through one of these, seeded once.
using Rng = std::mt19937_64;

constexpr std::uint64_t kDefaultSeed = 42;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

/// Uniform point in the box [0, L_0) x ... x [0, L_{m-1}).
inline std::vector<double> random_point(Rng& rng, std::span<const double> box) {
  std::vector<double> p(box.size());
  for (std::size_t j = 0; j < box.size(); ++j) p[j] = uniform(rng, 0.0, box[j]);
  return p;
}

/// Unit vector uniformly distributed on the sphere S^{n-1}.
inline std::vector<double> random_unit(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  double norm = 0.0;
  while (norm < 1e-12) {
    norm = 0.0;
    for (auto& x : v) {
      x = normal(rng);
      norm += x * x;
    }
  }
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  return v;
}

}  // namespace srlab
