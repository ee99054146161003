// Deterministic random sampling helpers.
//
// All randomness in the library flows through std::mt19937_64 (whose output
// sequence is fixed by the standard) combined with the explicit mappings
// below. std::*_distribution adapters are deliberately avoided: their
// algorithms are implementation-defined, and run artifacts must be
// reproducible bit-for-bit across standard libraries.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "alcs/errors.hpp"

namespace alcs {

// splitmix64 step; used to derive independent stream seeds from a base seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// n-th (1-based) output of the splitmix64 stream started at `base`.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t s = base;
  std::uint64_t out = 0;
  for (std::uint64_t i = 0; i <= stream; ++i) out = splitmix64(s);
  return out;
}

// Uniform double strictly inside (0,1): ((x >> 11) + 0.5) * 2^-53.
inline double uniform01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Uniform integer in [0, n) by masked rejection; n must be positive.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw input_error("uniform_below: n must be positive");
  std::uint64_t mask = n - 1;
  mask |= mask >> 1;
  mask |= mask >> 2;
  mask |= mask >> 4;
  mask |= mask >> 8;
  mask |= mask >> 16;
  mask |= mask >> 32;
  for (;;) {
    std::uint64_t v = rng() & mask;
    if (v < n) return v;
  }
}

// Standard normal via Box-Muller on two (0,1) uniforms.
inline double standard_normal(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

inline std::vector<double> standard_normal_vector(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = standard_normal(rng);
  return v;
}

// Unit-norm direction obtained by normalizing a standard-normal draw.
inline std::vector<double> unit_vector(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> v = standard_normal_vector(rng, n);
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  double inv = 1.0 / std::sqrt(norm2);
  for (auto& x : v) x *= inv;
  return v;
}

// k distinct indices drawn uniformly from [0, n), in sorted order.
// Partial Fisher-Yates over an explicit index array keeps the draw
// reproducible for a given engine state.
inline std::vector<std::size_t> sample_without_replacement(std::mt19937_64& rng,
                                                           std::size_t n, std::size_t k) {
  if (k > n) throw input_error("sample_without_replacement: k exceeds n");
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace alcs
