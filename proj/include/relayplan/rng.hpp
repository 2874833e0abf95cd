#pragma once

// Deterministic random streams and Poisson sampling. Every stochastic step in
// the library draws from a Pcg32 derived from (seed, tag, indices) so results
// are bit-identical regardless of evaluation order or thread count.

#include <cmath>
#include <cstdint>

#include "relayplan/common.hpp"

namespace relayplan {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// PCG-XSH-RR 64/32 (O'Neill). Chosen over std engines because the standard
// does not pin distribution algorithms, and scenario files must reproduce
// byte-for-byte from a seed.
class Pcg32 {
 public:
  Pcg32(std::uint64_t seed, std::uint64_t stream) {
    state_ = 0;
    inc_ = (stream << 1u) | 1u;
    next_u32();
    state_ += seed;
    next_u32();
  }

  std::uint32_t next_u32() {
    std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  std::uint64_t next_u64() {
    std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_double() < p; }

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
};

// Independent stream for a (seed, tag, i, j) work item. Mixing through
// splitmix64 keeps streams decorrelated even for adjacent indices.
inline Pcg32 stream_rng(std::uint64_t seed, std::uint64_t tag, std::uint64_t i = 0,
                        std::uint64_t j = 0) {
  std::uint64_t s = splitmix64(seed ^ splitmix64(tag));
  std::uint64_t k = splitmix64(s ^ splitmix64(i + 0x9e3779b97f4a7c15ULL * (j + 1)));
  return Pcg32(k, splitmix64(k + 0x632be59bd9b4e019ULL));
}

namespace detail {

// Inversion by sequential search. Exact for small rates.
inline long poisson_inversion(double lambda, Pcg32& rng) {
  double u = rng.next_double();
  double p = std::exp(-lambda);
  double cdf = p;
  long k = 0;
  // cdf saturates below 1 in floating point; the guard bounds the walk.
  long cap = static_cast<long>(lambda + 40.0 * std::sqrt(lambda + 1.0) + 100.0);
  while (u > cdf && k < cap) {
    ++k;
    p *= lambda / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

// Transformed rejection (PTRS, Hormann 1993). Uniform draws only, no normal
// approximation; used for large rates where sequential search is slow.
inline long poisson_ptrs(double lambda, Pcg32& rng) {
  const double log_lambda = std::log(lambda);
  const double b = 0.931 + 2.53 * std::sqrt(lambda);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    double u = rng.next_double() - 0.5;
    double v = rng.next_double();
    double us = 0.5 - std::abs(u);
    double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<long>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    double k = kf;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        k * log_lambda - lambda - std::lgamma(k + 1.0)) {
      return static_cast<long>(kf);
    }
  }
}

}  // namespace detail

/// Draws from Poisson(lambda). Deterministic given the generator state.
inline long poisson_sample(double lambda, Pcg32& rng) {
  if (lambda < 0.0) throw ArgumentError("poisson_sample: lambda must be non-negative");
  if (lambda == 0.0) return 0;
  if (lambda < 30.0) return detail::poisson_inversion(lambda, rng);
  return detail::poisson_ptrs(lambda, rng);
}

// Stream tags for the library's stochastic steps.
namespace stream_tag {
inline constexpr std::uint64_t demand = 0x64656d616e640001ULL;
inline constexpr std::uint64_t disruption = 0x6469737275700001ULL;
inline constexpr std::uint64_t instance = 0x696e7374616e0001ULL;
}  // namespace stream_tag

}  // namespace relayplan
