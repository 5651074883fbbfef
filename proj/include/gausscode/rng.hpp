#pragma once

// Deterministic random number generation.
//
// The generator is xoshiro256++ (Blackman & Vigna), seeded through splitmix64.
// Substreams are derived by hashing (master seed, stream label, trial index)
// with splitmix64 rounds, so any trial of any experiment can be replayed in
// isolation and results are independent of worker count or execution order.
//
// Normal variates use the polar Box-Muller transform written out explicitly;
// nothing here depends on implementation-defined standard-library
// distributions, so a given seed yields a bit-identical stream everywhere.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <utility>

#include "gausscode/core.hpp"

namespace gausscode::rng {

struct splitmix64 {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
};

class xoshiro256pp {
 public:
  explicit xoshiro256pp(std::uint64_t seed) {
    splitmix64 sm{seed};
    for (auto& word : s_) word = sm.next();
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1): the top 53 bits scaled by 2^-53.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]: safe as a logarithm argument.
  double uniform01_open() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> s_;
};

// Substream seed for (master, label, index): FNV-1a over the label bytes,
// chained through three splitmix64 mixing rounds.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                                 std::uint64_t index) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  splitmix64 sm{master};
  const std::uint64_t m1 = sm.next();
  sm.state = m1 ^ h;
  const std::uint64_t m2 = sm.next();
  sm.state = m2 ^ index;
  return sm.next();
}

// Pair of independent standard normals (polar form of Box-Muller).
inline std::pair<double, double> standard_normal_pair(xoshiro256pp& g) {
  const double r = std::sqrt(-2.0 * std::log(g.uniform01_open()));
  const double theta = 2.0 * std::numbers::pi * g.uniform01();
  return {r * std::cos(theta), r * std::sin(theta)};
}

// Circularly symmetric complex normal with E|c|^2 = mean_sq: the modulus
// squared is Exp(mean_sq) and the phase is uniform, equivalently real and
// imaginary parts are iid N(0, mean_sq / 2).
inline cplx complex_normal(xoshiro256pp& g, double mean_sq) {
  const double radius = std::sqrt(-mean_sq * std::log(g.uniform01_open()));
  const double theta = 2.0 * std::numbers::pi * g.uniform01();
  return {radius * std::cos(theta), radius * std::sin(theta)};
}

}  // namespace gausscode::rng
