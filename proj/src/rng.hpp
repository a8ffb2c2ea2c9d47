#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace rtplan {

// Deterministic random stream. The draw algorithms are spelled out here
// instead of using std:: distributions, whose output is
// implementation-defined and would break cross-platform reproducibility.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller. A fresh pair is drawn every call (no cached spare), so the
  // stream position after n calls is always 2n draws.
  double normal(double mean = 0.0, double sd = 1.0) {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    double u2 = uniform01();
    double z = std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    return mean + sd * z;
  }

  // Uniform integer in [0, n). Modulo bias is below 2^-50 for the sizes
  // used here (populations, state counts).
  std::uint64_t below(std::uint64_t n) { return gen_() % n; }

private:
  std::mt19937_64 gen_;
};

// splitmix64 finalizer; mixes a master seed with two stream coordinates
// (typically iteration and individual index) into an independent sub-seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a,
                              std::uint64_t b) {
  std::uint64_t x = seed;
  for (std::uint64_t salt : {a + 0x9e3779b97f4a7c15ULL, b + 0xbf58476d1ce4e5b9ULL}) {
    x += salt;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    x = x ^ (x >> 31);
  }
  return x;
}

inline Rng sub_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return Rng(mix_seed(seed, a, b));
}

}  // namespace rtplan
