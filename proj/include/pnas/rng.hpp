#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace pnas {

// Deterministic random source. std::mt19937_64 itself is fully specified by
// the standard, but the std distributions are not, so drawing through
// std::uniform_int_distribution would give different streams on different
// toolchains. Every draw here is defined purely in terms of the raw 64-bit
// engine output, which keeps seeded runs byte-identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform over [0, n). Modulo bias is below 2^-50 for any n used here.
  std::size_t index(std::size_t n) {
    assert(n > 0);
    return static_cast<std::size_t>(next_u64() % n);
  }

  // Uniform over the inclusive range [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    assert(lo <= hi);
    return lo + static_cast<std::int64_t>(
                    next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  // Uniform over [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  // Box-Muller without the usual cached second value: caching would make a
  // draw's result depend on the parity of earlier normal draws.
  double normal(double mean, double stddev) {
    double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
    double u2 = uniform01();
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    return mean + stddev * z;
  }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    assert(!v.empty());
    return v[index(v.size())];
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace pnas
