#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace radrect {

// mt19937_64 engine with self-contained distributions so that streams are
// reproducible independent of the standard library version.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : seed_(seed), eng_(mix(seed)) {}

  // decorrelated child stream, e.g. one per scene or per RANSAC iteration
  Rng fork(uint64_t stream) const {
    return Rng(mix(seed_ + 0x9e3779b97f4a7c15ull * (stream + 1)));
  }

  uint64_t bits() { return eng_(); }

  double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Box-Muller, no state carried between calls
  double normal() {
    double u1 = uniform01(), u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

  // unbiased integer in [0, n)
  uint64_t uniform_int(uint64_t n) {
    if (n <= 1) return 0;
    uint64_t lim = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do { v = eng_(); } while (v >= lim);
    return v % n;
  }

 private:
  static uint64_t mix(uint64_t s) {
    // splitmix64 finalizer
    s += 0x9e3779b97f4a7c15ull;
    s = (s ^ (s >> 30)) * 0xbf58476d1ce4e5b9ull;
    s = (s ^ (s >> 27)) * 0x94d049bb133111ebull;
    return s ^ (s >> 31);
  }

  uint64_t seed_ = 0;
  std::mt19937_64 eng_;
};

}  // namespace radrect
