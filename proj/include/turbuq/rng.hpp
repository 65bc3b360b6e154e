#pragma once

// Seeded random helpers on top of std::mt19937_64. Draws are hand-rolled
// from raw engine output so streams are identical across standard
// libraries, which keeps generated datasets and checkpoints stable.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace turbuq {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // uniform in [0, 1)
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // standard normal, Box-Muller
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // uniform integer in [0, n), unbiased
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t x, r;
    do {
      x = engine_();
      r = x % n;
    } while (x - r > std::uint64_t(-1) - (n - 1));
    return r;
  }

  // Fisher-Yates
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace turbuq
