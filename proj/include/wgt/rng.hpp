#pragma once

// Portable random streams.
//
// std::mt19937_64 is fully specified by the standard (including single-integer
// seeding), but the <random> distributions are not, so uniforms, integer
// draws and normals are derived here by hand:
//   uniform01  = (raw >> 11) * 2^-53                       in [0, 1)
//   index(k)   = floor(uniform01 * k)                       in [0, k)
//   normal     = Box-Muller, two uniforms per pair; the second value of the
//                pair is cached and returned by the next call.
// The same seed therefore yields the same stream on every platform.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace wgt {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  std::size_t index(std::size_t k) {
    auto i = static_cast<std::size_t>(uniform01() * static_cast<double>(k));
    return i < k ? i : k - 1;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  std::vector<double> normals(std::size_t count) {
    std::vector<double> out(count);
    for (auto& x : out) x = normal();
    return out;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace wgt
