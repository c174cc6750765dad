#pragma once

#include <cmath>
#include <cstdint>

#include "leafscope/types.hpp"

namespace leafscope {

// Counter-based generator: the n-th draw of stream s under seed k is a pure
// function of (k, s, n). Monte-Carlo drivers give each sample index its own
// stream, so results do not depend on how samples are spread over workers.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    // Box-Muller; 1 - u keeps the log argument in (0, 1]
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  // Uniform direction on the unit sphere S^{n-1}.
  Vec unit_vector(int n) {
    Vec v(n);
    double norm = 0.0;
    do {
      for (int i = 0; i < n; ++i) v[i] = normal();
      norm = v.norm();
    } while (norm < 1e-12);
    return v / norm;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace leafscope
