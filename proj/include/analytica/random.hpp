#pragma once

#include <cstdint>
#include <random>

#include "analytica/rational.hpp"

namespace analytica {

// Seeded generator with draws defined directly on the engine output, so a
// seed reproduces the same sequence on every standard library.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [lo, hi]; the modulo bias is irrelevant for sampling.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(engine_() % span);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  Rational small_rational(std::int64_t max_num, std::int64_t max_den) {
    Rational q(uniform_int(-max_num, max_num), uniform_int(1, max_den));
    q.canonicalize();
    return q;
  }

  RVec small_vector(std::size_t n, std::int64_t bound) {
    RVec v(n);
    for (auto& x : v) x = uniform_int(-bound, bound);
    return v;
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace analytica
