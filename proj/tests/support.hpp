#pragma once

// Random generators shared by the property tests.

#include <cstdint>
#include <vector>

#include "analytica/analytica.hpp"

namespace analytica::testing {

inline HomogeneousForm random_form(SeededRng& rng, std::size_t n, unsigned d, std::int64_t bound = 1000,
                                   unsigned density_percent = 70) {
  RVec dense;
  for (std::size_t k = 0; k < monomial_basis(n, d).size(); ++k) {
    const bool keep = static_cast<unsigned>(rng.uniform_int(0, 99)) < density_percent;
    dense.push_back(keep ? rng.small_rational(bound, bound) : Rational(0));
  }
  return HomogeneousForm::from_dense(n, d, dense);
}

inline RVec random_point(SeededRng& rng, std::size_t n, std::int64_t bound = 20, std::int64_t den = 7) {
  RVec p(n);
  for (auto& x : p) x = rng.small_rational(bound, den);
  return p;
}

inline RVec random_nonzero_point(SeededRng& rng, std::size_t n, std::int64_t bound = 20, std::int64_t den = 7) {
  RVec p;
  do {
    p = random_point(rng, n, bound, den);
  } while (is_zero(p));
  return p;
}

inline RMatrix random_matrix(SeededRng& rng, std::size_t rows, std::size_t cols, std::int64_t bound = 5) {
  RMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.small_rational(bound, 3);
  return m;
}

// k hyperplanes in general position in R^n.
inline std::vector<Hyperplane> random_hyperplanes(SeededRng& rng, std::size_t n, std::size_t k) {
  for (;;) {
    std::vector<Hyperplane> hs;
    for (std::size_t i = 0; i < k; ++i) {
      RVec normal;
      do {
        normal = rng.small_vector(n, 4);
      } while (is_zero(normal));
      hs.emplace_back(normal);
    }
    if (general_position(hs, n)) return hs;
  }
}

// A non-degenerate sphere through the origin with a random rank-3 frame.
inline SphereThroughOrigin random_sphere(SeededRng& rng, std::size_t n) {
  for (;;) {
    const RMatrix frame = random_matrix(rng, n, 3);
    if (rank(frame) != 3) continue;
    const RVec c = random_point(rng, n, 5, 4);
    try {
      return SphereThroughOrigin(c, frame);
    } catch (const GeometryError&) {
    }
  }
}

// A rational point of s other than the origin.
inline RVec random_sphere_point(SeededRng& rng, const SphereThroughOrigin& s) {
  for (;;) {
    const RVec v = s.frame() * random_point(rng, 3, 9, 5);
    if (is_zero(v) || dot(s.c(), v) == 0) continue;
    return s.point_along(v);
  }
}

}  // namespace analytica::testing
