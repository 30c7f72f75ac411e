#pragma once

// Linear and affine subspaces, cones around a vector 2-plane, hyperplane
// general position, and the inversions x -> x/|x|^2 (centered anywhere)
// together with the sphere <-> plane correspondence they induce.
//
// All predicates are exact over the rationals.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "analytica/errors.hpp"
#include "analytica/oracle.hpp"
#include "analytica/rational.hpp"

namespace analytica {

// Kernel of a nonzero covector, canonicalized so the first nonzero entry of
// the normal is 1.
class Hyperplane {
 public:
  explicit Hyperplane(RVec normal) : normal_(std::move(normal)) {
    auto it = std::find_if(normal_.begin(), normal_.end(), [](const Rational& q) { return q != 0; });
    if (it == normal_.end()) throw GeometryError("hyperplane normal must be nonzero");
    const Rational lead = *it;
    for (auto& q : normal_) q /= lead;
  }

  const RVec& normal() const noexcept { return normal_; }
  std::size_t dimension() const noexcept { return normal_.size(); }
  bool contains(std::span<const Rational> x) const { return dot(normal_, x) == 0; }

  // n x (n-1) basis of the hyperplane: for every free coordinate k the vector
  // e_k - normal_k e_j, j being the first nonzero coordinate of the normal.
  RMatrix chart() const {
    if (dimension() < 2) throw GeometryError("a hyperplane chart needs n >= 2");
    return kernel(RMatrix::from_rows({normal_}));
  }

  friend bool operator==(const Hyperplane&, const Hyperplane&) = default;

 private:
  RVec normal_;
};

class VectorPlane2 {
 public:
  VectorPlane2(RVec a, RVec b) : a_(std::move(a)), b_(std::move(b)) {
    require_same_size(a_, b_);
    if (rank_of_columns({a_, b_}) != 2) throw GeometryError("2-plane basis must have rank 2");
  }

  const RVec& first() const noexcept { return a_; }
  const RVec& second() const noexcept { return b_; }
  std::size_t dimension() const noexcept { return a_.size(); }
  RMatrix basis() const { return RMatrix::from_columns({a_, b_}); }

  // Orthogonal projection onto the plane, exact.
  RVec project(std::span<const Rational> p) const {
    const Rational g11 = norm2(a_), g12 = dot(a_, b_), g22 = norm2(b_);
    const Rational det = g11 * g22 - g12 * g12;
    const Rational pa = dot(a_, p), pb = dot(b_, p);
    const Rational s = (g22 * pa - g12 * pb) / det;
    const Rational t = (g11 * pb - g12 * pa) / det;
    return s * a_ + t * b_;
  }

  bool contains(std::span<const Rational> p) const { return rank_of_columns({a_, b_, RVec(p.begin(), p.end())}) == 2; }

  bool same_plane(const VectorPlane2& o) const { return contains(o.a_) && contains(o.b_); }

 private:
  RVec a_, b_;
};

class AffinePlane2 {
 public:
  AffinePlane2(RVec base, RVec u, RVec v) : base_(std::move(base)), u_(std::move(u)), v_(std::move(v)) {
    require_same_size(base_, u_);
    require_same_size(base_, v_);
    if (rank_of_columns({u_, v_}) != 2) throw GeometryError("affine 2-plane directions must have rank 2");
  }

  const RVec& base() const noexcept { return base_; }
  const RVec& u() const noexcept { return u_; }
  const RVec& v() const noexcept { return v_; }
  std::size_t dimension() const noexcept { return base_.size(); }
  VectorPlane2 direction() const { return VectorPlane2(u_, v_); }

  RVec at(const Rational& s, const Rational& t) const { return base_ + s * u_ + t * v_; }

  bool contains(std::span<const Rational> x) const {
    return rank_of_columns({u_, v_, RVec(x.begin(), x.end()) - base_}) == 2;
  }

  bool passes_through_origin() const { return contains(zeros(dimension())); }

  // Set equality.
  bool same_plane(const AffinePlane2& o) const {
    return dimension() == o.dimension() && direction().same_plane(o.direction()) && contains(o.base_);
  }

 private:
  RVec base_, u_, v_;
};

class AffineLine {
 public:
  AffineLine(RVec base, RVec direction) : base_(std::move(base)), direction_(std::move(direction)) {
    require_same_size(base_, direction_);
    if (analytica::is_zero(direction_)) throw GeometryError("line direction must be nonzero");
  }
  const RVec& base() const noexcept { return base_; }
  const RVec& direction() const noexcept { return direction_; }
  RVec at(const Rational& s) const { return base_ + s * direction_; }

 private:
  RVec base_, direction_;
};

class Ball {
 public:
  Ball(RVec center, Rational radius) : center_(std::move(center)), radius_(std::move(radius)) {
    if (radius_ <= 0) throw GeometryError("ball radius must be positive");
  }
  const RVec& center() const noexcept { return center_; }
  const Rational& radius() const noexcept { return radius_; }
  // Open ball.
  bool contains(std::span<const Rational> x) const {
    return norm2(RVec(x.begin(), x.end()) - center_) < radius_ * radius_;
  }

 private:
  RVec center_;
  Rational radius_;
};

// Open cone {p : |p - proj_V p| < aperture * |p|} around a vector 2-plane V,
// optionally cut down to the ball of radius `window`.
class Cone {
 public:
  Cone(VectorPlane2 axis, Rational aperture, std::optional<Rational> window = std::nullopt)
      : axis_(std::move(axis)), aperture_(std::move(aperture)), window_(std::move(window)) {
    if (aperture_ <= 0 || aperture_ > 1) throw GeometryError("cone aperture must lie in (0, 1]");
    if (window_ && *window_ <= 0) throw GeometryError("cone window must be positive");
  }

  const VectorPlane2& axis() const noexcept { return axis_; }
  const Rational& aperture() const noexcept { return aperture_; }
  const std::optional<Rational>& window() const noexcept { return window_; }
  std::size_t dimension() const noexcept { return axis_.dimension(); }

 private:
  VectorPlane2 axis_;
  Rational aperture_;
  std::optional<Rational> window_;
};

// Scaling-invariant; the origin is a member. The window, if any, is ignored
// here (see in_cone_window).
inline bool in_cone(const Cone& c, std::span<const Rational> p) {
  if (p.size() != c.dimension()) throw DimensionError("point and cone dimensions differ");
  if (is_zero(p)) return true;
  const RVec perp = RVec(p.begin(), p.end()) - c.axis().project(p);
  return norm2(perp) < c.aperture() * c.aperture() * norm2(p);
}

inline bool in_cone_window(const Cone& c, std::span<const Rational> p) {
  if (!in_cone(c, p)) return false;
  return !c.window() || norm2(p) < *c.window() * *c.window();
}

// Whether the 2-plane vp belongs to the subcone C_V: vp lies inside the cone
// and meets the axis V in at least a line.
//
// Containment: the largest value of |u - proj_V u|^2 over unit u in vp is the
// larger root of det(M - lambda G) = 0, with G the Gram matrix of vp's basis
// and M the Gram matrix of its components orthogonal to V. Both roots lie
// below s = aperture^2 iff q(s) > 0 and s exceeds their mean, where
// q(lambda) = lambda^2 - tr(G^-1 M) lambda + det(M)/det(G).
inline bool plane_in_subcone(const Cone& c, const VectorPlane2& v, const VectorPlane2& vp) {
  if (v.dimension() != c.dimension() || vp.dimension() != c.dimension()) {
    throw DimensionError("plane and cone dimensions differ");
  }
  if (!v.same_plane(c.axis())) throw GeometryError("plane_in_subcone: V must be the axis of the cone");
  if (rank_of_columns({v.first(), v.second(), vp.first(), vp.second()}) > 3) return false;

  const RVec p1 = vp.first() - v.project(vp.first());
  const RVec p2 = vp.second() - v.project(vp.second());
  const Rational m11 = norm2(p1), m12 = dot(p1, p2), m22 = norm2(p2);
  const Rational g11 = norm2(vp.first()), g12 = dot(vp.first(), vp.second()), g22 = norm2(vp.second());
  const Rational det_g = g11 * g22 - g12 * g12;
  const Rational trace = (g22 * m11 - 2 * g12 * m12 + g11 * m22) / det_g;
  const Rational det = (m11 * m22 - m12 * m12) / det_g;
  const Rational s = c.aperture() * c.aperture();
  return s * s - trace * s + det > 0 && 2 * s > trace;
}

// Every subset of at most n normals is linearly independent.
inline bool general_position(const std::vector<Hyperplane>& hs, std::size_t n) {
  if (hs.empty()) throw GeometryError("general_position: no hyperplanes given");
  for (const auto& h : hs)
    if (h.dimension() != n) throw DimensionError("hyperplane of dimension " + std::to_string(h.dimension()));
  // Independence of every k-subset, k = min(m, n), implies it for smaller ones.
  const std::size_t k = std::min(hs.size(), n);
  std::vector<bool> pick(hs.size(), false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
  do {
    std::vector<RVec> rows;
    for (std::size_t i = 0; i < hs.size(); ++i)
      if (pick[i]) rows.push_back(hs[i].normal());
    if (rank(RMatrix::from_rows(rows)) != k) return false;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return true;
}

// x / |x|^2.
inline RVec invert_mu(std::span<const Rational> x) {
  const Rational r2 = norm2(x);
  if (r2 == 0) throw PoleError("inversion at its center", to_string(x));
  return (1 / r2) * RVec(x.begin(), x.end());
}

// mu(x - p) + p.
inline RVec invert_mu_centered(std::span<const Rational> x, std::span<const Rational> p) {
  require_same_size(x, p);
  const RVec c(p.begin(), p.end());
  return invert_mu(RVec(x.begin(), x.end()) - c) + c;
}

inline std::vector<double> invert_mu_centered(std::span<const double> x, std::span<const double> p) {
  std::vector<double> d(x.size());
  double r2 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    d[i] = x[i] - p[i];
    r2 += d[i] * d[i];
  }
  if (r2 == 0) throw PoleError("inversion at its center", to_string_doubles(x));
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = d[i] / r2 + p[i];
  return d;
}

// {x in span(W) : |x|^2 = c.x}, with W an n x 3 frame of rank 3 and c not
// orthogonal to span(W).
class SphereThroughOrigin {
 public:
  SphereThroughOrigin(RVec c, RMatrix frame) : c_(std::move(c)), frame_(std::move(frame)) {
    if (frame_.cols() != 3) throw GeometryError("sphere frame must have 3 columns");
    if (frame_.rows() != c_.size()) throw DimensionError("sphere frame and coefficient lengths differ");
    if (rank(frame_) != 3) throw GeometryError("sphere frame must have rank 3");
    const RMatrix wt = frame_.transpose();
    const RMatrix gram = wt * frame_;
    const RVec coords = *solve(gram, wt * c_);
    projected_c_ = frame_ * coords;
    if (is_zero(projected_c_)) throw GeometryError("degenerate sphere: c vanishes on the frame");
  }

  const RVec& c() const noexcept { return c_; }
  const RMatrix& frame() const noexcept { return frame_; }
  std::size_t dimension() const noexcept { return c_.size(); }
  // Orthogonal projection of c onto span(W); the point of the sphere
  // antipodal to the origin.
  const RVec& projected_c() const noexcept { return projected_c_; }

  bool in_span(std::span<const Rational> x) const {
    auto cols = frame_.columns();
    cols.emplace_back(x.begin(), x.end());
    return rank_of_columns(cols) == 3;
  }

  bool contains(std::span<const Rational> x) const { return in_span(x) && norm2(x) == dot(c_, x); }

  // The sphere has diameter |c_W| and touches the origin, so it sits in the
  // open unit ball iff |c_W| < 1.
  bool inside_unit_ball() const { return norm2(projected_c_) < 1; }

  // The second intersection of the line R*v with the sphere: (c.v/|v|^2) v.
  // v must lie in span(W) and not be orthogonal to c.
  RVec point_along(std::span<const Rational> v) const {
    if (!in_span(v)) throw GeometryError("direction not in the sphere's 3-space");
    const Rational cv = dot(c_, v);
    if (cv == 0) throw GeometryError("direction tangent to the sphere at the origin");
    return (cv / norm2(v)) * RVec(v.begin(), v.end());
  }

  bool same_sphere(const SphereThroughOrigin& o) const {
    if (dimension() != o.dimension()) return false;
    for (const auto& col : o.frame_.columns())
      if (!in_span(col)) return false;
    return projected_c_ == o.projected_c_;
  }

 private:
  RVec c_;
  RMatrix frame_;
  RVec projected_c_;
};

// The image of S minus the origin under mu: {y in span(W) : c.y = 1}, based
// at mu(c_W) = c_W/|c_W|^2.
inline AffinePlane2 sphere_to_plane(const SphereThroughOrigin& s) {
  const RVec& cw = s.projected_c();
  const RVec base = (1 / norm2(cw)) * cw;
  const RVec functional = s.frame().transpose() * s.c();
  const RMatrix k = kernel(RMatrix::from_rows({functional}));
  return AffinePlane2(base, s.frame() * k.column(0), s.frame() * k.column(1));
}

// Inverse of sphere_to_plane for a plane inside span(W) avoiding the origin.
inline SphereThroughOrigin plane_to_sphere(const AffinePlane2& q, const RMatrix& frame) {
  if (frame.rows() != q.dimension() || frame.cols() != 3) throw DimensionError("frame must be n x 3");
  auto in_span = [&](const RVec& x) {
    auto cols = frame.columns();
    cols.push_back(x);
    return rank_of_columns(cols) == rank(frame);
  };
  if (!in_span(q.base()) || !in_span(q.u()) || !in_span(q.v())) {
    throw GeometryError("plane does not lie in the span of the frame");
  }
  const RMatrix wt = frame.transpose();
  const RMatrix system = RMatrix::from_rows({wt * q.u(), wt * q.v(), wt * q.base()});
  const auto a = solve(system, RVec{0, 0, 1});
  if (!a) throw GeometryError("plane passes through the origin; no sphere through 0 maps onto it");
  return SphereThroughOrigin(frame * *a, frame);
}

// x / h(x), the chart sending level surfaces {h = l_1, l_2 = ... = 0} to
// affine planes. h = |x|^2 recovers invert_mu.
inline RVec level_surface_map(const FunctionOracle& h, std::span<const Rational> x) {
  const Rational v = h.evaluate_exact(x);
  if (v == 0) throw PoleError("level_surface_map: h vanishes", to_string(x));
  return (1 / v) * RVec(x.begin(), x.end());
}

}  // namespace analytica
