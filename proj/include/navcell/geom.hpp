#pragma once

// Geometric value types, exact orientation/incircle predicates, and the
// distance helpers shared by decomposition, evaluation and the barrier guard.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace navcell {

/// Centralized tolerances. Predicates never use these; only snapping,
/// deduplication and convex minimization do.
namespace tol {
inline constexpr double kSnap = 1e-12;
inline constexpr double kConvexMin = 1e-9;
inline constexpr double kDegenerateAreaFraction = 1e-12;
}  // namespace tol

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr double operator[](std::size_t i) const { return i == 0 ? x : y; }
  constexpr double& operator[](std::size_t i) { return i == 0 ? x : y; }
  static constexpr std::size_t size() { return 2; }

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {a.x * s, a.y * s}; }
  friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
  friend constexpr auto operator<=>(Vec2 a, Vec2 b) = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }
  static constexpr std::size_t size() { return 3; }

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return {a.x * s, a.y * s, a.z * s}; }
  friend constexpr Vec3 operator/(Vec3 a, double s) { return {a.x / s, a.y / s, a.z / s}; }
  friend constexpr bool operator==(Vec3 a, Vec3 b) = default;
  friend constexpr auto operator<=>(Vec3 a, Vec3 b) = default;
};

using Point2 = Vec2;
using Point3 = Vec3;

template <typename V>
concept Vector = std::same_as<V, Vec2> || std::same_as<V, Vec3>;

template <Vector V>
constexpr double dot(V a, V b) {
  double s = 0.0;
  for (std::size_t i = 0; i < V::size(); ++i) s += a[i] * b[i];
  return s;
}

template <Vector V>
inline double norm(V a) {
  return std::sqrt(dot(a, a));
}

template <Vector V>
inline double distance(V a, V b) {
  return norm(a - b);
}

constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

template <Vector V>
inline bool is_finite(V a) {
  for (std::size_t i = 0; i < V::size(); ++i)
    if (!std::isfinite(a[i])) return false;
  return true;
}

template <Vector V>
struct Segment {
  V a;
  V b;

  double length() const { return distance(a, b); }
  V midpoint() const { return (a + b) * 0.5; }
};

using Segment2 = Segment<Vec2>;
using Segment3 = Segment<Vec3>;

/// Axis-aligned rectangle in the plane (2D workspace bounds).
struct Rect2 {
  Point2 min;
  Point2 max;

  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
  double area() const { return width() * height(); }
  double diagonal() const { return std::hypot(width(), height()); }
  bool contains(Point2 p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
};

struct Aabb3 {
  Point3 min;
  Point3 max;

  double extent(std::size_t axis) const { return max[axis] - min[axis]; }
  double volume() const { return extent(0) * extent(1) * extent(2); }
  Point3 center() const { return (min + max) * 0.5; }
  double diagonal() const { return distance(min, max); }
  bool valid() const { return min.x < max.x && min.y < max.y && min.z < max.z; }
  bool contains(Point3 p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
           p.z <= max.z;
  }
  /// Strict interior test, shrunk by `margin` on every side.
  bool interior_contains(Point3 p, double margin = 0.0) const {
    for (std::size_t i = 0; i < 3; ++i)
      if (!(p[i] > min[i] + margin && p[i] < max[i] - margin)) return false;
    return true;
  }
};

/// Axis-aligned rectangle embedded in 3D: `box` is flat along `normal_axis`.
struct FaceRect3 {
  Aabb3 box;
  int normal_axis = 0;

  double area() const {
    double a = 1.0;
    for (std::size_t i = 0; i < 3; ++i)
      if (static_cast<int>(i) != normal_axis) a *= box.extent(i);
    return a;
  }
  Point3 center() const { return box.center(); }
  /// The two in-plane axes, ascending.
  std::array<int, 2> tangent_axes() const {
    return normal_axis == 0 ? std::array{1, 2} : (normal_axis == 1 ? std::array{0, 2} : std::array{0, 1});
  }
  double min_dimension() const {
    auto t = tangent_axes();
    return std::min(box.extent(t[0]), box.extent(t[1]));
  }
};

struct SimplePolygon {
  std::vector<Point2> vertices;

  std::size_t size() const { return vertices.size(); }
  Segment2 edge(std::size_t i) const { return {vertices[i], vertices[(i + 1) % vertices.size()]}; }

  double signed_area() const {
    double s = 0.0;
    for (std::size_t i = 0, n = vertices.size(); i < n; ++i)
      s += cross(vertices[i], vertices[(i + 1) % n]);
    return 0.5 * s;
  }
  double area() const { return std::abs(signed_area()); }
};

// ---------------------------------------------------------------------------
// Exact arithmetic on floating-point expansions (Shewchuk-style).

namespace detail {

inline constexpr double kEpsilon = std::numeric_limits<double>::epsilon() * 0.5;  // 2^-53

inline void two_sum(double a, double b, double& x, double& y) {
  x = a + b;
  const double bv = x - a;
  const double av = x - bv;
  y = (a - av) + (b - bv);
}

inline void two_product(double a, double b, double& x, double& y) {
  x = a * b;
  y = std::fma(a, b, -x);
}

/// Nonoverlapping expansion, components in increasing magnitude, zeros dropped.
class Expansion {
 public:
  Expansion() = default;
  explicit Expansion(double v) {
    if (v != 0.0) c_.push_back(v);
  }

  static Expansion difference(double a, double b) {
    double x, y;
    two_sum(a, -b, x, y);
    Expansion e;
    if (y != 0.0) e.c_.push_back(y);
    if (x != 0.0) e.c_.push_back(x);
    return e;
  }

  static Expansion product(double a, double b) {
    double x, y;
    two_product(a, b, x, y);
    Expansion e;
    if (y != 0.0) e.c_.push_back(y);
    if (x != 0.0) e.c_.push_back(x);
    return e;
  }

  void grow(double b) {
    std::vector<double> h;
    h.reserve(c_.size() + 1);
    double q = b;
    for (double e : c_) {
      double s, r;
      two_sum(q, e, s, r);
      if (r != 0.0) h.push_back(r);
      q = s;
    }
    if (q != 0.0) h.push_back(q);
    c_ = std::move(h);
  }

  Expansion& operator+=(const Expansion& o) {
    for (double v : o.c_) grow(v);
    return *this;
  }
  Expansion& operator-=(const Expansion& o) {
    for (double v : o.c_) grow(-v);
    return *this;
  }
  friend Expansion operator+(Expansion a, const Expansion& b) { return a += b; }
  friend Expansion operator-(Expansion a, const Expansion& b) { return a -= b; }

  friend Expansion operator*(const Expansion& a, const Expansion& b) {
    Expansion out;
    for (double bv : b.c_) {
      for (double av : a.c_) {
        double x, y;
        two_product(av, bv, x, y);
        out.grow(y);
        out.grow(x);
      }
    }
    return out;
  }

  int sign() const {
    if (c_.empty()) return 0;
    return c_.back() > 0.0 ? 1 : -1;
  }

 private:
  std::vector<double> c_;
};

inline int orient2d_exact(Point2 a, Point2 b, Point2 c) {
  // ax*by - ax*cy + bx*cy - bx*ay + cx*ay - cx*by
  Expansion e = Expansion::product(a.x, b.y);
  e -= Expansion::product(a.x, c.y);
  e += Expansion::product(b.x, c.y);
  e -= Expansion::product(b.x, a.y);
  e += Expansion::product(c.x, a.y);
  e -= Expansion::product(c.x, b.y);
  return e.sign();
}

inline int incircle_exact(Point2 a, Point2 b, Point2 c, Point2 d) {
  const Expansion adx = Expansion::difference(a.x, d.x), ady = Expansion::difference(a.y, d.y);
  const Expansion bdx = Expansion::difference(b.x, d.x), bdy = Expansion::difference(b.y, d.y);
  const Expansion cdx = Expansion::difference(c.x, d.x), cdy = Expansion::difference(c.y, d.y);
  const Expansion alift = adx * adx + ady * ady;
  const Expansion blift = bdx * bdx + bdy * bdy;
  const Expansion clift = cdx * cdx + cdy * cdy;
  const Expansion det = alift * (bdx * cdy - bdy * cdx) + blift * (cdx * ady - cdy * adx) +
                        clift * (adx * bdy - ady * bdx);
  return det.sign();
}

}  // namespace detail

/// Sign of the signed area of triangle abc: +1 counterclockwise, -1 clockwise,
/// 0 collinear. Exact for all finite inputs.
inline int orient2d(Point2 a, Point2 b, Point2 c) {
  constexpr double kErrBound = (3.0 + 16.0 * detail::kEpsilon) * detail::kEpsilon;
  const double detleft = (a.x - c.x) * (b.y - c.y);
  const double detright = (a.y - c.y) * (b.x - c.x);
  const double det = detleft - detright;
  if ((detleft > 0.0 && detright <= 0.0) || (detleft < 0.0 && detright >= 0.0) ||
      (detleft == 0.0 && detright == 0.0))
    return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
  const double errbound = kErrBound * (std::abs(detleft) + std::abs(detright));
  if (det >= errbound) return 1;
  if (-det >= errbound) return -1;
  return detail::orient2d_exact(a, b, c);
}

/// +1 if d lies strictly inside the circumcircle of counterclockwise abc,
/// -1 if outside, 0 if cocircular. Exact for all finite inputs.
inline int incircle(Point2 a, Point2 b, Point2 c, Point2 d) {
  constexpr double kErrBound = (10.0 + 96.0 * detail::kEpsilon) * detail::kEpsilon;
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;
  const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
  const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                           (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                           (std::abs(adxbdy) + std::abs(bdxady)) * clift;
  const double errbound = kErrBound * permanent;
  if (det > errbound) return 1;
  if (-det > errbound) return -1;
  return detail::incircle_exact(a, b, c, d);
}

/// True if closed segments pq and rs share at least one point.
inline bool segments_intersect(Point2 p, Point2 q, Point2 r, Point2 s) {
  const int o1 = orient2d(p, q, r), o2 = orient2d(p, q, s);
  const int o3 = orient2d(r, s, p), o4 = orient2d(r, s, q);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  auto on_segment = [](Point2 a, Point2 b, Point2 c) {
    return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= c.y &&
           c.y <= std::max(a.y, b.y);
  };
  if (o1 == 0 && on_segment(p, q, r)) return true;
  if (o2 == 0 && on_segment(p, q, s)) return true;
  if (o3 == 0 && on_segment(r, s, p)) return true;
  if (o4 == 0 && on_segment(r, s, q)) return true;
  return false;
}

/// True if the open segments pq and rs cross at a single interior point.
inline bool segments_properly_intersect(Point2 p, Point2 q, Point2 r, Point2 s) {
  const int o1 = orient2d(p, q, r), o2 = orient2d(p, q, s);
  const int o3 = orient2d(r, s, p), o4 = orient2d(r, s, q);
  return o1 * o2 < 0 && o3 * o4 < 0;
}

template <Vector V>
inline V closest_point_on_segment(V p, const Segment<V>& s) {
  const V d = s.b - s.a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) return s.a;
  const double t = std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
  return s.a + d * t;
}

/// Euclidean distance from p to the closed segment s.
template <Vector V>
inline double point_segment_distance(V p, const Segment<V>& s) {
  return distance(p, closest_point_on_segment(p, s));
}

/// Distance from p to the closed box (0 inside).
inline double point_box_distance(Point3 p, const Aabb3& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double d = std::max({b.min[i] - p[i], 0.0, p[i] - b.max[i]});
    s += d * d;
  }
  return std::sqrt(s);
}

/// Distance from a point inside `b` to the nearest face of `b`.
inline double point_box_boundary_distance_inside(Point3 p, const Aabb3& b) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 3; ++i) d = std::min({d, p[i] - b.min[i], b.max[i] - p[i]});
  return std::max(d, 0.0);
}

/// Distance from p to the boundary of a box, whether p is inside or outside.
inline double point_box_boundary_distance(Point3 p, const Aabb3& b) {
  if (b.contains(p)) return point_box_boundary_distance_inside(p, b);
  return point_box_distance(p, b);
}

/// Point-in-polygon by crossing parity; boundary points may go either way.
inline bool point_in_polygon(Point2 p, const SimplePolygon& poly) {
  bool inside = false;
  const auto& v = poly.vertices;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      const double xc = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
      if (p.x < xc) inside = !inside;
    }
  }
  return inside;
}

inline double point_polygon_boundary_distance(Point2 p, const SimplePolygon& poly) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) d = std::min(d, point_segment_distance(p, poly.edge(i)));
  return d;
}

/// Distance from p to the line through a and b (a != b).
template <Vector V>
inline double point_line_distance(V p, V a, V b) {
  const V d = b - a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) return distance(p, a);
  const V foot = a + d * (dot(p - a, d) / len2);
  return distance(p, foot);
}

// ---------------------------------------------------------------------------
// Minimum of ||x - qs|| + ||x - qg|| over a portal (Def. informative portal).

namespace detail {

/// Golden-section minimization of a convex function on [lo, hi].
template <typename F>
double golden_min(F&& f, double lo, double hi, int iterations) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations && (b - a) > 0.0; ++i) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return std::min({fc, fd, f(lo), f(hi)});
}

inline bool segment_crosses_face(Point3 p, Point3 q, const FaceRect3& face) {
  const int n = face.normal_axis;
  const double plane = face.box.min[n];
  const double dp = p[n] - plane, dq = q[n] - plane;
  if (dp * dq > 0.0 || dp == dq) return false;
  const double t = dp / (dp - dq);
  const Point3 x = p + (q - p) * t;
  const auto ax = face.tangent_axes();
  for (int a : ax)
    if (x[a] < face.box.min[a] || x[a] > face.box.max[a]) return false;
  return true;
}

}  // namespace detail

/// min over the closed segment of ||x-qs|| + ||x-qg||, to absolute tolerance 1e-9.
inline double ellipse_min_sum(const Segment2& region, Point2 qs, Point2 qg) {
  if (segments_intersect(region.a, region.b, qs, qg)) return distance(qs, qg);
  const Vec2 d = region.b - region.a;
  auto f = [&](double t) {
    const Point2 x = region.a + d * t;
    return distance(x, qs) + distance(x, qg);
  };
  return detail::golden_min(f, 0.0, 1.0, 200);
}

/// min over an axis-aligned face of ||x-qs|| + ||x-qg|| (nested convex search).
inline double ellipse_min_sum(const FaceRect3& face, Point3 qs, Point3 qg) {
  if (detail::segment_crosses_face(qs, qg, face)) return distance(qs, qg);
  const auto ax = face.tangent_axes();
  const double u0 = face.box.min[ax[0]], u1 = face.box.max[ax[0]];
  const double v0 = face.box.min[ax[1]], v1 = face.box.max[ax[1]];
  auto f = [&](double u, double v) {
    Point3 x = face.box.min;
    x[ax[0]] = u;
    x[ax[1]] = v;
    return distance(x, qs) + distance(x, qg);
  };
  auto inner = [&](double u) {
    return detail::golden_min([&](double v) { return f(u, v); }, v0, v1, 80);
  };
  return detail::golden_min(inner, u0, u1, 80);
}

}  // namespace navcell
