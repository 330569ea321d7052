#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace convexkit {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kFourPi = 4.0 * std::numbers::pi;

/// Geometric tolerance. `relative` is scaled by the diameter of the object a
/// test is applied to; all coplanarity, vertex-on-plane and closedness tests
/// go through this one value.
struct Tolerance {
  double relative = 1e-9;

  double absolute(double scale) const { return relative * (scale > 0.0 ? scale : 1.0); }
};

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

inline bool all_finite(const Vec3& v) { return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z()); }
inline bool all_finite(const Vec2& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }

/// Signed area of a planar polygon, positive for counterclockwise order.
inline double signed_area(std::span<const Vec2> polygon) {
  double twice = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) twice += cross2(polygon[i], polygon[(i + 1) % n]);
  return 0.5 * twice;
}

/// Largest pairwise distance, computed by brute force.
template <typename Point>
double diameter(std::span<const Point> points) {
  double best = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) best = std::max(best, (points[i] - points[j]).norm());
  return best;
}

/// Vector area of a closed 3-D polygon (Newell). Its norm is the polygon area
/// and its direction the normal of the counterclockwise side.
inline Vec3 vector_area(std::span<const Vec3> polygon) {
  Vec3 sum = Vec3::Zero();
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) sum += polygon[i].cross(polygon[(i + 1) % n]);
  return 0.5 * sum;
}

/// Interior angle at corner `k` of a counterclockwise polygon, in [0, 2pi).
inline double corner_angle(std::span<const Vec2> polygon, std::size_t k) {
  const std::size_t n = polygon.size();
  const Vec2 to_next = polygon[(k + 1) % n] - polygon[k];
  const Vec2 to_prev = polygon[(k + n - 1) % n] - polygon[k];
  double a = std::atan2(cross2(to_next, to_prev), to_next.dot(to_prev));
  if (a < 0.0) a += kTwoPi;
  return a;
}

/// Distance from `p` to the closed segment [a, b].
inline double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double s = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return (a + s * ab - p).norm();
}

/// Solid angle of the spherical triangle with unit vertices a, b, c, signed by
/// the orientation of (a, b, c) (Van Oosterom-Strackee).
inline double signed_solid_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double numerator = a.dot(b.cross(c));
  const double denominator = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  return 2.0 * std::atan2(numerator, denominator);
}

}  // namespace convexkit
