#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of them call into the library code they check.

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using V2 = Eigen::Vector2d;
using V3 = Eigen::Vector3d;

/// Outward normal of face f of the cube [-1/2, 1/2]^3: +x, -x, +y, -y, +z, -z.
inline V3 cube_normal(int f) {
  V3 n = V3::Zero();
  n[f / 2] = f % 2 == 0 ? 1.0 : -1.0;
  return n;
}

inline bool segments_cross(const V2& p, const V2& q, const V2& a, const V2& b, double slack = 1e-12) {
  auto cross = [](const V2& u, const V2& v) { return u.x() * v.y() - u.y() * v.x(); };
  const V2 r = q - p, s = b - a;
  const double denom = cross(r, s);
  if (std::abs(denom) < 1e-15) return false;
  const double t = cross(a - p, s) / denom;
  const double u = cross(a - p, r) / denom;
  return t >= -slack && t <= 1 + slack && u >= -slack && u <= 1 + slack;
}

/// Shortest surface distance between points on faces fp and fq of the unit
/// cube, by rotating every simple face chain from fp to fq into the plane of
/// fp and keeping the straight segments that cross each unfolded edge.
inline double cube_distance(const V3& p, int fp, const V3& q, int fq) {
  if (fp == fq) return (p - q).norm();
  const V3 n0 = cube_normal(fp);
  const V3 e1 = cube_normal((fp / 2 * 2 + 2) % 6), e2 = n0.cross(e1);
  auto flat = [&](const V3& x) { return V2(x.dot(e1), x.dot(e2)); };
  double best = std::numeric_limits<double>::infinity();

  struct Motion {
    Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
    V3 t = V3::Zero();
    V3 operator()(const V3& x) const { return r * x + t; }
  };
  std::vector<int> chain{fp};
  std::vector<std::array<V2, 2>> crossings;
  std::function<void(const Motion&)> extend = [&](const Motion& m) {
    const int a = chain.back();
    for (int b = 0; b < 6; ++b) {
      if (b / 2 == a / 2 || std::find(chain.begin(), chain.end(), b) != chain.end()) continue;
      const V3 na = cube_normal(a), nb = cube_normal(b);
      const V3 axis = na.cross(nb);
      const V3 c = 0.5 * (na + nb);
      const Eigen::Matrix3d rot = Eigen::AngleAxisd(-std::numbers::pi / 2, axis).toRotationMatrix();
      Motion next;
      next.r = m.r * rot;
      next.t = m(c - rot * c);
      crossings.push_back({flat(m(c + 0.5 * axis)), flat(m(c - 0.5 * axis))});
      chain.push_back(b);
      if (b == fq) {
        const V2 from = flat(p), to = flat(next(q));
        bool ok = true;
        for (const auto& e : crossings) ok = ok && segments_cross(from, to, e[0], e[1]);
        if (ok) best = std::min(best, (to - from).norm());
      } else if (chain.size() < 6) {
        extend(next);
      }
      chain.pop_back();
      crossings.pop_back();
    }
  };
  extend(Motion{});
  return best;
}

/// Monte-Carlo area of {p : <p, x_j - x_i> <= u_j - u_i for all j} inside
/// the box center +- half_width.
inline double subgradient_area(const std::vector<V2>& nodes, const std::vector<double>& values, std::size_t i,
                               const V2& center, double half_width, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-half_width, half_width);
  std::size_t hits = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const V2 p = center + V2(u(rng), u(rng));
    bool inside = true;
    for (std::size_t j = 0; j < nodes.size() && inside; ++j)
      if (j != i && p.dot(nodes[j] - nodes[i]) > values[j] - values[i]) inside = false;
    hits += inside;
  }
  return 4.0 * half_width * half_width * static_cast<double>(hits) / static_cast<double>(samples);
}

/// Monte-Carlo measure of the directions for which vertex v maximizes the
/// height <u, x> over the vertex set.
inline double normal_cone_measure(const std::vector<V3>& vertices, std::size_t v, std::size_t samples,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::size_t hits = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const V3 u = V3(g(rng), g(rng), g(rng)).normalized();
    std::size_t arg = 0;
    for (std::size_t k = 1; k < vertices.size(); ++k)
      if (vertices[k].dot(u) > vertices[arg].dot(u)) arg = k;
    hits += arg == v;
  }
  return 4.0 * std::numbers::pi * static_cast<double>(hits) / static_cast<double>(samples);
}

/// Null-space dimension of a dense matrix by column-pivoted QR.
inline std::size_t kernel_dimension(const Eigen::MatrixXd& a, double relative_threshold = 1e-9) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(relative_threshold);
  return static_cast<std::size_t>(a.cols() - qr.rank());
}

/// Volume of the convex hull of a point set given as the union of simplices
/// from an interior point to every triangle of a face list.
inline double fan_volume(const std::vector<V3>& vertices, const std::vector<std::vector<std::size_t>>& faces) {
  V3 o = V3::Zero();
  for (const V3& v : vertices) o += v;
  o /= static_cast<double>(vertices.size());
  double vol = 0.0;
  for (const auto& f : faces)
    for (std::size_t k = 1; k + 1 < f.size(); ++k)
      vol += (vertices[f[0]] - o).dot((vertices[f[k]] - o).cross(vertices[f[k + 1]] - o)) / 6.0;
  return vol;
}

}  // namespace oracle
