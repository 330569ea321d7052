#include "generators.hpp"

#include <cmath>

namespace convexkit::cli {

Vec3 random_unit(Rng& rng) {
  std::normal_distribution<double> g;
  Vec3 v;
  do v = Vec3(g(rng), g(rng), g(rng));
  while (v.norm() < 1e-6);
  return v.normalized();
}

ConvexPolytope random_hull(Rng& rng, std::size_t n, double jitter) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(random_unit(rng) * (1.0 + jitter * u(rng)));
  return convex_hull(pts);
}

ConvexPolytope random_circumscribed(Rng& rng, std::size_t faces, double shift) {
  std::vector<Vec3> normals;
  std::vector<double> h;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Vec3 offset = shift * Vec3(u(rng), u(rng), u(rng)) / std::sqrt(3.0);
  // Tangent planes of the unit sphere all touch it, so none is redundant
  // once the normals positively span space.
  do {
    normals.clear();
    for (std::size_t i = 0; i < faces; ++i) normals.push_back(random_unit(rng));
  } while (!positively_spanning(normals));
  for (const Vec3& n : normals) h.push_back(1.0 + n.dot(offset));
  return polytope_from_support(normals, h);
}

ConvexPolytope unit_cube() {
  std::vector<Vec3> pts;
  for (int i = 0; i < 8; ++i) pts.emplace_back((i & 1) - 0.5, ((i >> 1) & 1) - 0.5, ((i >> 2) & 1) - 0.5);
  return convex_hull(pts);
}

ConvexPolytope regular_octahedron() {
  return convex_hull(std::vector<Vec3>{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}});
}

ConvexPolytope regular_icosahedron() {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> pts;
  for (double a : {-1.0, 1.0})
    for (double b : {-1.0, 1.0}) {
      pts.emplace_back(0.0, a, b * t);
      pts.emplace_back(a, b * t, 0.0);
      pts.emplace_back(b * t, 0.0, a);
    }
  return convex_hull(pts);
}

ConvexPolytope regular_tetrahedron() {
  return convex_hull(std::vector<Vec3>{{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}});
}

}  // namespace convexkit::cli
