#include "convexkit/core/errors.hpp"
#include "convexkit/core/polytope.hpp"

#include <map>
#include <numeric>
#include <unordered_map>

namespace convexkit {

namespace {

struct Triangle {
  std::size_t a, b, c;
  Vec3 normal;
  double offset;
  bool alive = true;
};

Triangle make_triangle(const std::vector<Vec3>& pts, std::size_t a, std::size_t b, std::size_t c) {
  Triangle t{a, b, c, Vec3::Zero(), 0.0};
  t.normal = (pts[b] - pts[a]).cross(pts[c] - pts[a]).normalized();
  t.offset = t.normal.dot(pts[a]);
  return t;
}

std::uint64_t edge_key(std::size_t from, std::size_t to) {
  return (static_cast<std::uint64_t>(from) << 32) | static_cast<std::uint64_t>(to);
}

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

// Incremental hull over triangles; returns the alive triangles.
std::vector<Triangle> triangulated_hull(const std::vector<Vec3>& pts, double eps) {
  const std::size_t n = pts.size();
  std::size_t i0 = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (pts[i].x() < pts[i0].x()) i0 = i;
  std::size_t i1 = i0;
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (pts[i] - pts[i0]).norm();
    if (d > best) best = d, i1 = i;
  }
  if (best <= eps) throw DegenerateInput("convex_hull: all points coincide");
  const Vec3 axis = (pts[i1] - pts[i0]).normalized();
  std::size_t i2 = i0;
  best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 r = pts[i] - pts[i0];
    const double d = (r - r.dot(axis) * axis).norm();
    if (d > best) best = d, i2 = i;
  }
  if (best <= eps) throw DegenerateInput("convex_hull: points are collinear");
  const Vec3 plane_normal = axis.cross(pts[i2] - pts[i0]).normalized();
  std::size_t i3 = i0;
  best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::abs((pts[i] - pts[i0]).dot(plane_normal));
    if (d > best) best = d, i3 = i;
  }
  if (best <= eps) throw DegenerateInput("convex_hull: points are coplanar");

  std::vector<Triangle> tris;
  if ((pts[i3] - pts[i0]).dot(plane_normal) < 0.0) {
    tris = {make_triangle(pts, i0, i1, i2), make_triangle(pts, i0, i3, i1), make_triangle(pts, i1, i3, i2),
            make_triangle(pts, i0, i2, i3)};
  } else {
    tris = {make_triangle(pts, i0, i2, i1), make_triangle(pts, i0, i1, i3), make_triangle(pts, i1, i2, i3),
            make_triangle(pts, i0, i3, i2)};
  }
  std::unordered_map<std::uint64_t, std::size_t> owner;  // directed edge -> triangle
  auto register_triangle = [&](std::size_t t) {
    owner[edge_key(tris[t].a, tris[t].b)] = t;
    owner[edge_key(tris[t].b, tris[t].c)] = t;
    owner[edge_key(tris[t].c, tris[t].a)] = t;
  };
  for (std::size_t t = 0; t < tris.size(); ++t) register_triangle(t);

  std::vector<std::size_t> visible;
  std::vector<std::pair<std::size_t, std::size_t>> horizon;
  for (std::size_t p = 0; p < n; ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    visible.clear();
    for (std::size_t t = 0; t < tris.size(); ++t)
      if (tris[t].alive && tris[t].normal.dot(pts[p]) - tris[t].offset > eps) visible.push_back(t);
    if (visible.empty()) continue;
    for (std::size_t t : visible) tris[t].alive = false;
    horizon.clear();
    for (std::size_t t : visible) {
      const std::size_t e[3][2] = {{tris[t].a, tris[t].b}, {tris[t].b, tris[t].c}, {tris[t].c, tris[t].a}};
      for (const auto& edge : e) {
        const auto it = owner.find(edge_key(edge[1], edge[0]));
        if (it != owner.end() && tris[it->second].alive) horizon.emplace_back(edge[0], edge[1]);
      }
    }
    for (std::size_t t : visible) {
      owner.erase(edge_key(tris[t].a, tris[t].b));
      owner.erase(edge_key(tris[t].b, tris[t].c));
      owner.erase(edge_key(tris[t].c, tris[t].a));
    }
    for (const auto& [from, to] : horizon) {
      tris.push_back(make_triangle(pts, from, to, p));
      register_triangle(tris.size() - 1);
    }
  }
  std::vector<Triangle> alive;
  for (const Triangle& t : tris)
    if (t.alive) alive.push_back(t);
  return alive;
}

}  // namespace

ConvexPolytope convex_hull(std::span<const Vec3> points, Tolerance tol) {
  if (points.size() < 4) throw DegenerateInput("convex_hull: at least 4 points required");
  std::vector<Vec3> pts(points.begin(), points.end());
  for (const Vec3& p : pts)
    if (!all_finite(p)) throw DegenerateInput("convex_hull: non-finite point");
  Vec3 lo = pts[0], hi = pts[0];
  for (const Vec3& p : pts) lo = lo.cwiseMin(p), hi = hi.cwiseMax(p);
  const double eps = tol.absolute((hi - lo).norm());

  const std::vector<Triangle> tris = triangulated_hull(pts, eps);

  // Merge coplanar neighbours into polygonal faces.
  std::unordered_map<std::uint64_t, std::size_t> owner;
  for (std::size_t t = 0; t < tris.size(); ++t) {
    owner[edge_key(tris[t].a, tris[t].b)] = t;
    owner[edge_key(tris[t].b, tris[t].c)] = t;
    owner[edge_key(tris[t].c, tris[t].a)] = t;
  }
  DisjointSets groups(tris.size());
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const std::size_t verts[3] = {tris[t].a, tris[t].b, tris[t].c};
    for (int k = 0; k < 3; ++k) {
      const std::size_t u = owner.at(edge_key(verts[(k + 1) % 3], verts[k]));
      const Triangle& o = tris[u];
      const bool coplanar = std::abs(tris[t].normal.dot(pts[o.a]) - tris[t].offset) <= eps &&
                            std::abs(tris[t].normal.dot(pts[o.b]) - tris[t].offset) <= eps &&
                            std::abs(tris[t].normal.dot(pts[o.c]) - tris[t].offset) <= eps;
      if (coplanar && tris[t].normal.dot(o.normal) > 0.0) groups.unite(t, u);
    }
  }

  // Boundary cycle of every group: directed edges whose reverse lies elsewhere.
  std::map<std::size_t, std::map<std::size_t, std::size_t>> next_by_group;
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const std::size_t g = groups.find(t);
    const std::size_t verts[3] = {tris[t].a, tris[t].b, tris[t].c};
    for (int k = 0; k < 3; ++k) {
      const std::size_t from = verts[k], to = verts[(k + 1) % 3];
      if (groups.find(owner.at(edge_key(to, from))) != g) next_by_group[g][from] = to;
    }
  }
  std::vector<FaceCycle> cycles;
  for (auto& [g, next] : next_by_group) {
    FaceCycle cycle;
    std::size_t v = next.begin()->first;
    for (std::size_t guard = 0; guard <= next.size(); ++guard) {
      cycle.push_back(v);
      v = next.at(v);
      if (v == cycle.front()) break;
    }
    cycles.push_back(std::move(cycle));
  }

  // Drop boundary vertices that are straight in every face containing them.
  std::vector<int> bent_count(pts.size(), 0), use_count(pts.size(), 0);
  for (const FaceCycle& c : cycles) {
    for (std::size_t k = 0; k < c.size(); ++k) {
      const Vec3& prev = pts[c[(k + c.size() - 1) % c.size()]];
      const Vec3& here = pts[c[k]];
      const Vec3& next = pts[c[(k + 1) % c.size()]];
      const double span = (next - prev).norm();
      ++use_count[c[k]];
      if ((here - prev).cross(next - here).norm() > eps * span) ++bent_count[c[k]];
    }
  }
  std::vector<std::size_t> remap(pts.size(), static_cast<std::size_t>(-1));
  std::vector<Vec3> vertices;
  for (std::size_t v = 0; v < pts.size(); ++v) {
    if (use_count[v] > 0 && bent_count[v] > 0) {
      remap[v] = vertices.size();
      vertices.push_back(pts[v]);
    }
  }
  std::vector<FaceCycle> faces;
  std::vector<Vec3> normals;
  for (const FaceCycle& c : cycles) {
    FaceCycle face;
    std::vector<Vec3> corners;
    for (std::size_t v : c) {
      if (remap[v] == static_cast<std::size_t>(-1)) continue;
      face.push_back(remap[v]);
      corners.push_back(pts[v]);
    }
    if (face.size() < 3) continue;
    normals.push_back(vector_area(corners).normalized());
    faces.push_back(std::move(face));
  }
  return ConvexPolytope::assemble(std::move(vertices), std::move(faces), std::move(normals));
}

}  // namespace convexkit
