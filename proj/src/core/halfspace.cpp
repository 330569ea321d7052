#include "convexkit/core/errors.hpp"
#include "convexkit/core/polytope.hpp"

#include <array>
#include <map>

namespace convexkit {

namespace {

struct ClipFace {
  std::size_t plane;
  std::vector<Vec3> points;  // counterclockwise seen from outside
};

bool lexicographic_less(const Vec3& a, const Vec3& b) {
  if (a.x() != b.x()) return a.x() < b.x();
  if (a.y() != b.y()) return a.y() < b.y();
  return a.z() < b.z();
}

// Intersection of segment [a, b] with the plane, computed from a canonical
// endpoint order so that both faces sharing the edge get identical bits.
Vec3 cut_point(Vec3 a, Vec3 b, const Vec3& n, double h) {
  if (lexicographic_less(b, a)) std::swap(a, b);
  const double da = a.dot(n) - h;
  const double db = b.dot(n) - h;
  return a + (da / (da - db)) * (b - a);
}

// 2-D convex hull (monotone chain) of points on a plane, returned
// counterclockwise around `normal`.
std::vector<Vec3> planar_hull(std::vector<Vec3> pts, const Vec3& normal, double eps) {
  const Vec3 u = normal.unitOrthogonal();
  const Vec3 w = normal.cross(u);
  std::vector<std::pair<Vec2, Vec3>> items;
  for (const Vec3& p : pts) items.emplace_back(Vec2(p.dot(u), p.dot(w)), p);
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    return a.first.x() < b.first.x() || (a.first.x() == b.first.x() && a.first.y() < b.first.y());
  });
  std::vector<std::pair<Vec2, Vec3>> unique;
  for (const auto& it : items) {
    bool dup = false;
    for (const auto& q : unique)
      if ((q.first - it.first).norm() <= eps) dup = true;
    if (!dup) unique.push_back(it);
  }
  if (unique.size() < 3) return {};
  std::vector<std::pair<Vec2, Vec3>> hull(2 * unique.size());
  std::size_t k = 0;
  auto turn = [](const Vec2& o, const Vec2& a, const Vec2& b) { return cross2(a - o, b - o); };
  for (std::size_t i = 0; i < unique.size(); ++i) {
    while (k >= 2 && turn(hull[k - 2].first, hull[k - 1].first, unique[i].first) <= 0.0) --k;
    hull[k++] = unique[i];
  }
  for (std::size_t i = unique.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && turn(hull[k - 2].first, hull[k - 1].first, unique[i].first) <= 0.0) --k;
    hull[k++] = unique[i];
  }
  hull.resize(k - 1);
  std::vector<Vec3> out;
  for (const auto& h : hull) out.push_back(h.second);
  return out;
}

std::array<ClipFace, 6> box_faces(double b, std::size_t first_plane) {
  auto corner = [b](int i) { return Vec3((i & 1) ? b : -b, (i & 2) ? b : -b, (i & 4) ? b : -b); };
  // Corner indices per face, counterclockwise seen from outside.
  const int loops[6][4] = {{1, 3, 7, 5}, {0, 4, 6, 2}, {2, 6, 7, 3}, {0, 1, 5, 4}, {4, 5, 7, 6}, {0, 2, 3, 1}};
  std::array<ClipFace, 6> faces;
  for (int f = 0; f < 6; ++f) {
    faces[f].plane = first_plane + f;
    for (int k = 0; k < 4; ++k) faces[f].points.push_back(corner(loops[f][k]));
  }
  return faces;
}

}  // namespace

HalfspaceIntersection halfspace_intersection(std::span<const Vec3> normals, std::span<const double> support_numbers,
                                             Tolerance tol) {
  const std::size_t m = normals.size();
  if (support_numbers.size() != m) throw InvalidArgument("halfspace_intersection: one support number per normal");
  double hmax = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!all_finite(normals[i]) || !std::isfinite(support_numbers[i]))
      throw InvalidArgument("halfspace_intersection: non-finite input");
    if (std::abs(normals[i].norm() - 1.0) > 1e-9) throw InvalidArgument("halfspace_intersection: normals must be unit");
    hmax = std::max(hmax, std::abs(support_numbers[i]));
  }
  if (!positively_spanning(normals, tol)) throw UnboundedBody("normals do not positively span space");

  // Inradius of the normals' hull around the origin bounds the body:
  // r |x| <= max_i <n_i, x> <= max_i h_i.
  const ConvexPolytope normal_hull = convex_hull(normals, tol);
  double inradius = std::numeric_limits<double>::infinity();
  for (double h : normal_hull.support_numbers()) inradius = std::min(inradius, h);
  const double box = 2.0 * hmax / inradius + 1.0;
  const double eps = tol.absolute(std::max(hmax, 1e-300));

  std::vector<ClipFace> faces;
  for (auto& f : box_faces(box, m)) faces.push_back(std::move(f));

  for (std::size_t k = 0; k < m; ++k) {
    const Vec3& n = normals[k];
    const double h = support_numbers[k];
    std::vector<Vec3> on_plane;
    std::vector<ClipFace> kept;
    bool anything_out = false;
    for (ClipFace& face : faces) {
      const std::size_t count = face.points.size();
      std::vector<double> d(count);
      bool any_out = false, any_in = false;
      for (std::size_t j = 0; j < count; ++j) {
        d[j] = face.points[j].dot(n) - h;
        if (d[j] > eps) any_out = true;
        else any_in = true;
        if (std::abs(d[j]) <= eps) on_plane.push_back(face.points[j]);
      }
      anything_out = anything_out || any_out;
      if (!any_out) {
        kept.push_back(std::move(face));
        continue;
      }
      if (!any_in) continue;
      ClipFace clipped{face.plane, {}};
      for (std::size_t j = 0; j < count; ++j) {
        const Vec3& a = face.points[j];
        const Vec3& b = face.points[(j + 1) % count];
        const bool a_in = d[j] <= eps, b_in = d[(j + 1) % count] <= eps;
        if (a_in) clipped.points.push_back(a);
        if ((a_in && !b_in && d[j] < -eps) || (!a_in && b_in && d[(j + 1) % count] < -eps)) {
          const Vec3 x = cut_point(a, b, n, h);
          clipped.points.push_back(x);
          on_plane.push_back(x);
        }
      }
      if (clipped.points.size() >= 3) kept.push_back(std::move(clipped));
    }
    faces = std::move(kept);
    if (faces.empty()) throw EmptyBody("halfspace intersection is empty");
    if (anything_out) {
      std::vector<Vec3> cap = planar_hull(on_plane, n, eps);
      if (cap.size() >= 3) faces.push_back(ClipFace{k, std::move(cap)});
    }
  }

  for (const ClipFace& f : faces)
    if (f.plane >= m && vector_area(f.points).norm() > eps * eps)
      throw UnboundedBody("halfspace intersection reaches the bounding box");

  // Merge coincident points into shared vertices.
  std::vector<Vec3> vertices;
  std::map<std::array<double, 3>, std::size_t> exact;
  auto vertex_id = [&](const Vec3& p) {
    const std::array<double, 3> key{p.x(), p.y(), p.z()};
    if (auto it = exact.find(key); it != exact.end()) return it->second;
    for (std::size_t i = 0; i < vertices.size(); ++i)
      if ((vertices[i] - p).norm() <= eps) return exact[key] = i;
    vertices.push_back(p);
    return exact[key] = vertices.size() - 1;
  };
  std::vector<FaceCycle> cycles(m);
  for (const ClipFace& f : faces) {
    if (f.plane >= m) continue;
    FaceCycle c;
    for (const Vec3& p : f.points) {
      const std::size_t id = vertex_id(p);
      if (c.empty() || c.back() != id) c.push_back(id);
    }
    while (c.size() > 1 && c.front() == c.back()) c.pop_back();
    if (c.size() >= 3) cycles[f.plane] = std::move(c);
  }
  // Vertices that only survive in degenerate faces are dropped.
  std::vector<std::size_t> remap(vertices.size(), static_cast<std::size_t>(-1));
  std::vector<Vec3> used;
  for (FaceCycle& c : cycles)
    for (std::size_t& v : c) {
      if (remap[v] == static_cast<std::size_t>(-1)) {
        remap[v] = used.size();
        used.push_back(vertices[v]);
      }
      v = remap[v];
    }

  HalfspaceIntersection result;
  result.polytope = ConvexPolytope::assemble(std::move(used), std::move(cycles),
                                             std::vector<Vec3>(normals.begin(), normals.end()));
  const double diam = result.polytope.diameter();
  if (result.polytope.vertex_count() < 4 || result.polytope.volume() <= tol.relative * diam * diam * diam)
    throw EmptyBody("halfspace intersection has no interior");

  std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_face;
  const auto& fc = result.polytope.faces();
  for (std::size_t f = 0; f < fc.size(); ++f)
    for (std::size_t j = 0; j < fc[f].size(); ++j) edge_face[{fc[f][j], fc[f][(j + 1) % fc[f].size()]}] = f;
  const auto& vs = result.polytope.vertices();
  for (const auto& [edge, f] : edge_face) {
    const auto it = edge_face.find({edge.second, edge.first});
    if (it == edge_face.end() || f >= it->second) continue;
    result.edges.push_back(FaceAdjacency{f, it->second, (vs[edge.first] - vs[edge.second]).norm()});
  }
  return result;
}

}  // namespace convexkit
