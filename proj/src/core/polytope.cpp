#include "convexkit/core/polytope.hpp"

#include "convexkit/core/errors.hpp"

#include <limits>
#include <map>
#include <sstream>

namespace convexkit {

namespace {

std::vector<Vec3> face_points(const std::vector<Vec3>& vertices, const FaceCycle& face) {
  std::vector<Vec3> pts;
  pts.reserve(face.size());
  for (std::size_t v : face) pts.push_back(vertices[v]);
  return pts;
}

}  // namespace

ConvexPolytope ConvexPolytope::assemble(std::vector<Vec3> vertices, std::vector<FaceCycle> faces,
                                        std::vector<Vec3> normals) {
  if (faces.size() != normals.size()) throw InvalidArgument("assemble: one normal per face required");
  ConvexPolytope p;
  p.vertices_ = std::move(vertices);
  p.faces_ = std::move(faces);
  p.normals_ = std::move(normals);
  p.areas_.resize(p.faces_.size(), 0.0);
  p.support_numbers_.resize(p.faces_.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t f = 0; f < p.faces_.size(); ++f) {
    if (p.faces_[f].size() >= 3) {
      const auto pts = face_points(p.vertices_, p.faces_[f]);
      p.areas_[f] = std::max(0.0, vector_area(pts).dot(p.normals_[f]));
    }
    for (const Vec3& v : p.vertices_) p.support_numbers_[f] = std::max(p.support_numbers_[f], v.dot(p.normals_[f]));
  }
  return p;
}

ConvexPolytope ConvexPolytope::from_faces(std::vector<Vec3> vertices, std::vector<FaceCycle> faces,
                                          Tolerance tol) {
  for (std::size_t i = 0; i < vertices.size(); ++i)
    if (!all_finite(vertices[i])) throw SchemaError("vertex " + std::to_string(i) + " is not finite");
  if (vertices.size() < 4 || faces.size() < 4) throw SchemaError("a closed polytope needs at least 4 vertices and 4 faces");

  std::vector<Vec3> normals;
  normals.reserve(faces.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (faces[f].size() < 3) throw SchemaError("face " + std::to_string(f) + " has fewer than 3 vertices");
    for (std::size_t v : faces[f])
      if (v >= vertices.size()) throw SchemaError("face " + std::to_string(f) + " references a missing vertex");
    const Vec3 va = vector_area(face_points(vertices, faces[f]));
    if (va.norm() <= 0.0) throw SchemaError("face " + std::to_string(f) + " has zero area");
    normals.push_back(va.normalized());
  }
  ConvexPolytope p = assemble(std::move(vertices), std::move(faces), std::move(normals));
  const auto problems = check_invariants(p, tol);
  if (!problems.empty()) throw SchemaError("not a convex polytope: " + problems.front());
  return p;
}

double ConvexPolytope::diameter() const { return convexkit::diameter<Vec3>(vertices_); }

double ConvexPolytope::total_area() const {
  double s = 0.0;
  for (double a : areas_) s += a;
  return s;
}

double ConvexPolytope::volume() const {
  Vec3 c = Vec3::Zero();
  for (const Vec3& v : vertices_) c += v;
  c /= static_cast<double>(std::max<std::size_t>(1, vertices_.size()));
  double vol = 0.0;
  for (const FaceCycle& f : faces_) {
    for (std::size_t k = 1; k + 1 < f.size(); ++k)
      vol += (vertices_[f[0]] - c).dot((vertices_[f[k]] - c).cross(vertices_[f[k + 1]] - c)) / 6.0;
  }
  return vol;
}

Vec3 ConvexPolytope::centroid() const {
  Vec3 c = Vec3::Zero();
  for (const Vec3& v : vertices_) c += v;
  c /= static_cast<double>(std::max<std::size_t>(1, vertices_.size()));
  double vol = 0.0;
  Vec3 moment = Vec3::Zero();
  for (const FaceCycle& f : faces_) {
    for (std::size_t k = 1; k + 1 < f.size(); ++k) {
      const Vec3& a = vertices_[f[0]];
      const Vec3& b = vertices_[f[k]];
      const Vec3& d = vertices_[f[k + 1]];
      const double t = (a - c).dot((b - c).cross(d - c)) / 6.0;
      vol += t;
      moment += t * (c + a + b + d) / 4.0;
    }
  }
  return vol > 0.0 ? Vec3(moment / vol) : c;
}

std::vector<std::size_t> ConvexPolytope::faces_around_vertex(std::size_t v) const {
  // For each incident face remember the vertices before and after v.
  std::map<std::size_t, std::size_t> face_by_next;  // next vertex after v -> face
  std::vector<std::pair<std::size_t, std::size_t>> incident;  // (face, prev vertex)
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const FaceCycle& c = faces_[f];
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (c[k] != v) continue;
      face_by_next[c[(k + 1) % c.size()]] = f;
      incident.emplace_back(f, c[(k + c.size() - 1) % c.size()]);
    }
  }
  std::vector<std::size_t> order;
  if (incident.empty()) return order;
  std::map<std::size_t, std::size_t> prev_of_face(incident.begin(), incident.end());
  std::size_t f = incident.front().first;
  for (std::size_t step = 0; step < incident.size(); ++step) {
    order.push_back(f);
    // Counterclockwise successor: the face whose edge leaves v towards the
    // vertex preceding v in the current face.
    auto it = face_by_next.find(prev_of_face[f]);
    if (it == face_by_next.end()) break;
    f = it->second;
    if (f == order.front()) break;
  }
  return order;
}

ConvexPolytope ConvexPolytope::translated(const Vec3& offset) const {
  ConvexPolytope p = *this;
  for (Vec3& v : p.vertices_) v += offset;
  for (std::size_t f = 0; f < p.faces_.size(); ++f) p.support_numbers_[f] += offset.dot(p.normals_[f]);
  return p;
}

ConvexPolytope ConvexPolytope::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidArgument("scale factor must be positive");
  ConvexPolytope p = *this;
  for (Vec3& v : p.vertices_) v *= factor;
  for (double& a : p.areas_) a *= factor * factor;
  for (double& h : p.support_numbers_) h *= factor;
  return p;
}

std::vector<std::string> check_invariants(const ConvexPolytope& polytope, Tolerance tol) {
  std::vector<std::string> problems;
  const double eps = tol.absolute(polytope.diameter());
  const auto& verts = polytope.vertices();
  const auto& normals = polytope.normals();
  const auto& h = polytope.support_numbers();

  for (std::size_t v = 0; v < verts.size(); ++v) {
    int on_planes = 0;
    for (std::size_t f = 0; f < polytope.face_count(); ++f) {
      if (polytope.is_degenerate_face(f)) continue;
      const double d = verts[v].dot(normals[f]) - h[f];
      if (d > eps) {
        std::ostringstream os;
        os << "vertex " << v << " lies outside face " << f << " by " << d;
        problems.push_back(os.str());
      }
      if (std::abs(d) <= eps) ++on_planes;
    }
    if (on_planes < 3) problems.push_back("vertex " + std::to_string(v) + " lies on fewer than 3 face planes");
  }

  const Vec3 defect = closing_defect(normals, polytope.areas());
  if (defect.norm() > tol.relative * std::max(polytope.total_area(), 1e-300)) {
    std::ostringstream os;
    os << "closing defect " << defect.norm() << " exceeds tolerance";
    problems.push_back(os.str());
  }

  for (std::size_t f = 0; f < polytope.face_count(); ++f) {
    const FaceCycle& c = polytope.faces()[f];
    if (c.size() < 3) continue;
    for (std::size_t k = 0; k < c.size(); ++k) {
      const Vec3& a = verts[c[k]];
      const Vec3& b = verts[c[(k + 1) % c.size()]];
      const Vec3& d = verts[c[(k + 2) % c.size()]];
      if (std::abs(a.dot(normals[f]) - h[f]) > eps)
        problems.push_back("face " + std::to_string(f) + " is not planar");
      if ((b - a).cross(d - b).dot(normals[f]) < -eps * polytope.diameter())
        problems.push_back("face " + std::to_string(f) + " is not convex or not counterclockwise");
    }
  }
  return problems;
}

Vec3 closing_defect(std::span<const Vec3> normals, std::span<const double> areas) {
  if (normals.size() != areas.size()) throw InvalidArgument("closing_defect: normals and areas differ in length");
  Vec3 sum = Vec3::Zero();
  for (std::size_t i = 0; i < normals.size(); ++i) sum += areas[i] * normals[i];
  return sum;
}

double normal_cone_area(const ConvexPolytope& polytope, std::size_t v) {
  if (v >= polytope.vertex_count()) throw InvalidArgument("normal_cone_area: vertex index out of range");
  const auto ring = polytope.faces_around_vertex(v);
  if (ring.size() < 3) throw DegenerateVertex("vertex " + std::to_string(v) + " has fewer than 3 incident faces");
  const auto& n = polytope.normals();
  double area = 0.0;
  for (std::size_t k = 1; k + 1 < ring.size(); ++k)
    area += signed_solid_angle(n[ring[0]], n[ring[k]], n[ring[k + 1]]);
  if (!(area > 1e-14)) throw DegenerateVertex("normal cone of vertex " + std::to_string(v) + " has no interior");
  return area;
}

bool positively_spanning(std::span<const Vec3> directions, Tolerance tol) {
  if (directions.size() < 4) return false;
  try {
    const ConvexPolytope hull = convex_hull(directions, tol);
    const double eps = tol.absolute(hull.diameter());
    for (double h : hull.support_numbers())
      if (h <= eps) return false;
    return true;
  } catch (const DegenerateInput&) {
    return false;
  }
}

}  // namespace convexkit
