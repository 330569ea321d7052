#include "convexkit/metric/net.hpp"

#include "convexkit/core/errors.hpp"

#include <map>
#include <numeric>
#include <sstream>

namespace convexkit::metric {

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

MetricNet::MetricNet(std::vector<std::vector<Vec2>> polygons, std::vector<Identification> identifications)
    : polygons_(std::move(polygons)), identifications_(std::move(identifications)) {
  if (polygons_.empty()) throw InvalidNet("net has no polygons");
  std::vector<std::size_t> corner_offset(polygons_.size() + 1, 0);
  for (std::size_t p = 0; p < polygons_.size(); ++p) {
    const auto& poly = polygons_[p];
    if (poly.size() < 3) throw InvalidNet("polygon " + std::to_string(p) + " has fewer than 3 corners");
    for (const Vec2& c : poly)
      if (!all_finite(c)) throw InvalidNet("polygon " + std::to_string(p) + " has a non-finite corner");
    if (signed_area(poly) <= 0.0) throw InvalidNet("polygon " + std::to_string(p) + " is not counterclockwise");
    scale_ = std::max(scale_, convexkit::diameter<Vec2>(poly));
    corner_offset[p + 1] = corner_offset[p] + poly.size();
  }

  pair_count_.resize(polygons_.size());
  partner_.resize(polygons_.size());
  for (std::size_t p = 0; p < polygons_.size(); ++p) {
    pair_count_[p].assign(polygons_[p].size(), 0);
    partner_[p].assign(polygons_[p].size(), std::nullopt);
  }
  auto check = [&](const EdgeRef& e) {
    if (e.polygon >= polygons_.size() || e.edge >= polygons_[e.polygon].size())
      throw InvalidNet("identification references a missing edge");
  };
  for (const Identification& id : identifications_) {
    check(id.a);
    check(id.b);
    if (id.a == id.b) throw InvalidNet("an edge cannot be identified with itself");
    ++pair_count_[id.a.polygon][id.a.edge];
    ++pair_count_[id.b.polygon][id.b.edge];
    partner_[id.a.polygon][id.a.edge] = Gluing{id.b, id.reversed};
    partner_[id.b.polygon][id.b.edge] = Gluing{id.a, id.reversed};
  }

  UnionFind uf(corner_offset.back());
  auto flat = [&](std::size_t polygon, std::size_t index) {
    return corner_offset[polygon] + index % polygons_[polygon].size();
  };
  for (const Identification& id : identifications_) {
    const std::size_t a0 = flat(id.a.polygon, id.a.edge), a1 = flat(id.a.polygon, id.a.edge + 1);
    const std::size_t b0 = flat(id.b.polygon, id.b.edge), b1 = flat(id.b.polygon, id.b.edge + 1);
    if (id.reversed) {
      uf.unite(a0, b1);
      uf.unite(a1, b0);
    } else {
      uf.unite(a0, b0);
      uf.unite(a1, b1);
    }
  }
  std::vector<std::size_t> class_of_root(corner_offset.back(), static_cast<std::size_t>(-1));
  corner_class_.resize(polygons_.size());
  for (std::size_t p = 0; p < polygons_.size(); ++p) {
    corner_class_[p].resize(polygons_[p].size());
    for (std::size_t k = 0; k < polygons_[p].size(); ++k) {
      const std::size_t root = uf.find(flat(p, k));
      if (class_of_root[root] == static_cast<std::size_t>(-1)) {
        class_of_root[root] = classes_.size();
        classes_.emplace_back();
      }
      corner_class_[p][k] = class_of_root[root];
      classes_[class_of_root[root]].push_back(Corner{p, k});
    }
  }
}

double MetricNet::corner_angle(Corner c) const { return convexkit::corner_angle(polygons_[c.polygon], c.index); }

std::optional<Gluing> MetricNet::partner(EdgeRef e) const {
  if (pair_count_[e.polygon][e.edge] != 1) return std::nullopt;
  return partner_[e.polygon][e.edge];
}

ValidationReport validate_net(const MetricNet& net, Tolerance tol) {
  ValidationReport report;
  const double eps = tol.absolute(net.scale());

  // (1) closed, connected, Euler characteristic 2.
  std::size_t edge_count = 0;
  UnionFind components(net.polygon_count());
  for (std::size_t p = 0; p < net.polygon_count(); ++p) {
    for (std::size_t k = 0; k < net.corner_count(p); ++k) {
      const EdgeRef e{p, k};
      const std::size_t count = net.pairing_count(e);
      if (count == 0) {
        report.unpaired_edges.push_back(e);
        report.sphere_topology.details.push_back("edge " + std::to_string(k) + " of polygon " + std::to_string(p) +
                                                 " is not identified");
        ++edge_count;
      } else if (count > 1) {
        report.sphere_topology.details.push_back("edge " + std::to_string(k) + " of polygon " + std::to_string(p) +
                                                 " is identified " + std::to_string(count) + " times");
      }
    }
  }
  for (const Identification& id : net.identifications()) {
    ++edge_count;
    components.unite(id.a.polygon, id.b.polygon);
  }
  report.connected = true;
  for (std::size_t p = 1; p < net.polygon_count(); ++p)
    if (components.find(p) != components.find(0)) report.connected = false;
  report.euler_characteristic = static_cast<long>(net.vertex_class_count()) - static_cast<long>(edge_count) +
                                static_cast<long>(net.polygon_count());
  if (!report.connected) report.sphere_topology.details.push_back("complex is not connected");
  if (report.euler_characteristic != 2)
    report.sphere_topology.details.push_back("Euler characteristic is " +
                                             std::to_string(report.euler_characteristic) + ", expected 2");
  report.sphere_topology.passed = report.sphere_topology.details.empty();

  // (2) identified edges have equal length.
  for (std::size_t i = 0; i < net.identifications().size(); ++i) {
    const Identification& id = net.identifications()[i];
    const double la = net.edge_length(id.a), lb = net.edge_length(id.b);
    if (std::abs(la - lb) > eps) {
      report.mismatched_identifications.push_back(i);
      std::ostringstream os;
      os << "identification " << i << " glues edges of length " << la << " and " << lb;
      report.equal_edges.details.push_back(os.str());
    }
  }
  report.equal_edges.passed = report.equal_edges.details.empty();

  // (3) full angle at most 2 pi.
  report.full_angles.assign(net.vertex_class_count(), 0.0);
  for (std::size_t c = 0; c < net.vertex_class_count(); ++c) {
    for (const Corner& corner : net.class_corners(c)) report.full_angles[c] += net.corner_angle(corner);
    if (report.full_angles[c] > kTwoPi + tol.relative) {
      report.excessive_classes.push_back(c);
      std::ostringstream os;
      os << "vertex class " << c << " has full angle " << report.full_angles[c];
      report.angle_bound.details.push_back(os.str());
    }
  }
  report.angle_bound.passed = report.angle_bound.details.empty();
  return report;
}

CurvatureReport vertex_curvatures(const MetricNet& net, Tolerance tol) {
  const ValidationReport v = validate_net(net, tol);
  if (!v.sphere_topology.passed || !v.equal_edges.passed)
    throw InvalidNet("vertex_curvatures needs a closed sphere-like net with equal identified edges");
  CurvatureReport report;
  report.full_angle = v.full_angles;
  for (double theta : report.full_angle) {
    report.curvature.push_back(kTwoPi - theta);
    report.total += kTwoPi - theta;
  }
  return report;
}

std::size_t PolytopeNet::polygon_of_face(std::size_t face) const {
  for (std::size_t p = 0; p < face_of_polygon.size(); ++p)
    if (face_of_polygon[p] == face) return p;
  throw InvalidArgument("face " + std::to_string(face) + " has no polygon in the net");
}

PolytopeNet net_from_polytope(const ConvexPolytope& polytope) {
  PolytopeNet out{MetricNet({{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)}}, {}), {}, {}, {}, {}, {}, {}};
  std::vector<std::vector<Vec2>> polygons;
  const auto& verts = polytope.vertices();
  for (std::size_t f = 0; f < polytope.face_count(); ++f) {
    if (polytope.is_degenerate_face(f)) continue;
    const FaceCycle& cycle = polytope.faces()[f];
    const Vec3 origin = verts[cycle[0]];
    const Vec3 u = (verts[cycle[1]] - origin).normalized();
    const Vec3 v = polytope.normals()[f].cross(u);
    std::vector<Vec2> poly;
    for (std::size_t idx : cycle) {
      const Vec3 r = verts[idx] - origin;
      poly.emplace_back(r.dot(u), r.dot(v));
    }
    polygons.push_back(std::move(poly));
    out.face_of_polygon.push_back(f);
    out.corner_vertex.push_back(cycle);
    out.origin.push_back(origin);
    out.axis_u.push_back(u);
    out.axis_v.push_back(v);
  }

  // Directed polytope edge -> (polygon, edge index).
  std::map<std::pair<std::size_t, std::size_t>, EdgeRef> directed;
  for (std::size_t p = 0; p < out.corner_vertex.size(); ++p) {
    const auto& c = out.corner_vertex[p];
    for (std::size_t k = 0; k < c.size(); ++k) directed[{c[k], c[(k + 1) % c.size()]}] = EdgeRef{p, k};
  }
  std::vector<Identification> ids;
  for (const auto& [edge, ref] : directed) {
    if (edge.first > edge.second) continue;
    const auto it = directed.find({edge.second, edge.first});
    if (it == directed.end()) continue;
    ids.push_back(Identification{ref, it->second, true});
  }
  out.net = MetricNet(std::move(polygons), std::move(ids));
  out.class_vertex.assign(out.net.vertex_class_count(), 0);
  for (std::size_t p = 0; p < out.corner_vertex.size(); ++p)
    for (std::size_t k = 0; k < out.corner_vertex[p].size(); ++k)
      out.class_vertex[out.net.vertex_class(Corner{p, k})] = out.corner_vertex[p][k];
  return out;
}

}  // namespace convexkit::metric
