#pragma once

#include "convexkit/core/geometry.hpp"
#include "convexkit/core/polytope.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace convexkit::metric {

/// Edge k of a polygon runs from corner k to corner k + 1.
struct EdgeRef {
  std::size_t polygon = 0;
  std::size_t edge = 0;

  friend bool operator==(const EdgeRef&, const EdgeRef&) = default;
};

/// Gluing of two polygon edges. With `reversed` (the orientable default) the
/// start of `a` is glued to the end of `b`.
struct Identification {
  EdgeRef a;
  EdgeRef b;
  bool reversed = true;
};

struct Corner {
  std::size_t polygon = 0;
  std::size_t index = 0;
};

/// Where an edge is glued to.
struct Gluing {
  EdgeRef edge;
  bool reversed = true;
};

/// A polyhedral metric given by planar polygons and edge identifications.
///
/// Polygons are counterclockwise in their own plane. Vertex classes are the
/// equivalence classes of polygon corners induced by the identifications.
/// Immutable after construction; the constructor only rejects structurally
/// broken input (bad indices, fewer than 3 corners, clockwise polygons), all
/// metric conditions are checked by validate_net.
class MetricNet {
 public:
  MetricNet(std::vector<std::vector<Vec2>> polygons, std::vector<Identification> identifications);

  const std::vector<std::vector<Vec2>>& polygons() const { return polygons_; }
  const std::vector<Identification>& identifications() const { return identifications_; }
  std::size_t polygon_count() const { return polygons_.size(); }
  std::size_t corner_count(std::size_t polygon) const { return polygons_[polygon].size(); }

  const Vec2& corner(std::size_t polygon, std::size_t index) const {
    return polygons_[polygon][index % polygons_[polygon].size()];
  }
  double edge_length(EdgeRef e) const {
    return (corner(e.polygon, e.edge + 1) - corner(e.polygon, e.edge)).norm();
  }
  double corner_angle(Corner c) const;

  /// Partner of an edge; empty when the edge is unpaired or paired more than
  /// once.
  std::optional<Gluing> partner(EdgeRef e) const;
  /// Number of identifications naming this edge.
  std::size_t pairing_count(EdgeRef e) const { return pair_count_[e.polygon][e.edge]; }

  std::size_t vertex_class(Corner c) const { return corner_class_[c.polygon][c.index]; }
  std::size_t vertex_class_count() const { return classes_.size(); }
  const std::vector<Corner>& class_corners(std::size_t cls) const { return classes_[cls]; }

  /// Largest polygon diameter; the length scale for tolerances.
  double scale() const { return scale_; }

 private:
  std::vector<std::vector<Vec2>> polygons_;
  std::vector<Identification> identifications_;
  std::vector<std::vector<std::size_t>> pair_count_;
  std::vector<std::vector<std::optional<Gluing>>> partner_;
  std::vector<std::vector<std::size_t>> corner_class_;
  std::vector<std::vector<Corner>> classes_;
  double scale_ = 0.0;
};

struct ConditionCheck {
  bool passed = true;
  std::vector<std::string> details;
};

/// Outcome of checking the gluing conditions: (1) the complex is a sphere,
/// (2) identified edges have equal length, (3) the full angle at every vertex
/// class is at most 2 pi.
struct ValidationReport {
  ConditionCheck sphere_topology;
  ConditionCheck equal_edges;
  ConditionCheck angle_bound;

  long euler_characteristic = 0;
  bool connected = false;
  std::vector<EdgeRef> unpaired_edges;
  std::vector<std::size_t> mismatched_identifications;
  std::vector<double> full_angles;  // per vertex class
  std::vector<std::size_t> excessive_classes;

  bool passed() const { return sphere_topology.passed && equal_edges.passed && angle_bound.passed; }
};

ValidationReport validate_net(const MetricNet& net, Tolerance tol = {});

struct CurvatureReport {
  std::vector<double> full_angle;  // theta per vertex class
  std::vector<double> curvature;   // 2 pi - theta
  double total = 0.0;
};

/// Full angle and point curvature of every vertex class. Throws InvalidNet
/// unless conditions (1) and (2) hold.
CurvatureReport vertex_curvatures(const MetricNet& net, Tolerance tol = {});

/// A net cut along the edges of a convex polytope: one polygon per
/// non-degenerate face, expressed in an orthonormal frame of the face plane.
struct PolytopeNet {
  MetricNet net;
  std::vector<std::size_t> face_of_polygon;
  std::vector<std::vector<std::size_t>> corner_vertex;  // polytope vertex of each corner
  std::vector<std::size_t> class_vertex;                // polytope vertex of each class
  std::vector<Vec3> origin;                             // frame per polygon
  std::vector<Vec3> axis_u;
  std::vector<Vec3> axis_v;

  Vec3 to_space(std::size_t polygon, const Vec2& local) const {
    return origin[polygon] + local.x() * axis_u[polygon] + local.y() * axis_v[polygon];
  }
  Vec2 to_local(std::size_t polygon, const Vec3& point) const {
    const Vec3 r = point - origin[polygon];
    return {r.dot(axis_u[polygon]), r.dot(axis_v[polygon])};
  }
  /// Polygon holding the given polytope face.
  std::size_t polygon_of_face(std::size_t face) const;
};

PolytopeNet net_from_polytope(const ConvexPolytope& polytope);

}  // namespace convexkit::metric
