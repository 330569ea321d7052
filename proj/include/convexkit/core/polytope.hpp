#pragma once

#include "convexkit/core/geometry.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace convexkit {

using FaceCycle = std::vector<std::size_t>;

/// Boundary complex of a bounded convex body.
///
/// Faces are vertex-index cycles, counterclockwise seen from outside. Every
/// face carries its outer unit normal, its area and its support number
/// h = max over vertices of <v, n>. A face may be degenerate (empty cycle,
/// area 0); this only happens for bodies built from support data.
///
/// Instances are immutable once built.
class ConvexPolytope {
 public:
  ConvexPolytope() = default;

  /// Builds a polytope from an explicit boundary description, e.g. an OFF
  /// file. Faces are checked for planarity, convexity and outward
  /// orientation; throws SchemaError on violation.
  static ConvexPolytope from_faces(std::vector<Vec3> vertices, std::vector<FaceCycle> faces,
                                   Tolerance tol = {});

  /// Assembles a polytope whose face normals are already known. Areas and
  /// support numbers are derived. No validation beyond sizes.
  static ConvexPolytope assemble(std::vector<Vec3> vertices, std::vector<FaceCycle> faces,
                                 std::vector<Vec3> normals);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<FaceCycle>& faces() const { return faces_; }
  const std::vector<Vec3>& normals() const { return normals_; }
  const std::vector<double>& areas() const { return areas_; }
  const std::vector<double>& support_numbers() const { return support_numbers_; }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t face_count() const { return faces_.size(); }
  bool is_degenerate_face(std::size_t f) const { return faces_[f].size() < 3; }

  double diameter() const;
  double total_area() const;

  /// Volume by a tetrahedral fan from the vertex average.
  double volume() const;
  /// Centroid of the solid body.
  Vec3 centroid() const;

  /// Faces incident to vertex `v`, ordered counterclockwise seen from
  /// outside the body.
  std::vector<std::size_t> faces_around_vertex(std::size_t v) const;

  ConvexPolytope translated(const Vec3& offset) const;
  ConvexPolytope scaled(double factor) const;
  /// Copy translated so that the solid centroid sits at the origin.
  ConvexPolytope centered() const { return translated(-centroid()); }

 private:
  std::vector<Vec3> vertices_;
  std::vector<FaceCycle> faces_;
  std::vector<Vec3> normals_;
  std::vector<double> areas_;
  std::vector<double> support_numbers_;
};

/// Lists every violated polytope invariant (vertex on at least three face
/// planes, all vertices inside all halfspaces, closedness, planar convex
/// faces). Empty when the polytope is valid.
std::vector<std::string> check_invariants(const ConvexPolytope& polytope, Tolerance tol = {});

/// Convex hull of a point set. Coplanar hull triangles are merged into
/// polygonal faces and collinear boundary vertices removed.
/// Throws DegenerateInput for fewer than four affinely independent points.
ConvexPolytope convex_hull(std::span<const Vec3> points, Tolerance tol = {});

/// Edge shared by two faces of a halfspace intersection.
struct FaceAdjacency {
  std::size_t face_a;
  std::size_t face_b;
  double length;
};

struct HalfspaceIntersection {
  ConvexPolytope polytope;           // faces indexed like the input normals
  std::vector<FaceAdjacency> edges;  // one entry per edge of the body
};

/// Body {x : <x, n_i> <= h_i}. Face i of the result belongs to normal i; a
/// halfspace that does not touch the body yields an empty, zero-area face.
/// Throws UnboundedBody when the normals do not positively span space and
/// EmptyBody when the intersection has no interior.
HalfspaceIntersection halfspace_intersection(std::span<const Vec3> normals,
                                             std::span<const double> support_numbers,
                                             Tolerance tol = {});

inline ConvexPolytope polytope_from_support(std::span<const Vec3> normals,
                                            std::span<const double> support_numbers,
                                            Tolerance tol = {}) {
  return halfspace_intersection(normals, support_numbers, tol).polytope;
}

/// True when the origin lies strictly inside the convex hull of `directions`.
bool positively_spanning(std::span<const Vec3> directions, Tolerance tol = {});

/// Sum of A_i n_i.
Vec3 closing_defect(std::span<const Vec3> normals, std::span<const double> areas);

/// Spherical area of the normal cone at vertex `v`, i.e. the area of the
/// vertex's spherical image. Throws DegenerateVertex when the incident normals
/// do not span a solid cone.
double normal_cone_area(const ConvexPolytope& polytope, std::size_t v);

}  // namespace convexkit
