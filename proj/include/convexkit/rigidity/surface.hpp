#pragma once

#include "convexkit/core/polytope.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <array>
#include <cstddef>
#include <vector>

namespace convexkit::rigidity {

using Triangle = std::array<std::size_t, 3>;

struct Edge {
  std::size_t a;
  std::size_t b;  // a < b
};

/// Triangle mesh. Closed surfaces must be oriented 2-manifolds: every edge
/// lies in exactly two triangles, traversed in opposite directions.
class TriangulatedSurface {
 public:
  TriangulatedSurface() = default;
  /// Throws SchemaError on bad indices, repeated corners or a non-manifold
  /// edge. With `with_boundary` edges may also lie in a single triangle.
  TriangulatedSurface(std::vector<Vec3> vertices, std::vector<Triangle> triangles, bool with_boundary = false);

  /// Fan triangulation of every face from its first vertex.
  static TriangulatedSurface from_polytope(const ConvexPolytope& polytope);
  /// Every face triangulated through an added vertex at its vertex average.
  static TriangulatedSurface from_polytope_with_face_centers(const ConvexPolytope& polytope);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Edge>& edges() const { return edges_; }
  bool with_boundary() const { return with_boundary_; }
  double edge_scale() const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Edge> edges_;
  bool with_boundary_ = false;
};

/// Velocity per vertex, stored as (x0, y0, z0, x1, ...).
using BendingField = Eigen::VectorXd;

/// Field a x v + b.
BendingField trivial_field(const TriangulatedSurface& surface, const Vec3& a, const Vec3& b);

/// One row per edge: ((v_i - v_j) / |v_i - v_j|) . (tau_i - tau_j).
Eigen::SparseMatrix<double> isometry_constraints(const TriangulatedSurface& surface);

/// Max |row . tau| over the constraint rows.
double constraint_residual(const TriangulatedSurface& surface, const BendingField& field);

struct BendingSpace {
  std::size_t kernel_dim = 0;
  std::size_t nontrivial_dim = 0;
  Eigen::MatrixXd kernel;      // orthonormal columns
  Eigen::MatrixXd nontrivial;  // orthonormal columns, orthogonal to the trivial fields
  double sigma_max = 0.0;
  double threshold = 0.0;
  /// Smallest singular values, ascending, zeros for the 3V - E missing ones.
  std::vector<double> spectrum_tail;
  /// Max constraint residual over an orthonormal basis of the trivial fields.
  double trivial_residual = 0.0;
  /// Vertices whose incident corner angles sum to 2 pi.
  std::vector<std::size_t> flat_vertices;
};

/// Kernel of isometry_constraints by SVD; singular values below
/// `relative_tol * sigma_max` count as zero. Throws DegenerateGeometry when
/// the trivial fields span fewer than 6 dimensions.
BendingSpace bending_space(const TriangulatedSurface& surface, double relative_tol = 1e-10);

}  // namespace convexkit::rigidity
