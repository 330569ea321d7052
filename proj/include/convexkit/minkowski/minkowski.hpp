#pragma once

#include "convexkit/core/polytope.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

namespace convexkit::minkowski {

/// Face normals and target face areas of a polytope to reconstruct.
struct MinkowskiProblem {
  std::vector<Vec3> normals;
  std::vector<double> areas;
};

/// Sum of A_i n_i.
Vec3 check_closing(const MinkowskiProblem& problem);

/// Throws InvalidArgument unless the problem has at least 4 distinct unit
/// normals that positively span space, positive areas, and a closing defect
/// of at most `closing_threshold` times the total area.
void validate_problem(const MinkowskiProblem& problem, double closing_threshold = 1e-9);

/// Partition of the unit sphere into cells with centers n_j, spherical
/// areas w_j and curvature values K(n_j).
struct CurvatureSample {
  std::vector<Vec3> centers;
  std::vector<double> cell_areas;
  std::vector<double> curvature;
};

/// Cells around the vertices of a subdivided icosahedron (12, 42, 162, ...
/// vertices for level 0, 1, 2, ...); each vertex takes a third of every
/// adjacent spherical triangle.
CurvatureSample icosphere_sample(int level, const std::function<double(const Vec3&)>& curvature);

struct DiscretizedCurvature {
  MinkowskiProblem problem;
  std::vector<double> raw_areas;   // w_j / K(n_j)
  std::vector<double> correction;  // added to raw_areas
  Vec3 defect_before = Vec3::Zero();
  Vec3 defect_after = Vec3::Zero();
};

/// Areas w_j / K(n_j), made closed by the minimal-norm correction
/// -N (N^T N)^{-1} D. Throws NegativeCurvature for K <= 0 and InvalidArgument
/// when the correction makes an area non-positive.
DiscretizedCurvature discretize_curvature(const CurvatureSample& sample);

/// Face areas of polytope_from_support(normals, h).
std::vector<double> area_map(const std::vector<Vec3>& normals, const std::vector<double>& support_numbers);

/// d area_i / d h_j: l_ij / sin(angle_ij) off the diagonal, -sum l_ij cot(angle_ij) on it.
Eigen::MatrixXd area_jacobian(const std::vector<Vec3>& normals, const HalfspaceIntersection& body);

struct MinkowskiOptions {
  /// Required max_i |area_i - A_i| / A_i.
  double tol = 1e-10;
  std::size_t max_iter = 500;
  double closing_threshold = 1e-9;
  /// Initial support numbers (all 1 by default).
  std::optional<std::vector<double>> initial;
  /// A face below this fraction of its target area at the optimum raises DegenerateFace.
  double small_face_fraction = 1e-6;
};

struct MinkowskiSolution {
  ConvexPolytope polytope;  // centroid at the origin
  std::vector<double> support_numbers;
  std::vector<double> areas;
  double residual = 0.0;
  std::size_t iterations = 0;
};

/// Minimizes <A, h> - log vol(h) by damped Newton with the area Jacobian,
/// then rescales so the areas match and centers the body at its centroid.
/// Throws DegenerateFace when a face stays empty and MaxIterExceeded with
/// the best residual.
MinkowskiSolution solve_minkowski(const MinkowskiProblem& problem, const MinkowskiOptions& options = {});

}  // namespace convexkit::minkowski
