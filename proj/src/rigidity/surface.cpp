#include "convexkit/rigidity/surface.hpp"

#include "convexkit/core/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace convexkit::rigidity {

TriangulatedSurface::TriangulatedSurface(std::vector<Vec3> vertices, std::vector<Triangle> triangles,
                                         bool with_boundary)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)), with_boundary_(with_boundary) {
  if (triangles_.empty()) throw SchemaError("surface has no triangles");
  for (const Vec3& v : vertices_)
    if (!all_finite(v)) throw SchemaError("surface vertex is not finite");
  // Directed edge -> count; an oriented closed surface uses each direction once.
  std::map<std::pair<std::size_t, std::size_t>, int> directed;
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const Triangle& tri = triangles_[t];
    for (std::size_t k = 0; k < 3; ++k) {
      if (tri[k] >= vertices_.size())
        throw SchemaError("triangle " + std::to_string(t) + " references a missing vertex");
      if (tri[k] == tri[(k + 1) % 3]) throw SchemaError("triangle " + std::to_string(t) + " repeats a corner");
      if (++directed[{tri[k], tri[(k + 1) % 3]}] > 1)
        throw SchemaError("edge " + std::to_string(tri[k]) + "-" + std::to_string(tri[(k + 1) % 3]) +
                          " is used twice in the same direction");
    }
  }
  for (const auto& [e, count] : directed) {
    const bool has_twin = directed.count({e.second, e.first}) > 0;
    if (!has_twin && !with_boundary_)
      throw SchemaError("edge " + std::to_string(e.first) + "-" + std::to_string(e.second) +
                        " lies in a single triangle");
    if (e.first < e.second || !has_twin) edges_.push_back({std::min(e.first, e.second), std::max(e.first, e.second)});
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& l, const Edge& r) { return std::tie(l.a, l.b) < std::tie(r.a, r.b); });
}

TriangulatedSurface TriangulatedSurface::from_polytope(const ConvexPolytope& polytope) {
  std::vector<Triangle> tris;
  for (const FaceCycle& f : polytope.faces())
    for (std::size_t k = 1; k + 1 < f.size(); ++k) tris.push_back({f[0], f[k], f[k + 1]});
  return TriangulatedSurface(polytope.vertices(), std::move(tris));
}

TriangulatedSurface TriangulatedSurface::from_polytope_with_face_centers(const ConvexPolytope& polytope) {
  std::vector<Vec3> verts = polytope.vertices();
  std::vector<Triangle> tris;
  for (const FaceCycle& f : polytope.faces()) {
    if (f.size() < 3) continue;
    Vec3 c = Vec3::Zero();
    for (std::size_t v : f) c += polytope.vertices()[v];
    verts.push_back(c / static_cast<double>(f.size()));
    const std::size_t ci = verts.size() - 1;
    for (std::size_t k = 0; k < f.size(); ++k) tris.push_back({ci, f[k], f[(k + 1) % f.size()]});
  }
  return TriangulatedSurface(std::move(verts), std::move(tris));
}

double TriangulatedSurface::edge_scale() const {
  double s = 0.0;
  for (const Edge& e : edges_) s = std::max(s, (vertices_[e.a] - vertices_[e.b]).norm());
  return s;
}

BendingField trivial_field(const TriangulatedSurface& surface, const Vec3& a, const Vec3& b) {
  const auto& v = surface.vertices();
  BendingField tau(static_cast<long>(3 * v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) tau.segment<3>(static_cast<long>(3 * i)) = a.cross(v[i]) + b;
  return tau;
}

Eigen::SparseMatrix<double> isometry_constraints(const TriangulatedSurface& surface) {
  const auto& v = surface.vertices();
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(6 * surface.edges().size());
  long row = 0;
  for (const Edge& e : surface.edges()) {
    const Vec3 d = v[e.a] - v[e.b];
    const double len = d.norm();
    if (len <= 0.0) throw DegenerateGeometry("edge " + std::to_string(e.a) + "-" + std::to_string(e.b) + " has zero length");
    for (int k = 0; k < 3; ++k) {
      entries.emplace_back(row, static_cast<long>(3 * e.a) + k, d[k] / len);
      entries.emplace_back(row, static_cast<long>(3 * e.b) + k, -d[k] / len);
    }
    ++row;
  }
  Eigen::SparseMatrix<double> c(row, static_cast<long>(3 * v.size()));
  c.setFromTriplets(entries.begin(), entries.end());
  return c;
}

double constraint_residual(const TriangulatedSurface& surface, const BendingField& field) {
  if (field.size() != static_cast<long>(3 * surface.vertices().size()))
    throw InvalidArgument("bending field has the wrong dimension");
  if (!field.allFinite()) throw InvalidArgument("bending field is not finite");
  return (isometry_constraints(surface) * field).cwiseAbs().maxCoeff();
}

namespace {

std::vector<std::size_t> flat_vertices(const TriangulatedSurface& surface) {
  const auto& v = surface.vertices();
  std::vector<double> angle(v.size(), 0.0);
  for (const Triangle& t : surface.triangles())
    for (std::size_t k = 0; k < 3; ++k) {
      const Vec3 a = v[t[(k + 1) % 3]] - v[t[k]], b = v[t[(k + 2) % 3]] - v[t[k]];
      angle[t[k]] += std::atan2(a.cross(b).norm(), a.dot(b));
    }
  std::vector<bool> on_boundary(v.size(), false);
  if (surface.with_boundary()) {
    std::map<std::pair<std::size_t, std::size_t>, int> count;
    for (const Triangle& t : surface.triangles())
      for (std::size_t k = 0; k < 3; ++k) ++count[std::minmax(t[k], t[(k + 1) % 3])];
    for (const auto& [e, c] : count)
      if (c == 1) on_boundary[e.first] = on_boundary[e.second] = true;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!on_boundary[i] && std::abs(angle[i] - 2.0 * std::numbers::pi) <= 1e-9) out.push_back(i);
  return out;
}

}  // namespace

BendingSpace bending_space(const TriangulatedSurface& surface, double relative_tol) {
  const auto& v = surface.vertices();
  const long n = static_cast<long>(3 * v.size());
  const Eigen::MatrixXd c = Eigen::MatrixXd(isometry_constraints(surface));

  // Trivial fields: 3 translations and 3 infinitesimal rotations.
  Eigen::MatrixXd trivial(n, 6);
  for (int k = 0; k < 3; ++k) {
    trivial.col(k) = trivial_field(surface, Vec3::Zero(), Vec3::Unit(k));
    trivial.col(3 + k) = trivial_field(surface, Vec3::Unit(k), Vec3::Zero());
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> tqr(trivial);
  tqr.setThreshold(1e-10);
  if (tqr.rank() < 6) throw DegenerateGeometry("vertices are collinear; trivial fields span fewer than 6 dimensions");
  const Eigen::MatrixXd tq = Eigen::MatrixXd(tqr.householderQ()).leftCols(6);

  BendingSpace out;
  out.flat_vertices = flat_vertices(surface);
  out.trivial_residual = (c * tq).cwiseAbs().maxCoeff();

  // Square up with zero rows so the SVD exposes the full right null space.
  Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(std::max(c.rows(), n), n);
  padded.topRows(c.rows()) = c;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(padded, Eigen::ComputeFullV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  out.sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
  out.threshold = relative_tol * out.sigma_max;
  long rank = 0;
  while (rank < sigma.size() && sigma(rank) > out.threshold) ++rank;
  out.kernel_dim = static_cast<std::size_t>(n - rank);
  out.kernel = svd.matrixV().rightCols(n - rank);
  const long tail = std::min<long>(n, static_cast<long>(out.kernel_dim) + 6);
  for (long k = 0; k < tail; ++k) out.spectrum_tail.push_back(sigma(n - 1 - k));

  // Kernel columns are orthonormal, so what is left after removing the
  // trivial part has singular values in [0, 1].
  const Eigen::MatrixXd rest = out.kernel - tq * (tq.transpose() * out.kernel);
  out.nontrivial = Eigen::MatrixXd(n, 0);
  if (rest.cols() > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> rsvd(rest, Eigen::ComputeThinU);
    long r = 0;
    while (r < rsvd.singularValues().size() && rsvd.singularValues()(r) > 1e-6) ++r;
    out.nontrivial = rsvd.matrixU().leftCols(r);
    out.nontrivial_dim = static_cast<std::size_t>(r);
  }
  return out;
}

}  // namespace convexkit::rigidity
