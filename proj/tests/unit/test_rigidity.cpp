#include "generators.hpp"
#include "support/oracles.hpp"

#include "convexkit/core/errors.hpp"
#include "convexkit/rigidity/defo.hpp"
#include "convexkit/rigidity/surface.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace convexkit;
using namespace convexkit::rigidity;
using convexkit::cli::Rng;

namespace {

std::size_t dense_kernel(const TriangulatedSurface& s) {
  return oracle::kernel_dimension(Eigen::MatrixXd(isometry_constraints(s)));
}

Vec3 random_vec(Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {u(rng), u(rng), u(rng)};
}

}  // namespace

TEST_CASE("triangulated convex polytopes are infinitesimally rigid") {
  for (const auto& p : {cli::regular_octahedron(), cli::regular_icosahedron(), cli::regular_tetrahedron()}) {
    const auto s = TriangulatedSurface::from_polytope(p);
    const auto b = bending_space(s);
    CHECK(b.kernel_dim == 6);
    CHECK(b.nontrivial_dim == 0);
    CHECK(dense_kernel(s) == 6);
    CHECK(b.flat_vertices.empty());
  }
}

TEST_CASE("random hulls are rigid") {
  Rng rng(41);
  for (int t = 0; t < 5; ++t) {
    const auto s = TriangulatedSurface::from_polytope(cli::random_hull(rng, 10 + 4 * t));
    CHECK(bending_space(s).kernel_dim == 6);
    CHECK(dense_kernel(s) == 6);
  }
}

TEST_CASE("flat face centers carry nontrivial bendings") {
  const auto s = TriangulatedSurface::from_polytope_with_face_centers(cli::unit_cube());
  const auto b = bending_space(s);
  CHECK(b.kernel_dim == 12);
  CHECK(b.nontrivial_dim == 6);
  CHECK(b.flat_vertices.size() == 6);
  CHECK(dense_kernel(s) == 12);
  // Every nontrivial field pushes a face center out of its plane.
  for (Eigen::Index c = 0; c < b.nontrivial.cols(); ++c) CHECK(constraint_residual(s, b.nontrivial.col(c)) <= 1e-10);
}

TEST_CASE("trivial fields satisfy the constraints") {
  const auto s = TriangulatedSurface::from_polytope(cli::regular_icosahedron());
  Rng rng(42);
  for (int t = 0; t < 100; ++t) CHECK(constraint_residual(s, trivial_field(s, random_vec(rng), random_vec(rng))) <= 1e-12);
  CHECK(bending_space(s).trivial_residual <= 1e-12);
}

TEST_CASE("a hinged pair of triangles bends along the hinge") {
  const TriangulatedSurface s({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}, {{0, 1, 2}, {0, 2, 3}}, true);
  const auto b = bending_space(s);
  CHECK(b.kernel_dim == 12 - 5);
  CHECK(b.nontrivial_dim == 1);
  CHECK(dense_kernel(s) == 7);
}

TEST_CASE("surface validation") {
  const std::vector<Vec3> v{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  CHECK_THROWS_AS(TriangulatedSurface(v, {{0, 1, 2}}), SchemaError);
  CHECK_THROWS_AS(TriangulatedSurface(v, {{0, 1, 7}}, true), SchemaError);
  CHECK_THROWS_AS(TriangulatedSurface(v, {{0, 0, 1}}, true), SchemaError);
  // Inconsistent orientation: edge 0-1 traversed twice in the same direction.
  CHECK_THROWS_AS(TriangulatedSurface(v, {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}), SchemaError);
  CHECK_NOTHROW(TriangulatedSurface(v, {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}}));
}

TEST_CASE("collinear surfaces are degenerate") {
  const TriangulatedSurface s({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}, {{0, 1, 2}}, true);
  CHECK_THROWS_AS(bending_space(s), DegenerateGeometry);
}

TEST_CASE("discrete Hessian is exact on quadratics") {
  auto q = [](double x, double y) { return 1.5 * x * x - 0.7 * x * y + 0.4 * y * y + x - 2 * y; };
  const auto g = GridPatch::sample(7, 9, 0.1, -0.3, 0.2, q, q);
  const Hessian2 h = discrete_hessian(g.z, g.h, 3, 4);
  CHECK(h.xx == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(h.xy == doctest::Approx(-0.7).epsilon(1e-9));
  CHECK(h.yy == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(g.x(2) == doctest::Approx(-0.1));
  CHECK(g.y(3) == doctest::Approx(0.5));
}

TEST_CASE("bending equation converges at second order") {
  const double w = std::sqrt(0.96);
  auto z = [](double x, double y) { return 0.5 * (x * x + y * y) + 0.2 * x * y; };
  auto exact = [&](double x, double y) { return std::exp(x + 0.2 * y) * std::cos(w * y); };
  std::vector<double> errors;
  for (std::size_t n : {17, 33, 65}) {
    GridPatch g = GridPatch::sample(n, n, 1.0 / double(n - 1), 0.0, 0.0, z, exact);
    const Eigen::MatrixXd truth = g.zeta;
    g.zeta.block(1, 1, n - 2, n - 2).setZero();
    const GridPatch s = solve_defo(g);
    CHECK(defo_residual(s) <= 1e-9);
    errors.push_back((s.zeta - truth).cwiseAbs().maxCoeff());
  }
  for (std::size_t k = 1; k < errors.size(); ++k) CHECK(std::abs(std::log2(errors[k - 1] / errors[k]) - 2.0) <= 0.3);
}

TEST_CASE("polynomial solutions are reproduced exactly") {
  // zeta = x^2 - y^2 solves z_xx zeta_yy + z_yy zeta_xx = 0 for z = (x^2 + y^2) / 2.
  auto z = [](double x, double y) { return 0.5 * (x * x + y * y); };
  auto zeta = [](double x, double y) { return x * x - y * y + 3 * x * y; };
  GridPatch g = GridPatch::sample(11, 11, 0.1, 0.0, 0.0, z, zeta);
  const Eigen::MatrixXd truth = g.zeta;
  g.zeta.block(1, 1, 9, 9).setZero();
  CHECK((solve_defo(g).zeta - truth).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("bending fields of convex patches have non-positive Hessian determinant") {
  Rng rng(44);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    const double a = 1 + 0.5 * u(rng), c = 1 + 0.5 * u(rng), b = 0.4 * u(rng);
    auto z = [&](double x, double y) { return 0.5 * (a * x * x + 2 * b * x * y + c * y * y) + 0.1 * std::exp(x); };
    const double k = u(rng);
    auto bd = [&](double x, double y) { return k * x * y + std::sin(2 * x) * y; };
    const auto r = main_lemma_check(solve_defo(GridPatch::sample(21, 21, 0.05, -0.5, -0.5, z, bd)));
    CHECK(r.passed());
    CHECK(r.checked == 19 * 19);
    CHECK(r.max_det <= 1e-8);
  }
}

TEST_CASE("a convex-looking field is flagged") {
  auto z = [](double x, double y) { return 0.5 * (x * x + y * y); };
  auto zeta = [](double x, double y) { return x * x + y * y; };
  const auto g = GridPatch::sample(9, 9, 0.1, 0.0, 0.0, z, zeta);
  CHECK_THROWS_AS(main_lemma_check(g), PrecisionWarning);
  const auto r = main_lemma_check(g, 1e-8, 1e3);
  CHECK_FALSE(r.passed());
  CHECK(r.violations.size() == 49);
}

TEST_CASE("saddle surfaces are not strictly convex") {
  auto saddle = [](double x, double y) { return x * x - y * y; };
  const auto g = GridPatch::sample(9, 9, 0.1, 0.0, 0.0, saddle, saddle);
  CHECK_THROWS_AS(solve_defo(g), NotStrictlyConvex);
}
