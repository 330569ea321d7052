#include "generators.hpp"
#include "support/oracles.hpp"

#include "convexkit/core/errors.hpp"
#include "convexkit/metric/angles.hpp"
#include "convexkit/metric/geodesic.hpp"
#include "convexkit/metric/net.hpp"

#include <doctest.h>

#include <numbers>

using namespace convexkit;
using namespace convexkit::metric;
using convexkit::cli::Rng;

namespace {


MetricNet doubled_triangle() {
  const std::vector<Vec2> t{{0.0, 0.0}, {1.0, 0.0}, {0.3, 0.8}};
  const std::vector<Vec2> m{{0.0, 0.0}, {0.3, -0.8}, {1.0, 0.0}};
  return MetricNet({t, m}, {{{0, 0}, {1, 2}}, {{0, 1}, {1, 1}}, {{0, 2}, {1, 0}}});
}

MetricNet doubled_square() {
  const std::vector<Vec2> a{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const std::vector<Vec2> b{{0, 0}, {0, -1}, {1, -1}, {1, 0}};
  return MetricNet({a, b}, {{{0, 0}, {1, 3}}, {{0, 1}, {1, 2}}, {{0, 2}, {1, 1}}, {{0, 3}, {1, 0}}});
}

// Face index of the cube in the oracle's convention, from an outward normal.
int oracle_face(const Vec3& n) {
  for (int f = 0; f < 6; ++f)
    if ((oracle::cube_normal(f) - n).norm() < 1e-12) return f;
  return -1;
}

}  // namespace

TEST_CASE("polytope nets satisfy the gluing conditions") {
  for (const auto& p : {cli::unit_cube(), cli::regular_tetrahedron(), cli::regular_icosahedron()}) {
    const auto cut = net_from_polytope(p);
    const auto v = validate_net(cut.net);
    CHECK(v.passed());
    CHECK(v.unpaired_edges.empty());
    CHECK(cut.net.vertex_class_count() == p.vertex_count());
  }
  CHECK(validate_net(doubled_triangle()).passed());
}

TEST_CASE("stretching one cube face breaks equal edge lengths") {
  const auto cut = net_from_polytope(cli::unit_cube());
  auto polys = cut.net.polygons();
  for (auto& c : polys[2]) c *= 1.01;
  const auto v = validate_net(MetricNet(polys, cut.net.identifications()));
  CHECK_FALSE(v.equal_edges.passed);
  CHECK(v.mismatched_identifications.size() == 4);
  CHECK(v.sphere_topology.passed);
}

TEST_CASE("an unpaired edge fails the topology condition") {
  auto ids = doubled_triangle().identifications();
  ids.pop_back();
  const auto v = validate_net(MetricNet(doubled_triangle().polygons(), ids));
  CHECK_FALSE(v.sphere_topology.passed);
  CHECK(v.unpaired_edges.size() == 2);
  CHECK_THROWS_AS(vertex_curvatures(MetricNet(doubled_triangle().polygons(), ids)), InvalidNet);
}

TEST_CASE("curvatures of the doubled triangle are twice the exterior angles") {
  const auto k = vertex_curvatures(doubled_triangle());
  CHECK(k.total == doctest::Approx(4 * std::numbers::pi).epsilon(1e-14));
  const MetricNet net = doubled_triangle();
  for (std::size_t c = 0; c < 3; ++c) {
    const double interior = net.corner_angle({0, c});
    const std::size_t cls = net.vertex_class({0, c});
    CHECK(k.curvature[cls] == doctest::Approx(2 * (std::numbers::pi - interior)).epsilon(1e-13));
  }
}

TEST_CASE("intrinsic curvature equals the normal cone area on random hulls") {
  Rng rng(2);
  for (int t = 0; t < 25; ++t) {
    const ConvexPolytope p = cli::random_hull(rng, 5 + t);
    const auto cut = net_from_polytope(p);
    const auto k = vertex_curvatures(cut.net);
    CHECK(std::abs(k.total - 4 * std::numbers::pi) < 1e-9);
    for (std::size_t c = 0; c < k.curvature.size(); ++c) {
      CHECK(k.curvature[c] > 0.0);
      CHECK(std::abs(k.curvature[c] - normal_cone_area(p, cut.class_vertex[c])) < 1e-9);
    }
  }
}

TEST_CASE("geodesic inside one face is the straight segment") {
  const auto cut = net_from_polytope(cli::unit_cube());
  const Vec2 a = cut.net.corner(0, 0), b = cut.net.corner(0, 2);
  const Vec2 x = 0.6 * a + 0.4 * b, y = x + Vec2(1e-3, 0.0);
  CHECK(intrinsic_distance(cut.net, {0, x}, {0, y}) == doctest::Approx(1e-3).epsilon(1e-9));
}

TEST_CASE("cube opposite corners are sqrt(5) apart") {
  const ConvexPolytope cube = cli::unit_cube();
  const auto cut = net_from_polytope(cube);
  std::size_t far = 0;
  for (std::size_t v = 0; v < cube.vertex_count(); ++v)
    if ((cube.vertices()[v] + cube.vertices()[0]).norm() < 1e-12) far = v;
  auto at_vertex = [&](std::size_t v) {
    for (std::size_t p = 0; p < cut.corner_vertex.size(); ++p)
      for (std::size_t i = 0; i < cut.corner_vertex[p].size(); ++i)
        if (cut.corner_vertex[p][i] == v) return SurfacePoint{p, cut.net.corner(p, i)};
    return SurfacePoint{};
  };
  const auto path = shortest_path(cut.net, at_vertex(0), at_vertex(far));
  CHECK(std::abs(path.length - std::sqrt(5.0)) < 1e-9);
  CHECK(path.faces.size() == 2);
}

TEST_CASE("cube geodesics match exhaustive unfolding") {
  const ConvexPolytope cube = cli::unit_cube();
  const auto cut = net_from_polytope(cube);
  Rng rng(9);
  std::uniform_int_distribution<int> face(0, 5);
  std::uniform_real_distribution<double> coord(-0.45, 0.45);
  auto sample = [&](int& oracle_index) {
    const std::size_t f = static_cast<std::size_t>(face(rng));
    const Vec3 n = cube.normals()[f];
    Vec3 x = 0.5 * n;
    for (int k = 0; k < 3; ++k)
      if (std::abs(n[k]) < 0.5) x[k] = coord(rng);
    oracle_index = oracle_face(n);
    const std::size_t poly = cut.polygon_of_face(f);
    return std::pair{x, SurfacePoint{poly, cut.to_local(poly, x)}};
  };
  for (int t = 0; t < 25; ++t) {
    int fa = 0, fb = 0;
    const auto [xa, a] = sample(fa);
    const auto [xb, b] = sample(fb);
    CHECK(std::abs(intrinsic_distance(cut.net, a, b) - oracle::cube_distance(xa, fa, xb, fb)) < 1e-9);
  }
}

TEST_CASE("geodesic path structure") {
  const auto cut = net_from_polytope(cli::regular_icosahedron());
  const SurfacePoint a{0, (cut.net.corner(0, 0) + cut.net.corner(0, 1) + cut.net.corner(0, 2)) / 3.0};
  const SurfacePoint b{11, (cut.net.corner(11, 0) + cut.net.corner(11, 1) + cut.net.corner(11, 2)) / 3.0};
  const auto path = shortest_path(cut.net, a, b);
  CHECK(path.points.size() == path.faces.size() + 1);
  double sum = 0.0;
  for (const auto& s : path.segments) sum += (s.to - s.from).norm();
  CHECK(sum == doctest::Approx(path.length).epsilon(1e-12));
  // Symmetry of the metric.
  CHECK(intrinsic_distance(cut.net, b, a) == doctest::Approx(path.length).epsilon(1e-12));
}

TEST_CASE("comparison angle matches the law of cosines") {
  Rng rng(8);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int t = 0; t < 200; ++t) {
    const double x = u(rng), y = u(rng), a = std::uniform_real_distribution<double>(0.01, 3.1)(rng);
    const double d = std::sqrt(x * x + y * y - 2 * x * y * std::cos(a));
    CHECK(comparison_angle(x, y, d) == doctest::Approx(a).epsilon(1e-10));
  }
  CHECK(comparison_angle(1.0, 1.0, 2.0) == doctest::Approx(std::numbers::pi));
  CHECK(comparison_angle(1.0, 2.0, 1.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(comparison_angle(1.0, 1.0, 2.5), TriangleInequalityViolated);
  CHECK_THROWS_AS(comparison_angle(0.0, 1.0, 1.0), TriangleInequalityViolated);
}

TEST_CASE("comparison angles are constant on a flat doubled square") {
  const MetricNet net = doubled_square();
  const auto scan = angle_monotonicity_scan(net, {0, {0.2, 0.2}}, {0, {0.9, 0.3}}, {0, {0.4, 0.8}}, 8);
  CHECK(scan.violations.empty());
  for (const auto& s : scan.samples) CHECK(s.angle == doctest::Approx(scan.samples.front().angle).epsilon(1e-9));
}

TEST_CASE("comparison angles never increase on convex polytopes") {
  Rng rng(12);
  std::uniform_real_distribution<double> w(0.05, 1.0);
  for (int t = 0; t < 6; ++t) {
    const auto cut = net_from_polytope(cli::random_hull(rng, 8));
    auto point = [&] {
      const std::size_t p = std::uniform_int_distribution<std::size_t>(0, cut.net.polygon_count() - 1)(rng);
      Vec2 x = Vec2::Zero();
      double total = 0.0;
      for (std::size_t i = 0; i < cut.net.corner_count(p); ++i) {
        const double c = w(rng);
        x += c * cut.net.corner(p, i);
        total += c;
      }
      return SurfacePoint{p, x / total};
    };
    const auto scan = angle_monotonicity_scan(cut.net, point(), point(), point(), 8);
    CHECK(scan.violations.empty());
    CHECK(scan.samples.size() == 8);
  }
}

TEST_CASE("an injected distance increase is reported as a violation") {
  const MetricNet net = doubled_square();
  ScanOptions o;
  o.distance_hook = [](std::size_t k, double d) { return k == 5 ? d * 1.01 : d; };
  const auto scan = angle_monotonicity_scan(net, {0, {0.2, 0.2}}, {0, {0.9, 0.3}}, {0, {0.4, 0.8}}, 8, o);
  CHECK_FALSE(scan.violations.empty());
}

TEST_CASE("triangle excess") {
  const auto cut = net_from_polytope(cli::unit_cube());
  const Vec2 c = (cut.net.corner(0, 0) + cut.net.corner(0, 2)) / 2.0;
  const auto flat = triangle_excess(cut.net, {0, c}, {0, c + Vec2(0.1, 0.0)}, {0, c + Vec2(0.0, 0.1)});
  CHECK(std::abs(flat.excess) < 1e-9);
  CHECK(flat.angles[0] == doctest::Approx(std::numbers::pi / 2).epsilon(1e-9));
}
