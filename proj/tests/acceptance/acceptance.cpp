// Runs every acceptance criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion. Exit status is the number of failures.

#include "generators.hpp"
#include "support/oracles.hpp"

#include "convexkit/core/errors.hpp"
#include "convexkit/ma/continuation.hpp"
#include "convexkit/metric/angles.hpp"
#include "convexkit/metric/geodesic.hpp"
#include "convexkit/metric/net.hpp"
#include "convexkit/minkowski/minkowski.hpp"
#include "convexkit/rigidity/defo.hpp"
#include "convexkit/rigidity/surface.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

using namespace convexkit;
using cli::Rng;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool passed = true;
  std::string detail;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Vec2 random_interior(Rng& rng, const metric::MetricNet& net, std::size_t& polygon) {
  polygon = std::uniform_int_distribution<std::size_t>(0, net.polygon_count() - 1)(rng);
  std::uniform_real_distribution<double> w(0.05, 1.0);
  Vec2 x = Vec2::Zero();
  double total = 0.0;
  for (std::size_t i = 0; i < net.corner_count(polygon); ++i) {
    const double c = w(rng);
    x += c * net.corner(polygon, i);
    total += c;
  }
  return x / total;
}

Outcome egregium() {
  Rng rng(1001);
  std::uniform_int_distribution<std::size_t> size(5, 50);
  double worst = 0.0, worst_total = 0.0;
  for (int t = 0; t < 100; ++t) {
    const ConvexPolytope p = cli::random_hull(rng, size(rng));
    const auto cut = metric::net_from_polytope(p);
    const auto k = metric::vertex_curvatures(cut.net);
    for (std::size_t c = 0; c < k.curvature.size(); ++c)
      worst = std::max(worst, std::abs(k.curvature[c] - normal_cone_area(p, cut.class_vertex[c])));
    worst_total = std::max(worst_total, std::abs(k.total - 4 * kPi));
  }
  return {worst <= 1e-9 && worst_total <= 1e-9,
          "100 hulls, max |2pi - theta - normal cone| = " + fmt(worst) + ", max |total - 4pi| = " + fmt(worst_total)};
}

metric::MetricNet move_edge_end(const metric::MetricNet& net, std::size_t k) {
  auto polys = net.polygons();
  const auto e = net.identifications()[k].a;
  auto& poly = polys[e.polygon];
  const std::size_t end = (e.edge + 1) % poly.size();
  poly[end] += 0.01 * (poly[end] - poly[e.edge]);
  return metric::MetricNet(polys, net.identifications());
}

Outcome net_validation() {
  const std::vector<Vec2> t{{0.0, 0.0}, {1.0, 0.0}, {0.3, 0.8}};
  const std::vector<Vec2> m{{0.0, 0.0}, {0.3, -0.8}, {1.0, 0.0}};
  const metric::MetricNet doubled({t, m}, {{{0, 0}, {1, 2}}, {{0, 1}, {1, 1}}, {{0, 2}, {1, 0}}});
  const std::vector<metric::MetricNet> nets{metric::net_from_polytope(cli::unit_cube()).net,
                                            metric::net_from_polytope(cli::regular_tetrahedron()).net, doubled};
  bool ok = true;
  std::size_t perturbations = 0, caught = 0;
  for (const auto& net : nets) {
    ok = ok && metric::validate_net(net).passed();
    for (std::size_t k = 0; k < net.identifications().size(); ++k) {
      ++perturbations;
      const auto v = metric::validate_net(move_edge_end(net, k));
      const auto& bad = v.mismatched_identifications;
      if (!v.equal_edges.passed && std::find(bad.begin(), bad.end(), k) != bad.end()) ++caught;
    }
  }
  return {ok && caught == perturbations,
          "3 nets valid: " + std::string(ok ? "yes" : "no") + ", perturbations caught " + std::to_string(caught) + "/" +
              std::to_string(perturbations)};
}

Outcome geodesics() {
  const ConvexPolytope cube = cli::unit_cube();
  const auto cut = metric::net_from_polytope(cube);
  auto face_of = [](const Vec3& n) {
    for (int f = 0; f < 6; ++f)
      if ((oracle::cube_normal(f) - n).norm() < 1e-12) return f;
    return -1;
  };
  // Opposite corners, seen from the -x and +x faces.
  const Vec3 a(-0.5, -0.5, -0.5), b(0.5, 0.5, 0.5);
  auto with_normal = [&](const Vec3& n) {
    for (std::size_t k = 0; k < cube.face_count(); ++k)
      if ((cube.normals()[k] - n).norm() < 1e-12) return k;
    return std::size_t{0};
  };
  const std::size_t face_a = with_normal(-Vec3::UnitX()), face_b = with_normal(Vec3::UnitX());
  const std::size_t pa = cut.polygon_of_face(face_a), pb = cut.polygon_of_face(face_b);
  const double corner = metric::intrinsic_distance(cut.net, {pa, cut.to_local(pa, a)}, {pb, cut.to_local(pb, b)});
  const double oracle_corner = oracle::cube_distance(a, face_of(cube.normals()[face_a]), b, face_of(cube.normals()[face_b]));
  double worst = std::max(std::abs(corner - std::sqrt(5.0)), std::abs(oracle_corner - std::sqrt(5.0)));

  Rng rng(1003);
  std::uniform_int_distribution<std::size_t> face(0, 5);
  std::uniform_real_distribution<double> coord(-0.5, 0.5);
  auto sample = [&] {
    const std::size_t f = face(rng);
    const Vec3 n = cube.normals()[f];
    Vec3 x = 0.5 * n;
    for (int k = 0; k < 3; ++k)
      if (std::abs(n[k]) < 0.5) x[k] = coord(rng);
    const std::size_t poly = cut.polygon_of_face(f);
    return std::tuple{x, face_of(n), metric::SurfacePoint{poly, cut.to_local(poly, x)}};
  };
  for (int t = 0; t < 50; ++t) {
    const auto [xa, oa, sa] = sample();
    const auto [xb, ob, sb] = sample();
    worst = std::max(worst, std::abs(metric::intrinsic_distance(cut.net, sa, sb) - oracle::cube_distance(xa, oa, xb, ob)));
  }
  return {worst <= 1e-9, "corner distance " + fmt(corner) + ", max error vs unfolding oracle over 51 pairs " + fmt(worst)};
}

Outcome angle_monotonicity() {
  Rng rng(1004);
  std::uniform_int_distribution<std::size_t> size(6, 14);
  std::size_t violations = 0;
  for (int t = 0; t < 20; ++t) {
    const auto cut = metric::net_from_polytope(cli::random_hull(rng, size(rng)));
    std::size_t po = 0, pa = 0, pb = 0;
    const Vec2 o = random_interior(rng, cut.net, po), a = random_interior(rng, cut.net, pa),
               b = random_interior(rng, cut.net, pb);
    violations += metric::angle_monotonicity_scan(cut.net, {po, o}, {pa, a}, {pb, b}, 8).violations.size();
  }
  return {violations == 0, "20 configurations x 8 samples, violations " + std::to_string(violations)};
}

ma::PLConvexFunction random_pl(Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a = 1 + 0.4 * u(rng), b = 0.3 * u(rng), c = 1 + 0.4 * u(rng), k = 0.3 * (u(rng) + 1);
  const Vec2 kink(0.5 + 0.2 * u(rng), 0.5 + 0.2 * u(rng));
  ma::PLConvexFunction f;
  const int n = 4;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      Vec2 x(i / double(n), j / double(n));
      if (i > 0 && j > 0 && i < n && j < n) x += Vec2(u(rng), u(rng)) * (0.2 / n);
      f.nodes.push_back(x);
      f.values.push_back(0.5 * (a * x.x() * x.x() + 2 * b * x.x() * x.y() + c * x.y() * x.y()) + k * (x - kink).norm());
    }
  return f;
}

Outcome ma_measures() {
  const ma::PLConvexFunction cone{{{0, 0}, {-1, -1}, {1, -1}, {1, 1}, {-1, 1}}, {0, 1, 1, 1, 1}};
  const double atom = ma::ma_measure(cone, 0).area;

  ma::PLConvexFunction quad;
  const int n = 8;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      quad.nodes.emplace_back(i / double(n), j / double(n));
      quad.values.push_back(0.5 * quad.nodes.back().squaredNorm());
    }
  const std::vector<Vec2> image{{0, 0}, {1, 0}, {1, 1}, {0, 1}};  // gradient image of |x|^2/2 on the unit square
  double total = 0.0;
  for (std::size_t k = 0; k < quad.nodes.size(); ++k) total += ma::subgradient_cell(quad, k, image).area;

  Rng rng(1005);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto f = random_pl(rng);
    const std::size_t node = 6 + 6 * std::uniform_int_distribution<std::size_t>(0, 2)(rng);
    const auto cell = ma::ma_measure(f, node);
    Vec2 lo = cell.polygon.front(), hi = lo;
    for (const Vec2& p : cell.polygon) lo = lo.cwiseMin(p), hi = hi.cwiseMax(p);
    const double mc =
        oracle::subgradient_area(f.nodes, f.values, node, (lo + hi) / 2, 0.75 * (hi - lo).maxCoeff(), 1000000, 50 + t);
    worst = std::max(worst, std::abs(mc - cell.area) / cell.area);
  }
  return {std::abs(atom - 2.0) <= 1e-12 && std::abs(total - 1.0) <= 1e-9 && worst <= 0.01,
          "atom " + fmt(atom) + ", |total - area(G)| " + fmt(std::abs(total - 1.0)) +
              ", max relative Monte-Carlo deviation " + fmt(worst)};
}

ma::MAProblem grid_problem(int n, const std::function<double(const Vec2&)>& g) {
  ma::MAProblem p;
  p.domain = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  for (int i = 0; i <= n + 1; ++i)
    for (int j = 0; j <= n + 1; ++j) {
      const Vec2 x(i / double(n + 1), j / double(n + 1));
      if (i == 0 || j == 0 || i == n + 1 || j == n + 1) {
        p.boundary_nodes.push_back(x);
        p.boundary_values.push_back(g(x));
      } else {
        p.interior_nodes.push_back(x);
      }
    }
  return p;
}

Outcome ma_round_trip() {
  Rng rng(1006);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  bool monotone = true;
  for (int t = 0; t < 10; ++t) {
    const double a = 1 + 0.3 * u(rng), b = 0.3 * u(rng), c = 1 + 0.3 * u(rng);
    auto f = [&](const Vec2& x) { return 0.5 * (a * x.x() * x.x() + 2 * b * x.x() * x.y() + c * x.y() * x.y()); };
    ma::MAProblem p = grid_problem(5, f);
    std::vector<double> truth;
    for (const Vec2& x : p.interior_nodes) truth.push_back(f(x) + 0.002 * u(rng));
    p.masses = ma::interior_masses(p, truth);
    const auto s = ma::solve_ma(p);
    for (std::size_t i = 0; i < truth.size(); ++i) worst = std::max(worst, std::abs(s.interior_values[i] - truth[i]));
    for (std::size_t k = 1; k < s.sweep_deficit.size(); ++k)
      monotone = monotone && s.sweep_deficit[k] <= s.sweep_deficit[k - 1] + 1e-15;
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t violations = 0;
  for (int t = 0; t < 20; ++t) {
    const double a = 1 + 0.3 * u(rng), b = 0.3 * u(rng);
    auto g = [&](const Vec2& x) { return 0.5 * (a * x.x() * x.x() + 2 * b * x.x() * x.y() + x.y() * x.y()); };
    ma::MAProblem upper = grid_problem(5, g);
    for (std::size_t i = 0; i < upper.interior_nodes.size(); ++i) upper.masses.push_back(0.01 + 0.03 * unit(rng));
    ma::MAProblem lower = upper;
    for (double& m : lower.masses) m *= 1.0 + 0.5 * unit(rng);
    const double drop = 0.2 * unit(rng);
    for (double& v : lower.boundary_values) v -= drop;
    const auto cmp = ma::maximum_principle_check(ma::solve_ma(lower).u, ma::solve_ma(upper).u, lower, upper);
    violations += cmp.violations.size();
  }
  return {worst <= 1e-7 && monotone && violations == 0,
          "10 instances max error " + fmt(worst) + ", sweeps monotone: " + (monotone ? "yes" : "no") +
              ", maximum-principle violations over 20 pairs " + std::to_string(violations)};
}

Outcome homotopy() {
  auto q = [](const Vec2& x) { return 0.5 * x.squaredNorm(); };
  std::vector<double> skew(16, 1.0);
  for (int i = 0; i < 16; i += 5) skew[i] = 10.0;
  double sum = 0.0;
  for (double s : skew) sum += s;
  ma::HomotopySchedule h;
  h.grid = {0, 0.25, 0.5, 0.75, 1};
  h.family = [&](double t) {
    ma::MAProblem p = grid_problem(4, q);
    for (double s : skew) p.masses.push_back((1 - t) / 25.0 + t * s / sum);
    return p;
  };
  ma::MAOptions options;
  const auto res = ma::homotopy_solve(h, options);
  const auto& last = res.steps.back();
  const bool reached = last.t == 1.0 && last.solution.residual <= options.tol;

  ma::HomotopySchedule inf;
  inf.grid = h.grid;
  inf.min_step = 0.01;
  inf.family = [&](double t) {
    ma::MAProblem p = grid_problem(4, q);
    p.theta = ma::Weight::parse("(1+p1^2+p2^2)^(-1.5)");
    p.masses.assign(16, 2 * kPi * (0.2 + t) / 0.9 / 16);
    return p;
  };
  ma::MAOptions loose;
  loose.tol = 1e-6;
  loose.max_iter = 300;
  double stop = -1.0;
  try {
    ma::homotopy_solve(inf, loose);
  } catch (const MinStepReached& e) {
    stop = e.last_parameter();
  }
  return {reached && stop >= 0.0 && std::abs(stop - 0.7) <= 0.05,
          "skewed family t = " + fmt(last.t) + " residual " + fmt(last.solution.residual) +
              ", infeasible family stopped at " + fmt(stop) + " (threshold 0.7)"};
}

Outcome minkowski_round_trip() {
  Rng rng(1008);
  std::uniform_int_distribution<std::size_t> size(6, 34);
  std::uniform_real_distribution<double> u(-1e-3, 1e-3);
  double worst = 0.0, worst_identity = 0.0, worst_gradient = 0.0;
  std::size_t max_faces = 0;
  for (int t = 0; t < 20; ++t) {
    ConvexPolytope p;
    do p = cli::random_hull(rng, size(rng)).centered();
    while (p.face_count() > 64);
    max_faces = std::max(max_faces, p.face_count());
    const auto s = minkowski::solve_minkowski({p.normals(), p.areas()});
    double v = 0.0;
    for (std::size_t i = 0; i < p.face_count(); ++i) {
      worst = std::max(worst, std::abs(s.support_numbers[i] - p.support_numbers()[i]) / std::abs(p.support_numbers()[i]));
      v += s.areas[i] * s.support_numbers[i] / 3.0;
    }
    worst_identity = std::max(worst_identity, std::abs(v - s.polytope.volume()) / s.polytope.volume());

    // Central differences of the volume at a generic perturbation of the solution.
    std::vector<double> h = s.support_numbers;
    for (double& x : h) x += u(rng);
    const auto areas = minkowski::area_map(p.normals(), h);
    const double scale = *std::max_element(areas.begin(), areas.end());
    for (std::size_t i = 0; i < h.size(); ++i) {
      auto up = h, down = h;
      up[i] += 1e-6;
      down[i] -= 1e-6;
      const double fd =
          (polytope_from_support(p.normals(), up).volume() - polytope_from_support(p.normals(), down).volume()) / 2e-6;
      worst_gradient = std::max(worst_gradient, std::abs(fd - areas[i]) / scale);
    }
  }
  return {worst <= 1e-6 && worst_identity <= 1e-9 && worst_gradient <= 1e-6,
          "20 polytopes (up to " + std::to_string(max_faces) + " faces): support error " + fmt(worst) +
              ", volume identity " + fmt(worst_identity) + ", gradient check " + fmt(worst_gradient)};
}

Outcome rigidity_dimensions() {
  const auto octa = rigidity::bending_space(rigidity::TriangulatedSurface::from_polytope(cli::regular_octahedron()));
  const auto ico = rigidity::bending_space(rigidity::TriangulatedSurface::from_polytope(cli::regular_icosahedron()));
  const auto cube_surface = rigidity::TriangulatedSurface::from_polytope_with_face_centers(cli::unit_cube());
  const auto cube = rigidity::bending_space(cube_surface);
  Rng rng(1009);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Vec3 a(u(rng), u(rng), u(rng)), b(u(rng), u(rng), u(rng));
    worst = std::max(worst, rigidity::constraint_residual(cube_surface, rigidity::trivial_field(cube_surface, a, b)));
  }
  return {octa.kernel_dim == 6 && ico.kernel_dim == 6 && cube.nontrivial_dim == 6 && worst <= 1e-12,
          "kernel octahedron " + std::to_string(octa.kernel_dim) + ", icosahedron " + std::to_string(ico.kernel_dim) +
              ", cube with face centers nontrivial " + std::to_string(cube.nontrivial_dim) +
              ", max trivial residual " + fmt(worst)};
}

Outcome bending() {
  const double w = std::sqrt(0.96);
  auto z = [](double x, double y) { return 0.5 * (x * x + y * y) + 0.2 * x * y; };
  auto exact = [&](double x, double y) { return std::exp(x + 0.2 * y) * std::cos(w * y); };
  std::vector<double> errors;
  for (std::size_t n : {17, 33, 65}) {
    auto g = rigidity::GridPatch::sample(n, n, 1.0 / double(n - 1), 0.0, 0.0, z, exact);
    const Eigen::MatrixXd truth = g.zeta;
    g.zeta.block(1, 1, n - 2, n - 2).setZero();
    errors.push_back((rigidity::solve_defo(g).zeta - truth).cwiseAbs().maxCoeff());
  }
  bool orders = true;
  std::string order_text;
  for (std::size_t k = 1; k < errors.size(); ++k) {
    const double order = std::log2(errors[k - 1] / errors[k]);
    orders = orders && std::abs(order - 2.0) <= 0.3;
    order_text += (k > 1 ? ", " : "") + fmt(order);
  }

  Rng rng(1010);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::size_t violations = 0;
  double max_det = -1e300;
  for (int t = 0; t < 50; ++t) {
    const double a = 1 + 0.5 * u(rng), c = 1 + 0.5 * u(rng), b = 0.4 * u(rng), e = 0.2 * (u(rng) + 1);
    auto zf = [&](double x, double y) { return 0.5 * (a * x * x + 2 * b * x * y + c * y * y) + e * std::exp(x + y); };
    const double k1 = u(rng), k2 = u(rng), k3 = u(rng);
    auto bd = [&](double x, double y) { return k1 * x * x + k2 * x * y + k3 * std::sin(3 * y) + x; };
    const auto s = rigidity::solve_defo(rigidity::GridPatch::sample(21, 21, 0.05, -0.5, -0.5, zf, bd));
    const auto r = rigidity::main_lemma_check(s);
    violations += r.violations.size();
    max_det = std::max(max_det, r.max_det);
  }
  return {orders && violations == 0, "orders " + order_text + ", 50 convex instances: violations " +
                                         std::to_string(violations) + ", max det " + fmt(max_det)};
}

Outcome liouville() {
  ma::LiouvilleOptions o;
  o.bump = 1.0;
  const auto r = ma::liouville_probe({1.0, 4.0}, o);
  const double d1 = r.rows.front().deviation, d4 = r.rows.back().deviation;
  return {d4 < d1, "deviation R=1 " + fmt(d1) + ", R=4 " + fmt(d4)};
}

struct Criterion {
  const char* name;
  double budget_seconds;
  Outcome (*run)();
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"1 discrete Theorema Egregium", 10, egregium},
      {"2 net validation", 1, net_validation},
      {"3 geodesics", 30, geodesics},
      {"4 comparison-angle monotonicity", 60, angle_monotonicity},
      {"5 MA measures", 120, ma_measures},
      {"6 MA inverse round trip", 120, ma_round_trip},
      {"7 homotopy driver", 120, homotopy},
      {"8 Minkowski round trip", 120, minkowski_round_trip},
      {"9 rigidity", 30, rigidity_dimensions},
      {"10 bending equation", 60, bending},
      {"11 Liouville probe", 60, liouville},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.budget_seconds;
    const bool pass = o.passed && in_time;
    failures += !pass;
    std::printf("%s  %-34s %7.2fs (< %gs)  %s\n", pass ? "PASS" : "FAIL", c.name, seconds, c.budget_seconds,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures;
}
