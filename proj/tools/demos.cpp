#include "cli.hpp"
#include "generators.hpp"

#include "convexkit/core/errors.hpp"
#include "convexkit/ma/continuation.hpp"
#include "convexkit/metric/angles.hpp"
#include "convexkit/minkowski/minkowski.hpp"
#include "convexkit/rigidity/defo.hpp"
#include "convexkit/rigidity/surface.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <functional>
#include <map>
#include <numbers>

namespace convexkit::cli {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

metric::SurfacePoint random_point(Rng& rng, const metric::MetricNet& net) {
  std::uniform_int_distribution<std::size_t> pick(0, net.polygon_count() - 1);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  const std::size_t p = pick(rng);
  Vec2 x = Vec2::Zero();
  double total = 0.0;
  for (std::size_t i = 0; i < net.corner_count(p); ++i) {
    const double w = u(rng);
    x += w * net.corner(p, i);
    total += w;
  }
  return {p, x / total};
}

io::Report egregium(Rng& rng) {
  io::Report r;
  double worst = 0.0, worst_total = 0.0;
  std::uniform_int_distribution<std::size_t> size(5, 50);
  for (int trial = 0; trial < 100; ++trial) {
    const ConvexPolytope p = random_hull(rng, size(rng));
    const auto cut = metric::net_from_polytope(p);
    const auto k = metric::vertex_curvatures(cut.net);
    for (std::size_t c = 0; c < k.curvature.size(); ++c)
      worst = std::max(worst, std::abs(k.curvature[c] - normal_cone_area(p, cut.class_vertex[c])));
    worst_total = std::max(worst_total, std::abs(k.total - 4.0 * kPi));
  }
  r.metrics = {{"hulls", 100}, {"max_curvature_error", worst}, {"max_total_error", worst_total}, {"tolerance", 1e-9}};
  r.passed = worst <= 1e-9 && worst_total <= 1e-9;
  return r;
}

metric::MetricNet doubled_triangle() {
  const std::vector<Vec2> t{{0.0, 0.0}, {1.0, 0.0}, {0.3, 0.8}};
  const std::vector<Vec2> m{{0.0, 0.0}, {0.3, -0.8}, {1.0, 0.0}};
  return metric::MetricNet({t, m}, {{{0, 0}, {1, 2}}, {{0, 1}, {1, 1}}, {{0, 2}, {1, 0}}});
}

// Moves the end corner of edge a of identification k by 1% along the edge.
metric::MetricNet perturbed(const metric::MetricNet& net, std::size_t k) {
  auto polys = net.polygons();
  const metric::EdgeRef e = net.identifications()[k].a;
  auto& poly = polys[e.polygon];
  const std::size_t end = (e.edge + 1) % poly.size();
  poly[end] += 0.01 * (poly[end] - poly[e.edge]);
  return metric::MetricNet(polys, net.identifications());
}

io::Report net_validation(Rng&) {
  io::Report r;
  const std::map<std::string, metric::MetricNet> nets{
      {"cube", metric::net_from_polytope(unit_cube()).net},
      {"tetrahedron", metric::net_from_polytope(regular_tetrahedron()).net},
      {"doubled-triangle", doubled_triangle()}};
  io::Table t{{"net", "valid", "perturbations", "caught"}, {}};
  for (const auto& [name, net] : nets) {
    const bool valid = metric::validate_net(net).passed();
    std::size_t caught = 0;
    for (std::size_t k = 0; k < net.identifications().size(); ++k) {
      const auto v = metric::validate_net(perturbed(net, k));
      const auto& bad = v.mismatched_identifications;
      if (!v.equal_edges.passed && std::find(bad.begin(), bad.end(), k) != bad.end()) ++caught;
    }
    t.rows.push_back({name, valid, net.identifications().size(), caught});
    if (!valid || caught != net.identifications().size()) r.passed = false;
  }
  r.tables["nets"] = t;
  return r;
}

io::Report cube_geodesic(Rng&) {
  io::Report r;
  const auto cut = metric::net_from_polytope(unit_cube());
  std::size_t p = 0, q = 0, i = 0, j = 0;
  // Corners of vertices 0 and 7, which are diagonally opposite.
  for (std::size_t a = 0; a < cut.corner_vertex.size(); ++a)
    for (std::size_t b = 0; b < cut.corner_vertex[a].size(); ++b) {
      if (cut.corner_vertex[a][b] == 0) p = a, i = b;
      if (cut.corner_vertex[a][b] == 7) q = a, j = b;
    }
  const double d = metric::intrinsic_distance(cut.net, {p, cut.net.corner(p, i)}, {q, cut.net.corner(q, j)});
  r.metrics = {{"distance", d}, {"expected", std::sqrt(5.0)}, {"error", std::abs(d - std::sqrt(5.0))}};
  r.passed = std::abs(d - std::sqrt(5.0)) <= 1e-9;
  return r;
}

io::Report angle_monotonicity(Rng& rng) {
  io::Report r;
  std::size_t violations = 0;
  io::Table t{{"trial", "polygons", "limit_angle", "violations"}, {}};
  std::uniform_int_distribution<std::size_t> size(6, 14);
  for (int trial = 0; trial < 20; ++trial) {
    const auto cut = metric::net_from_polytope(random_hull(rng, size(rng)));
    const auto o = random_point(rng, cut.net), a = random_point(rng, cut.net), b = random_point(rng, cut.net);
    const auto scan = metric::angle_monotonicity_scan(cut.net, o, a, b, 8);
    violations += scan.violations.size();
    t.rows.push_back({trial, cut.net.polygon_count(), scan.limit_angle, scan.violations.size()});
  }
  r.tables["scans"] = t;
  r.metrics = {{"configurations", 20}, {"samples", 8}, {"violations", violations}};
  r.passed = violations == 0;
  return r;
}

io::Report ma_measures(Rng&) {
  io::Report r;
  const ma::PLConvexFunction cone{{{0, 0}, {-1, -1}, {1, -1}, {1, 1}, {-1, 1}}, {0, 1, 1, 1, 1}};
  const double atom = ma::ma_measure(cone, 0).area;
  // Quadratic |x|^2 / 2 sampled on a grid: interior cells tile the gradient image.
  ma::PLConvexFunction quad;
  const int n = 6;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      const Vec2 x(i / double(n), j / double(n));
      quad.nodes.push_back(x);
      quad.values.push_back(0.5 * x.squaredNorm());
    }
  const std::vector<Vec2> window{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  double total = 0.0;
  for (std::size_t k = 0; k < quad.nodes.size(); ++k) total += ma::subgradient_cell(quad, k, window).area;
  r.metrics = {{"cone_atom", atom}, {"cone_atom_error", std::abs(atom - 2.0)},
               {"quadratic_total", total}, {"quadratic_total_error", std::abs(total - 1.0)}};
  r.passed = std::abs(atom - 2.0) <= 1e-12 && std::abs(total - 1.0) <= 1e-9;
  return r;
}

ma::MAProblem unit_square_grid(int n, const std::function<double(const Vec2&)>& g) {
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

io::Report ma_roundtrip(Rng& rng) {
  io::Report r;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  bool monotone = true;
  for (int trial = 0; trial < 10; ++trial) {
    const double a = 1 + 0.3 * u(rng), b = 0.3 * u(rng), c = 1 + 0.3 * u(rng);
    auto f = [&](const Vec2& x) { return 0.5 * (a * x.x() * x.x() + 2 * b * x.x() * x.y() + c * x.y() * x.y()); };
    ma::MAProblem p = unit_square_grid(5, f);
    std::vector<double> truth;
    for (const Vec2& x : p.interior_nodes) truth.push_back(f(x) + 0.002 * u(rng));
    p.masses = ma::interior_masses(p, truth);
    const auto s = ma::solve_ma(p);
    for (std::size_t i = 0; i < truth.size(); ++i) worst = std::max(worst, std::abs(s.interior_values[i] - truth[i]));
    for (std::size_t k = 1; k < s.sweep_deficit.size(); ++k)
      if (s.sweep_deficit[k] > s.sweep_deficit[k - 1] + 1e-15) monotone = false;
  }

  // Pairs with larger masses and lower boundary data must give lower solutions.
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t violations = 0;
  for (int pair = 0; pair < 20; ++pair) {
    const double a = 1 + 0.3 * u(rng), b = 0.3 * u(rng);
    auto g = [&](const Vec2& x) { return 0.5 * (a * x.x() * x.x() + 2 * b * x.x() * x.y() + x.y() * x.y()); };
    ma::MAProblem upper = unit_square_grid(5, g);
    for (std::size_t i = 0; i < upper.interior_nodes.size(); ++i) upper.masses.push_back(0.01 + 0.03 * unit(rng));
    ma::MAProblem lower = upper;
    for (double& m : lower.masses) m *= 1.0 + 0.5 * unit(rng);
    const double drop = 0.2 * unit(rng);
    for (double& v : lower.boundary_values) v -= drop;
    violations += ma::maximum_principle_check(ma::solve_ma(lower).u, ma::solve_ma(upper).u, lower, upper).violations.size();
  }
  r.metrics = {{"instances", 10},          {"max_error", worst},   {"monotone_sweeps", monotone},
               {"tolerance", 1e-7},        {"comparison_pairs", 20}, {"comparison_violations", violations}};
  r.passed = worst <= 1e-7 && monotone && violations == 0;
  return r;
}

io::Report homotopy(Rng&) {
  io::Report r;
  auto q = [](const Vec2& x) { return 0.5 * x.squaredNorm(); };
  std::vector<double> skew(16);
  for (int i = 0; i < 16; ++i) skew[i] = i % 4 == 0 ? 10.0 : 1.0;
  const double sum = std::accumulate(skew.begin(), skew.end(), 0.0);
  ma::HomotopySchedule h;
  h.grid = {0, 0.25, 0.5, 0.75, 1};
  h.family = [&](double t) {
    ma::MAProblem p = unit_square_grid(4, q);
    for (double s : skew) p.masses.push_back((1 - t) / 25.0 + t * s / sum);
    return p;
  };
  const auto res = ma::homotopy_solve(h);
  r.metrics["skewed_final_t"] = res.steps.back().t;
  r.metrics["skewed_residual"] = res.steps.back().solution.residual;

  // Total mass 2 pi (0.2 + t) / 0.9 exceeds the 2 pi bound beyond t = 0.7.
  ma::HomotopySchedule inf;
  inf.grid = h.grid;
  inf.min_step = 0.01;
  inf.family = [&](double t) {
    ma::MAProblem p = unit_square_grid(4, q);
    p.theta = ma::Weight::parse("(1+p1^2+p2^2)^(-1.5)");
    p.masses.assign(16, 2 * kPi * (0.2 + t) / 0.9 / 16);
    return p;
  };
  ma::MAOptions o;
  o.tol = 1e-6;
  o.max_iter = 300;
  double stop = -1.0;
  try {
    ma::homotopy_solve(inf, o);
  } catch (const MinStepReached& e) {
    stop = e.last_parameter();
  }
  r.metrics["infeasible_stop"] = stop;
  r.metrics["infeasible_threshold"] = 0.7;
  r.passed = res.steps.back().t == 1.0 && res.steps.back().solution.residual <= ma::MAOptions{}.tol && stop >= 0.0 &&
             std::abs(stop - 0.7) <= 0.05;
  return r;
}

io::Report minkowski_demo(Rng& rng) {
  io::Report r;
  io::Table t{{"trial", "faces", "iterations", "support_error", "volume_identity_error"}, {}};
  double worst = 0.0, worst_identity = 0.0;
  std::uniform_int_distribution<std::size_t> size(6, 30);
  for (int trial = 0; trial < 20; ++trial) {
    ConvexPolytope p;
    do p = random_hull(rng, size(rng)).centered();
    while (p.face_count() > 64);
    const auto s = minkowski::solve_minkowski({p.normals(), p.areas()});
    double err = 0.0, v = 0.0;
    for (std::size_t i = 0; i < p.face_count(); ++i) {
      err = std::max(err, std::abs(s.support_numbers[i] - p.support_numbers()[i]) / std::abs(p.support_numbers()[i]));
      v += s.areas[i] * s.support_numbers[i] / 3.0;
    }
    const double identity = std::abs(v - s.polytope.volume()) / s.polytope.volume();
    worst = std::max(worst, err);
    worst_identity = std::max(worst_identity, identity);
    t.rows.push_back({trial, p.face_count(), s.iterations, err, identity});
  }
  r.tables["roundtrip"] = t;
  r.metrics = {{"max_support_error", worst}, {"max_volume_identity_error", worst_identity}};
  r.passed = worst <= 1e-6 && worst_identity <= 1e-9;
  return r;
}

io::Report rigidity_demo(Rng&) {
  io::Report r;
  const std::vector<std::pair<std::string, rigidity::TriangulatedSurface>> cases{
      {"octahedron", rigidity::TriangulatedSurface::from_polytope(regular_octahedron())},
      {"icosahedron", rigidity::TriangulatedSurface::from_polytope(regular_icosahedron())},
      {"cube-with-face-centers", rigidity::TriangulatedSurface::from_polytope_with_face_centers(unit_cube())}};
  const std::size_t expected[] = {0, 0, 6};
  io::Table t{{"surface", "vertices", "edges", "kernel_dim", "nontrivial_dim", "flat_vertices"}, {}};
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const auto b = rigidity::bending_space(cases[k].second);
    t.rows.push_back({cases[k].first, cases[k].second.vertices().size(), cases[k].second.edges().size(), b.kernel_dim,
                      b.nontrivial_dim, b.flat_vertices.size()});
    if (b.nontrivial_dim != expected[k] || b.kernel_dim != 6 + expected[k]) r.passed = false;
  }
  r.tables["surfaces"] = t;
  return r;
}

io::Report bending(Rng& rng) {
  io::Report r;
  const double w = std::sqrt(0.96);
  auto z = [](double x, double y) { return 0.5 * (x * x + y * y) + 0.2 * x * y; };
  auto exact = [&](double x, double y) { return std::exp(x + 0.2 * y) * std::cos(w * y); };
  io::Table t{{"nodes", "h", "max_error", "order"}, {}};
  double prev = 0.0, order = 0.0;
  bool orders_ok = true;
  for (std::size_t n : {17, 33, 65}) {
    const double h = 1.0 / double(n - 1);
    rigidity::GridPatch g = rigidity::GridPatch::sample(n, n, h, 0.0, 0.0, z, exact);
    const Eigen::MatrixXd truth = g.zeta;
    g.zeta.block(1, 1, n - 2, n - 2).setZero();
    const double err = (rigidity::solve_defo(g).zeta - truth).cwiseAbs().maxCoeff();
    order = prev > 0.0 ? std::log2(prev / err) : 0.0;
    if (prev > 0.0 && std::abs(order - 2.0) > 0.3) orders_ok = false;
    t.rows.push_back({n, h, err, prev > 0.0 ? json(order) : json(nullptr)});
    prev = err;
  }
  r.tables["refinement"] = t;

  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::size_t violations = 0;
  double max_det = -1e300;
  for (int trial = 0; trial < 50; ++trial) {
    const double a = 1 + 0.5 * u(rng), c = 1 + 0.5 * u(rng), b = 0.4 * u(rng), e = 0.2 * (u(rng) + 1);
    auto zf = [&](double x, double y) { return 0.5 * (a * x * x + 2 * b * x * y + c * y * y) + e * std::exp(x + y); };
    const double k1 = u(rng), k2 = u(rng), k3 = u(rng);
    auto bd = [&](double x, double y) { return k1 * x * x + k2 * x * y + k3 * std::sin(3 * y) + x; };
    const auto s = rigidity::solve_defo(rigidity::GridPatch::sample(21, 21, 0.05, -0.5, -0.5, zf, bd));
    const auto lemma = rigidity::main_lemma_check(s);
    violations += lemma.violations.size();
    max_det = std::max(max_det, lemma.max_det);
  }
  r.metrics = {{"last_order", order}, {"lemma_instances", 50}, {"lemma_violations", violations}, {"lemma_max_det", max_det}};
  r.passed = orders_ok && violations == 0;
  return r;
}

io::Report liouville(Rng&) {
  io::Report r;
  ma::LiouvilleOptions o;
  o.bump = 1.0;
  const auto rep = ma::liouville_probe({1.0, 2.0, 3.0, 4.0}, o);
  io::Table t{{"radius", "interior_nodes", "deviation", "residual"}, {}};
  for (const auto& row : rep.rows) t.rows.push_back({row.radius, row.interior_nodes, row.deviation, row.residual});
  r.tables["deviation"] = t;
  r.metrics = {{"trend", rep.trend}, {"non_increasing", rep.non_increasing}};
  r.passed = rep.rows.back().deviation < rep.rows.front().deviation;
  return r;
}

using Demo = io::Report (*)(Rng&);

const std::vector<std::pair<std::string, Demo>>& registry() {
  static const std::vector<std::pair<std::string, Demo>> demos{
      {"egregium", egregium},           {"net-validation", net_validation}, {"cube-geodesic", cube_geodesic},
      {"angle-monotonicity", angle_monotonicity}, {"ma-measures", ma_measures}, {"ma-roundtrip", ma_roundtrip},
      {"homotopy", homotopy},           {"minkowski", minkowski_demo},      {"rigidity", rigidity_demo},
      {"bending", bending},             {"liouville", liouville}};
  return demos;
}

}  // namespace

std::vector<std::string> demo_names() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : registry()) out.push_back(name);
  return out;
}

io::Report run_demo(const RunConfig& c) {
  for (const auto& [name, fn] : registry()) {
    if (name != c.demo) continue;
    Rng rng(c.seed);
    io::Report r = fn(rng);
    r.command = "demo " + name;
    r.config = config_json(c);
    return r;
  }
  throw UnknownDemo("unknown demo '" + c.demo + "'");
}

}  // namespace convexkit::cli
