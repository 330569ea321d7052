#include "support/oracles.hpp"

#include "convexkit/core/errors.hpp"
#include "convexkit/ma/continuation.hpp"
#include "convexkit/ma/measure.hpp"
#include "convexkit/ma/solver.hpp"
#include "convexkit/ma/weight.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace convexkit;
using namespace convexkit::ma;

namespace {

const std::vector<Vec2> kUnitSquare{{0, 0}, {1, 0}, {1, 1}, {0, 1}};

MAProblem grid_problem(int n, const std::function<double(const Vec2&)>& g) {
  MAProblem p;
  p.domain = kUnitSquare;
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

double quadratic(const Vec2& x) { return 0.5 * x.squaredNorm(); }

// Random strictly convex PL function on jittered grid nodes.
PLConvexFunction random_pl(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a = 1 + 0.4 * u(rng), b = 0.3 * u(rng), c = 1 + 0.4 * u(rng), k = 0.3 * (u(rng) + 1);
  const Vec2 kink(0.5 + 0.2 * u(rng), 0.5 + 0.2 * u(rng));
  PLConvexFunction f;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      const bool boundary = i == 0 || j == 0 || i == n || j == n;
      Vec2 x(i / double(n), j / double(n));
      if (!boundary) x += Vec2(u(rng), u(rng)) * (0.2 / n);
      f.nodes.push_back(x);
      f.values.push_back(0.5 * (a * x.x() * x.x() + 2 * b * x.x() * x.y() + c * x.y() * x.y()) +
                         k * (x - kink).norm());
    }
  return f;
}

}  // namespace

TEST_CASE("infinity-norm cone has an atom of mass 2") {
  const PLConvexFunction cone{{{0, 0}, {-1, -1}, {1, -1}, {1, 1}, {-1, 1}}, {0, 1, 1, 1, 1}};
  const auto cell = ma_measure(cone, 0);
  CHECK(std::abs(cell.area - 2.0) <= 1e-12);
  CHECK(cell.polygon.size() == 4);
  CHECK(conditional_curvature(cone, 0, Weight::constant(3.0)) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("boundary cells are unbounded unless clipped") {
  const PLConvexFunction cone{{{0, 0}, {-1, -1}, {1, -1}, {1, 1}, {-1, 1}}, {0, 1, 1, 1, 1}};
  CHECK_THROWS_AS(ma_measure(cone, 1), UnboundedCell);
  const std::vector<Vec2> window{{-5, -5}, {5, -5}, {5, 5}, {-5, 5}};
  CHECK(ma_measure(cone, 1, window).clipped);
}

TEST_CASE("a node above the envelope has no cell") {
  const PLConvexFunction f{{{0, 0}, {-1, -1}, {1, -1}, {1, 1}, {-1, 1}}, {2, 1, 1, 1, 1}};
  CHECK_THROWS_AS(ma_measure(f, 0), NotEnvelopeVertex);
  CHECK(subgradient_cell(f, 0).area == 0.0);
  CHECK(nodes_above_envelope(f) == std::vector<std::size_t>{0});
}

TEST_CASE("cells of a sampled quadratic tile its gradient image") {
  PLConvexFunction q;
  const int n = 8;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      q.nodes.emplace_back(i / double(n), j / double(n));
      q.values.push_back(quadratic(q.nodes.back()));
    }
  double total = 0.0;
  for (std::size_t k = 0; k < q.nodes.size(); ++k) total += subgradient_cell(q, k, kUnitSquare).area;
  CHECK(std::abs(total - 1.0) <= 1e-9);
}

TEST_CASE("cell areas match Monte-Carlo sampling of the supporting slopes") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 3; ++t) {
    const PLConvexFunction f = random_pl(rng, 4);
    for (std::size_t k : {6, 12, 18}) {
      const auto cell = ma_measure(f, k);
      Vec2 lo = cell.polygon.front(), hi = lo;
      for (const Vec2& p : cell.polygon) lo = lo.cwiseMin(p), hi = hi.cwiseMax(p);
      const double half = 0.75 * (hi - lo).maxCoeff();
      const double mc = oracle::subgradient_area(f.nodes, f.values, k, (lo + hi) / 2, half, 200000, 100 * t + k);
      CHECK(std::abs(mc - cell.area) <= 0.02 * cell.area);
    }
  }
}

TEST_CASE("quadrature is exact for low-degree polynomials") {
  const double sq = integrate_polygon(kUnitSquare, [](const Vec2& x) { return x.x() * x.x() * std::pow(x.y(), 3); });
  CHECK(sq == doctest::Approx(1.0 / 12.0).epsilon(1e-13));
  const std::vector<Vec2> tri{{0, 0}, {2, 0}, {0, 1}};
  CHECK(integrate_polygon(tri, [](const Vec2& x) { return x.x() * x.y(); }) == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
  CHECK_THROWS_AS(integrate_polygon(tri, [](const Vec2&) { return std::nan(""); }), QuadratureFailure);
}

TEST_CASE("weight expressions") {
  const Weight w = Weight::parse("(1+p1^2+p2^2)^(-1.5)");
  CHECK(w(Vec2(1, 1), 0.0, Vec2::Zero()) == doctest::Approx(std::pow(3.0, -1.5)));
  CHECK(w.uses_p());
  CHECK_FALSE(w.uses_z());
  CHECK(feasibility_bound(w) == doctest::Approx(2 * std::numbers::pi).epsilon(1e-6));
  CHECK(std::isinf(feasibility_bound(Weight())));
  CHECK(std::isinf(feasibility_bound(Weight::parse("exp(z)"))));
  CHECK(Weight::parse("max(x, y) + sqrt(pi)")(Vec2::Zero(), 0.0, Vec2(0.2, 0.7)) ==
        doctest::Approx(0.7 + std::sqrt(std::numbers::pi)));
  CHECK_THROWS_AS(Weight::parse("1 +"), ParseError);
  CHECK_THROWS_AS(Weight::parse("q1"), ParseError);
}

TEST_CASE("solve_ma recovers a forward instance") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MAProblem p = grid_problem(5, quadratic);
  std::vector<double> truth;
  for (const Vec2& x : p.interior_nodes) truth.push_back(quadratic(x) + 0.002 * u(rng));
  p.masses = interior_masses(p, truth);
  const auto s = solve_ma(p);
  for (std::size_t i = 0; i < truth.size(); ++i) CHECK(std::abs(s.interior_values[i] - truth[i]) <= 1e-7);
  CHECK(s.residual <= 1e-10);
  for (std::size_t k = 1; k < s.sweep_deficit.size(); ++k) CHECK(s.sweep_deficit[k] <= s.sweep_deficit[k - 1] + 1e-15);
}

TEST_CASE("sweeps alone converge for a z-dependent weight") {
  MAProblem p = grid_problem(3, quadratic);
  p.theta = Weight::parse("exp(-0.1*z)");
  p.masses.assign(p.interior_nodes.size(), 0.05);
  MAOptions o;
  o.tol = 1e-8;
  const auto s = solve_ma(p, o);
  CHECK(s.newton_steps == 0);
  CHECK(mass_residual(s.masses, p.masses) <= 1e-8);
}

TEST_CASE("masses beyond the attainable total are infeasible") {
  MAProblem p = grid_problem(2, quadratic);
  p.theta = Weight::parse("(1+p1^2+p2^2)^(-1.5)");
  p.masses.assign(4, 2.0);
  CHECK_THROWS_AS(solve_ma(p), Infeasible);
}

TEST_CASE("scaled masses stay solvable for the unit weight") {
  MAProblem p = grid_problem(3, quadratic);
  p.masses.assign(9, 4.0 / 16.0);
  CHECK_NOTHROW(solve_ma(p));
}

TEST_CASE("larger masses and smaller boundary data give a lower solution") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 4; ++t) {
    MAProblem hi = grid_problem(3, quadratic);
    for (std::size_t i = 0; i < 9; ++i) hi.masses.push_back(0.04 + 0.04 * u(rng));
    MAProblem lo = hi;
    for (double& m : lo.masses) m *= 1.0 + u(rng);
    const double drop = 0.1 * u(rng);
    for (double& g : lo.boundary_values) g -= drop;
    const auto s_hi = solve_ma(hi), s_lo = solve_ma(lo);
    const auto cmp = maximum_principle_check(s_lo.u, s_hi.u, lo, hi);
    CHECK(cmp.passed());
    CHECK(cmp.max_difference <= 0.0);
    CHECK_THROWS_AS(maximum_principle_check(s_hi.u, s_lo.u, hi, lo), IncomparableProblems);
  }
}

TEST_CASE("masses from a density") {
  MAProblem p = grid_problem(3, quadratic);
  p.density = Weight::parse("1");
  const auto m = masses_from_density(p);
  double total = 0.0;
  for (double x : m) total += x;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("homotopy reaches a skewed mass distribution") {
  std::vector<double> skew(9, 1.0);
  skew[0] = skew[4] = 10.0;
  HomotopySchedule h;
  h.grid = {0.0, 0.5, 1.0};
  h.family = [&](double t) {
    MAProblem p = grid_problem(3, quadratic);
    for (double s : skew) p.masses.push_back((1 - t) / 16.0 + t * s / 26.0);
    return p;
  };
  const auto r = homotopy_solve(h);
  CHECK(r.steps.back().t == 1.0);
  CHECK(r.grid_solutions().size() == 3);
  CHECK(r.steps.back().solution.residual <= 1e-10);
}

TEST_CASE("homotopy stops near the infeasibility threshold") {
  HomotopySchedule h;
  h.grid = {0.0, 0.5, 1.0};
  h.min_step = 0.01;
  h.family = [](double t) {
    MAProblem p = grid_problem(2, quadratic);
    p.theta = Weight::parse("(1+p1^2+p2^2)^(-1.5)");
    p.masses.assign(4, 2 * std::numbers::pi * (0.2 + t) / 0.9 / 4);
    return p;
  };
  MAOptions o;
  o.tol = 1e-6;
  o.max_iter = 300;
  try {
    homotopy_solve(h, o);
    FAIL("expected MinStepReached");
  } catch (const MinStepReached& e) {
    CHECK(std::abs(e.last_parameter() - 0.7) <= 0.05);
  }
}

TEST_CASE("Liouville probe deviation shrinks with the domain") {
  LiouvilleOptions o;
  o.bump = 1.0;
  const auto r = liouville_probe({1.0, 4.0}, o);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[1].deviation < r.rows[0].deviation);
  LiouvilleOptions flat;
  const auto f = liouville_probe({1.0, 2.0}, flat);
  for (const auto& row : f.rows) CHECK(row.deviation <= 1e-8);
}
