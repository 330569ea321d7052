#include "convexkit/ma/solver.hpp"

#include "convexkit/core/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace convexkit::ma {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Domain edges and the boundary nodes on each, sorted along the edge.
std::vector<std::vector<std::pair<double, std::size_t>>> nodes_per_edge(const MAProblem& problem, double eps) {
  const auto& g = problem.domain;
  std::vector<std::vector<std::pair<double, std::size_t>>> out(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec2& a = g[k];
    const Vec2& b = g[(k + 1) % g.size()];
    for (std::size_t i = 0; i < problem.boundary_nodes.size(); ++i) {
      const Vec2& x = problem.boundary_nodes[i];
      if (segment_distance(x, a, b) <= eps) out[k].emplace_back((x - a).dot(b - a) / (b - a).squaredNorm(), i);
    }
    std::sort(out[k].begin(), out[k].end());
  }
  return out;
}

QuadratureOptions quadrature_for(const MAOptions& options, double residual) {
  QuadratureOptions q = options.quadrature;
  q.relative_tolerance = std::min(q.relative_tolerance, 0.1 * residual);
  return q;
}

}  // namespace

void validate_problem(const MAProblem& problem, Tolerance tol) {
  const auto& g = problem.domain;
  if (g.size() < 3) throw InvalidArgument("domain needs at least 3 corners");
  for (const Vec2& c : g)
    if (!all_finite(c)) throw InvalidArgument("domain has a non-finite corner");
  if (signed_area(g) <= 0.0) throw InvalidArgument("domain must be counterclockwise with positive area");
  const double scale = convexkit::diameter<Vec2>(g);
  const double eps = tol.absolute(scale);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec2& a = g[k];
    const Vec2& b = g[(k + 1) % g.size()];
    const Vec2& c = g[(k + 2) % g.size()];
    if (cross2(b - a, c - b) < -eps * scale) throw InvalidArgument("domain is not convex");
  }
  if (problem.boundary_nodes.size() != problem.boundary_values.size())
    throw InvalidArgument("one boundary value per boundary node required");
  if (problem.interior_nodes.empty()) throw InvalidArgument("problem has no interior nodes");
  const bool derive = problem.masses.empty() && problem.density;
  if (!derive) {
    if (problem.masses.size() != problem.interior_nodes.size())
      throw InvalidArgument("one mass per interior node required");
    for (double m : problem.masses)
      if (!(m > 0.0) || !std::isfinite(m)) throw InvalidArgument("masses must be positive and finite");
  }
  for (double v : problem.boundary_values)
    if (!std::isfinite(v)) throw InvalidArgument("boundary values must be finite");

  for (const Vec2& x : problem.interior_nodes) {
    if (!all_finite(x)) throw InvalidArgument("interior node is not finite");
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Vec2& a = g[k];
      const Vec2& b = g[(k + 1) % g.size()];
      if (cross2(b - a, x - a) / (b - a).norm() <= eps)
        throw InvalidArgument("interior node (" + fmt(x.x()) + ", " + fmt(x.y()) + ") is not inside the domain");
    }
  }
  const auto per_edge = nodes_per_edge(problem, eps);
  for (std::size_t i = 0; i < problem.boundary_nodes.size(); ++i) {
    bool on_boundary = false;
    for (const auto& edge : per_edge)
      for (const auto& [t, idx] : edge) on_boundary = on_boundary || idx == i;
    if (!on_boundary) throw InvalidArgument("boundary node " + std::to_string(i) + " is not on the domain boundary");
  }
  for (const Vec2& c : g) {
    bool found = false;
    for (const Vec2& x : problem.boundary_nodes) found = found || (x - c).norm() <= eps;
    if (!found) throw InvalidArgument("every domain corner must be a boundary node");
  }
  for (std::size_t k = 0; k < per_edge.size(); ++k) {
    const auto& e = per_edge[k];
    const double len = (g[(k + 1) % g.size()] - g[k]).norm();
    for (std::size_t j = 0; j + 1 < e.size(); ++j)
      if ((e[j + 1].first - e[j].first) * len <= eps) throw InvalidArgument("duplicate boundary nodes");
    for (std::size_t j = 0; j + 2 < e.size(); ++j) {
      const double s0 = (problem.boundary_values[e[j + 1].second] - problem.boundary_values[e[j].second]) /
                        ((e[j + 1].first - e[j].first) * len);
      const double s1 = (problem.boundary_values[e[j + 2].second] - problem.boundary_values[e[j + 1].second]) /
                        ((e[j + 2].first - e[j + 1].first) * len);
      if (s1 < s0 - 1e-9 * (std::abs(s0) + std::abs(s1) + 1.0))
        throw InvalidArgument("boundary values are not convex along domain edge " + std::to_string(k));
    }
  }

  // Weight sampling: positivity, and theta non-increasing in z.
  double gmin = 0.0, gmax = 0.0;
  if (!problem.boundary_values.empty()) {
    gmin = *std::min_element(problem.boundary_values.begin(), problem.boundary_values.end());
    gmax = *std::max_element(problem.boundary_values.begin(), problem.boundary_values.end());
  }
  const std::size_t xs = std::min<std::size_t>(problem.interior_nodes.size(), 5);
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b) {
      const Vec2 p(10.0 * a / 3.0, 10.0 * b / 3.0);
      for (std::size_t xi = 0; xi < xs; ++xi) {
        const Vec2& x = problem.interior_nodes[xi];
        for (double z : {gmin - 10.0, 0.5 * (gmin + gmax), gmax + 10.0}) {
          const double w = problem.theta(p, z, x);
          if (!(w > 0.0) || !std::isfinite(w))
            throw InvalidArgument("weight must be positive; theta(" + fmt(p.x()) + ", " + fmt(p.y()) + ", " + fmt(z) +
                                  ", ...) = " + fmt(w));
          if (problem.theta.uses_z() && problem.theta(p, z + 1.0, x) > w * (1.0 + 1e-12))
            throw InvalidArgument("weight must be non-increasing in z");
        }
      }
    }
}

std::vector<double> masses_from_density(const MAProblem& problem, const QuadratureOptions& quadrature) {
  if (!problem.density) throw InvalidArgument("problem has no density");
  // Voronoi cells are subgradient cells of |x|^2 / 2.
  PLConvexFunction lift{problem.interior_nodes, {}};
  for (const Vec2& x : problem.interior_nodes) lift.values.push_back(0.5 * x.squaredNorm());
  std::vector<double> out;
  for (std::size_t i = 0; i < problem.interior_nodes.size(); ++i) {
    const SubgradientCell cell = subgradient_cell(lift, i, problem.domain);
    const Weight& phi = *problem.density;
    const double m = phi.uses_x()
                         ? integrate_polygon(cell.polygon, [&](const Vec2& x) { return phi(Vec2::Zero(), 0.0, x); },
                                             quadrature)
                         : phi(Vec2::Zero(), 0.0, Vec2::Zero()) * cell.area;
    out.push_back(m);
  }
  return out;
}

double feasibility_bound(const Weight& theta) {
  if (theta.uses_z() || theta.uses_x()) return std::numeric_limits<double>::infinity();
  if (!theta.uses_p()) return std::numeric_limits<double>::infinity();
  constexpr int angles = 128;
  auto ring = [&](double r) {
    double m = 0.0;
    for (int k = 0; k < angles; ++k) {
      const double phi = kTwoPi * k / angles;
      m = std::max(m, r * r * theta(Vec2(r * std::cos(phi), r * std::sin(phi)), 0.0, Vec2::Zero()));
    }
    return m;
  };
  // The tail integral converges only if r^2 theta decays.
  const double near = ring(1e4), far = ring(1e8);
  if (!(far <= 1e-2 * near) && far > 1e-12) return std::numeric_limits<double>::infinity();
  static constexpr double node[5] = {-0.906179845938664, -0.538469310105683, 0.0, 0.538469310105683,
                                     0.906179845938664};
  static constexpr double weight[5] = {0.236926885056189, 0.478628670499366, 0.568888888888889,
                                       0.478628670499366, 0.236926885056189};
  // r = t / (1 - t) maps [0, 1) onto [0, inf).
  constexpr int panels = 400;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double t0 = static_cast<double>(k) / panels, t1 = static_cast<double>(k + 1) / panels;
    for (int q = 0; q < 5; ++q) {
      const double t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * node[q];
      const double r = t / (1.0 - t);
      const double jac = 1.0 / ((1.0 - t) * (1.0 - t));
      double ring_sum = 0.0;
      for (int a = 0; a < angles; ++a) {
        const double phi = kTwoPi * (a + 0.5) / angles;
        ring_sum += theta(Vec2(r * std::cos(phi), r * std::sin(phi)), 0.0, Vec2::Zero());
      }
      total += 0.5 * (t1 - t0) * weight[q] * ring_sum * (kTwoPi / angles) * r * jac;
    }
  }
  return total;
}

PLConvexFunction make_function(const MAProblem& problem, const std::vector<double>& interior_values) {
  PLConvexFunction u;
  u.nodes = problem.interior_nodes;
  u.nodes.insert(u.nodes.end(), problem.boundary_nodes.begin(), problem.boundary_nodes.end());
  u.values = interior_values;
  u.values.insert(u.values.end(), problem.boundary_values.begin(), problem.boundary_values.end());
  return u;
}

std::vector<double> interior_masses(const MAProblem& problem, const std::vector<double>& interior_values,
                                    const QuadratureOptions& quadrature) {
  const PLConvexFunction u = make_function(problem, interior_values);
  std::vector<double> out;
  for (std::size_t i = 0; i < problem.interior_nodes.size(); ++i)
    out.push_back(cell_mass(subgradient_cell(u, i), u, problem.theta, quadrature));
  return out;
}

double mass_residual(const std::vector<double>& masses, const std::vector<double>& targets) {
  double r = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) r = std::max(r, std::abs(masses[i] - targets[i]) / targets[i]);
  return r;
}

namespace {

class Solver {
 public:
  Solver(const MAProblem& problem, std::vector<double> targets, const MAOptions& options)
      : p_(problem), mu_(std::move(targets)), opt_(options), quad_(quadrature_for(options, options.tol)),
        n_(problem.interior_nodes.size()) {
    u_ = make_function(problem, std::vector<double>(n_, 0.0));
    const auto [lo, hi] = std::minmax_element(problem.boundary_values.begin(), problem.boundary_values.end());
    gmin_ = *lo;
    gmax_ = *hi;
    value_scale_ = gmax_ - gmin_ + convexkit::diameter<Vec2>(problem.domain);
  }

  double mass(std::size_t i) { return cell_mass(subgradient_cell(u_, i), u_, p_.theta, quad_); }

  std::vector<double> all_masses() {
    std::vector<double> m(n_);
    for (std::size_t i = 0; i < n_; ++i) m[i] = mass(i);
    return m;
  }

  void set(const std::vector<double>& v) { std::copy(v.begin(), v.end(), u_.values.begin()); }
  std::vector<double> values() const { return {u_.values.begin(), u_.values.begin() + static_cast<long>(n_)}; }

  void cold_start() {
    for (std::size_t i = 0; i < n_; ++i) u_.values[i] = gmax_ + 0.1 * value_scale_;
  }

  // Lowers node i until its mass reaches the target from below.
  void lower_node(std::size_t i, double until) {
    const double target = mu_[i];
    const double accept = 0.1 * until * target;
    double hi = u_.values[i];
    double f_hi = mass(i) - target;
    if (f_hi >= -accept) return;
    double step = step_hint_[i] > 0.0 ? 2.0 * step_hint_[i] : value_scale_;
    double lo, f_lo;
    for (;;) {
      lo = hi - step;
      u_.values[i] = lo;
      f_lo = mass(i) - target;
      if (f_lo >= 0.0) break;
      hi = lo;
      f_hi = f_lo;
      step *= 2.0;
      if (!std::isfinite(lo)) throw Infeasible("node " + std::to_string(i) + " cannot reach its mass");
    }
    const double start = u_.values[i] + step;
    int side = 0;
    for (int it = 0; it < 200 && f_hi < -accept; ++it) {
      if (hi - lo <= 4e-16 * (std::abs(hi) + value_scale_)) break;
      double v = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
      if (!(v > lo && v < hi)) v = 0.5 * (lo + hi);
      u_.values[i] = v;
      const double f = mass(i) - target;
      if (f <= 0.0) {
        hi = v;
        f_hi = f;
        if (side == -1) f_lo *= 0.5;
        side = -1;
      } else {
        lo = v;
        f_lo = f;
        if (side == 1) f_hi *= 0.5;
        side = 1;
      }
    }
    u_.values[i] = hi;
    step_hint_[i] = std::max(start - hi, 1e-12 * value_scale_);
  }

  // Monotone sweeps until the residual drops below `until`. Node solves and
  // quadrature are only as accurate as `until` needs.
  bool sweep(double until, MASolution& out) {
    quad_ = quadrature_for(opt_, until);
    out.sweep_deficit.clear();
    step_hint_.assign(n_, 0.0);
    for (;;) {
      const std::vector<double> m = all_masses();
      double deficit = 0.0;
      for (std::size_t i = 0; i < n_; ++i) deficit += mu_[i] - m[i];
      const double res = mass_residual(m, mu_);
      best_ = std::min(best_, res);
      out.sweep_deficit.push_back(deficit);
      if (res <= until) return true;
      if (out.sweeps >= opt_.max_iter) return false;
      ++out.sweeps;
      for (std::size_t i = 0; i < n_; ++i) lower_node(i, until);
    }
  }

  // Damped Newton on the interior values; requires theta independent of z.
  bool newton(MASolution& out) {
    quad_ = quadrature_for(opt_, opt_.tol);
    std::vector<double> m = all_masses();
    for (double v : m)
      if (!(v > 0.0)) return false;
    double res = mass_residual(m, mu_);
    int stalls = 0;
    for (std::size_t iter = 0; iter < opt_.max_newton; ++iter) {
      best_ = std::min(best_, res);
      if (res <= opt_.tol) return true;
      Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<long>(n_), static_cast<long>(n_));
      Eigen::VectorXd rhs(static_cast<long>(n_));
      for (std::size_t i = 0; i < n_; ++i) {
        rhs(static_cast<long>(i)) = mu_[i] - m[i];
        const SubgradientCell cell = subgradient_cell(u_, i);
        for (std::size_t k = 0; k < cell.polygon.size(); ++k) {
          const std::size_t j = cell.edge_owner[k];
          if (j >= u_.nodes.size()) continue;
          const double w = edge_integral(cell.polygon[k], cell.polygon[(k + 1) % cell.polygon.size()], p_.theta,
                                         u_.values[i], u_.nodes[i]) /
                           (u_.nodes[j] - u_.nodes[i]).norm();
          jac(static_cast<long>(i), static_cast<long>(i)) -= w;
          if (j < n_) jac(static_cast<long>(i), static_cast<long>(j)) += w;
        }
      }
      const Eigen::VectorXd delta = jac.partialPivLu().solve(rhs);
      if (!delta.allFinite()) return false;
      const std::vector<double> base = values();
      bool accepted = false;
      double step = 0.0;
      for (double alpha = 1.0; alpha > 1e-4; alpha *= 0.5) {
        std::vector<double> trial = base;
        for (std::size_t i = 0; i < n_; ++i) trial[i] += alpha * delta(static_cast<long>(i));
        set(trial);
        const std::vector<double> mt = all_masses();
        bool positive = true;
        for (double v : mt) positive = positive && v > 0.0;
        const double rt = mass_residual(mt, mu_);
        if (positive && rt < res * (1.0 - 1e-4 * alpha)) {
          m = mt;
          res = rt;
          accepted = true;
          step = alpha;
          break;
        }
      }
      ++out.newton_steps;
      if (!accepted) {
        set(base);
        return false;
      }
      // Persistent heavy damping means Newton is far from its basin.
      stalls = step < 1e-2 ? stalls + 1 : 0;
      if (stalls >= 3) return false;
    }
    best_ = std::min(best_, res);
    return res <= opt_.tol;
  }

  // Sweep to a moderate residual, hand over to Newton, and on failure resume
  // sweeping from the saved state with a stricter hand-over point.
  bool sweep_then_newton(MASolution& out, bool newton_ok) {
    for (double until = opt_.newton_switch; newton_ok && until > opt_.tol; until *= 0.1) {
      if (!sweep(until, out)) throw MaxIterExceeded("sweep budget exhausted", best_);
      const std::vector<double> saved = values();
      if (newton(out)) return true;
      set(saved);
    }
    return sweep(opt_.tol, out);
  }

  MASolution run() {
    MASolution out;
    const bool newton_ok = opt_.allow_newton && !p_.theta.uses_z();
    bool done = false;
    if (opt_.initial) {
      if (opt_.initial->size() != n_) throw InvalidArgument("warm start needs one value per interior node");
      set(*opt_.initial);
      if (newton_ok) done = newton(out);
      if (!done) {
        // The monotone iteration may start anywhere with every mass below target.
        set(*opt_.initial);
        quad_ = quadrature_for(opt_, opt_.tol);
        const std::vector<double> m = all_masses();
        bool below = true;
        for (std::size_t i = 0; i < n_; ++i) below = below && m[i] <= mu_[i];
        if (below) done = sweep_then_newton(out, newton_ok);
      }
      out.warm_started = done;
    }
    if (!done) {
      cold_start();
      done = sweep_then_newton(out, newton_ok);
    }
    quad_ = quadrature_for(opt_, opt_.tol);
    if (!done) throw MaxIterExceeded("mass residual above " + fmt(opt_.tol) + " after the iteration budget", best_);
    out.u = u_;
    out.interior_values = values();
    out.masses = all_masses();
    out.residual = mass_residual(out.masses, mu_);
    return out;
  }

 private:
  const MAProblem& p_;
  std::vector<double> mu_;
  MAOptions opt_;
  QuadratureOptions quad_;
  std::size_t n_;
  PLConvexFunction u_;
  double gmin_ = 0.0, gmax_ = 0.0, value_scale_ = 1.0;
  std::vector<double> step_hint_;
  double best_ = std::numeric_limits<double>::infinity();
};

}  // namespace

MASolution solve_ma(const MAProblem& problem, const MAOptions& options) {
  if (!(options.tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  validate_problem(problem);
  std::vector<double> targets = problem.masses;
  if (targets.empty()) targets = masses_from_density(problem);
  for (double m : targets)
    if (!(m > 0.0)) throw InvalidArgument("derived masses must be positive");
  const double total = std::accumulate(targets.begin(), targets.end(), 0.0);
  const double bound = feasibility_bound(problem.theta);
  if (total >= bound)
    throw Infeasible("total mass " + fmt(total) + " reaches the attainable bound " + fmt(bound));
  return Solver(problem, std::move(targets), options).run();
}

ComparisonReport maximum_principle_check(const PLConvexFunction& u1, const PLConvexFunction& u2,
                                         const MAProblem& problem1, const MAProblem& problem2, double tol) {
  const std::size_t n = problem1.interior_nodes.size();
  if (problem2.interior_nodes.size() != n || problem1.boundary_nodes.size() != problem2.boundary_nodes.size())
    throw IncomparableProblems("problems have different node sets");
  for (std::size_t i = 0; i < n; ++i)
    if ((problem1.interior_nodes[i] - problem2.interior_nodes[i]).norm() > 1e-12)
      throw IncomparableProblems("interior node " + std::to_string(i) + " differs");
  for (std::size_t i = 0; i < problem1.boundary_nodes.size(); ++i) {
    if ((problem1.boundary_nodes[i] - problem2.boundary_nodes[i]).norm() > 1e-12)
      throw IncomparableProblems("boundary node " + std::to_string(i) + " differs");
    if (problem1.boundary_values[i] > problem2.boundary_values[i] + tol)
      throw IncomparableProblems("boundary value " + std::to_string(i) + " of the first problem is larger");
  }
  if (problem1.masses.size() != n || problem2.masses.size() != n)
    throw IncomparableProblems("both problems need explicit masses");
  for (std::size_t i = 0; i < n; ++i)
    if (problem1.masses[i] < problem2.masses[i] * (1.0 - 1e-12))
      throw IncomparableProblems("mass " + std::to_string(i) + " of the first problem is smaller");
  if (u1.values.size() < n || u2.values.size() < n) throw IncomparableProblems("solutions do not match the problems");

  ComparisonReport report;
  report.tolerance = tol;
  report.max_difference = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = u1.values[i] - u2.values[i];
    report.difference.push_back(d);
    report.max_difference = std::max(report.max_difference, d);
    if (d > tol) report.violations.push_back(i);
  }
  return report;
}

}  // namespace convexkit::ma
