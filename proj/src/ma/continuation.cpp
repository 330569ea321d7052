#include "convexkit/ma/continuation.hpp"

#include "convexkit/core/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>

namespace convexkit::ma {

std::vector<PLConvexFunction> HomotopyResult::grid_solutions() const {
  std::vector<PLConvexFunction> out;
  for (const HomotopyStep& s : steps)
    if (s.on_grid) out.push_back(s.solution.u);
  return out;
}

namespace {

std::vector<double> targets_of(const MAProblem& p) { return p.masses.empty() ? masses_from_density(p) : p.masses; }

double relative_change(const std::vector<double>& from, const std::vector<double>& to) {
  if (from.size() != to.size()) throw InvalidArgument("homotopy family changes the node count");
  double r = 0.0;
  for (std::size_t i = 0; i < from.size(); ++i) r = std::max(r, std::abs(to[i] - from[i]) / from[i]);
  return r;
}

}  // namespace

HomotopyResult homotopy_solve(const HomotopySchedule& schedule, const MAOptions& options) {
  const auto& grid = schedule.grid;
  if (grid.size() < 2 || !schedule.family) throw InvalidArgument("homotopy needs a family and at least two grid points");
  for (std::size_t k = 0; k + 1 < grid.size(); ++k)
    if (!(grid[k + 1] > grid[k])) throw InvalidArgument("homotopy grid must be increasing");
  if (!(schedule.min_step > 0.0)) throw InvalidArgument("minimum step must be positive");

  HomotopyResult result;
  double t = grid.front();
  MAProblem problem = schedule.family(t);
  MASolution current = solve_ma(problem, options);
  std::vector<double> current_mass = targets_of(problem);
  result.steps.push_back(HomotopyStep{t, true, current});

  double step = grid[1] - grid[0];
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double goal = grid[k];
    while (t < goal) {
      const bool last = step >= goal - t;
      const double next = last ? goal : t + step;
      auto shrink = [&] {
        ++result.failed_attempts;
        if (schedule.on_attempt) schedule.on_attempt(next, false);
        step = 0.5 * (next - t);
        if (step < schedule.min_step) {
          std::ostringstream os;
          os.precision(10);
          os << "continuation stalled after t = " << t;
          throw MinStepReached(os.str(), t);
        }
      };
      MAProblem trial = schedule.family(next);
      const std::vector<double> trial_mass = targets_of(trial);
      if (relative_change(current_mass, trial_mass) > schedule.max_relative_mass_change) {
        shrink();
        continue;
      }
      MAOptions opts = options;
      if (schedule.warm_start) opts.initial = current.interior_values;
      try {
        current = solve_ma(trial, opts);
      } catch (const Infeasible&) {
        shrink();
        continue;
      } catch (const MaxIterExceeded&) {
        shrink();
        continue;
      }
      if (schedule.on_attempt) schedule.on_attempt(next, true);
      t = next;
      current_mass = trial_mass;
      result.steps.push_back(HomotopyStep{t, last, current});
      step = std::min(2.0 * (next - result.steps[result.steps.size() - 2].t), grid.back() - grid.front());
    }
    if (k + 1 < grid.size()) step = std::min(step, grid[k + 1] - grid[k]);
  }
  return result;
}

DeviationReport liouville_probe(const std::vector<double>& radii, const LiouvilleOptions& options) {
  if (!(options.f > 0.0) || !std::isfinite(options.f)) throw InvalidArgument("Liouville probe needs f > 0");
  if (radii.empty()) throw InvalidArgument("Liouville probe needs at least one radius");
  const double h = options.spacing;
  const double c = std::sqrt(options.f);
  auto q = [c](const Vec2& x) { return 0.5 * c * x.squaredNorm(); };

  DeviationReport report;
  for (double radius : radii) {
    const long n = std::lround(radius / h);
    if (n < 2 || std::abs(n * h - radius) > 1e-12 * radius)
      throw InvalidArgument("each radius must be a multiple (at least 2) of the grid spacing");
    if (options.window_half_width > radius - h + 1e-12)
      throw InvalidArgument("inner window must lie within the interior nodes");
    MAProblem problem;
    problem.domain = {Vec2(-radius, -radius), Vec2(radius, -radius), Vec2(radius, radius), Vec2(-radius, radius)};
    std::vector<double> warm;
    for (long i = -n; i <= n; ++i)
      for (long j = -n; j <= n; ++j) {
        const Vec2 x(i * h, j * h);
        if (std::abs(i) == n || std::abs(j) == n) {
          problem.boundary_nodes.push_back(x);
          // Tent at the corner (R, R), linear along both edges: stays convex
          // along each edge and, unlike a corner-only raise, reaches the
          // interior facets.
          const double along = (Vec2(radius, radius) - x).lpNorm<1>();
          problem.boundary_values.push_back(q(x) + options.bump * std::max(0.0, 1.0 - along / options.bump_width));
        } else {
          problem.interior_nodes.push_back(x);
          problem.masses.push_back(options.f * h * h);
          warm.push_back(q(x));
        }
      }
    MAOptions solver = options.solver;
    if (!solver.initial) solver.initial = warm;
    const MASolution sol = solve_ma(problem, solver);

    std::vector<std::size_t> window;
    for (std::size_t i = 0; i < problem.interior_nodes.size(); ++i) {
      const Vec2& x = problem.interior_nodes[i];
      if (std::abs(x.x()) <= options.window_half_width + 1e-12 && std::abs(x.y()) <= options.window_half_width + 1e-12)
        window.push_back(i);
    }
    if (window.size() < 6) throw InvalidArgument("inner window holds fewer than 6 nodes");
    Eigen::MatrixXd a(static_cast<long>(window.size()), 6);
    Eigen::VectorXd b(static_cast<long>(window.size()));
    for (std::size_t r = 0; r < window.size(); ++r) {
      const Vec2& x = problem.interior_nodes[window[r]];
      a.row(static_cast<long>(r)) << 1.0, x.x(), x.y(), x.x() * x.x(), x.x() * x.y(), x.y() * x.y();
      b(static_cast<long>(r)) = sol.interior_values[window[r]];
    }
    const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(b);
    LiouvilleRow row;
    row.radius = radius;
    row.interior_nodes = problem.interior_nodes.size();
    row.deviation = (a * coef - b).cwiseAbs().maxCoeff();
    row.residual = sol.residual;
    row.newton_steps = sol.newton_steps;
    for (int k = 0; k < 6; ++k) row.fit[static_cast<std::size_t>(k)] = coef(k);
    if (!report.rows.empty() && row.deviation > report.rows.back().deviation) report.non_increasing = false;
    report.rows.push_back(row);
  }
  report.trend = report.non_increasing ? "non-increasing" : "not monotone";
  return report;
}

}  // namespace convexkit::ma
