#pragma once

#include "convexkit/ma/solver.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace convexkit::ma {

/// Problem family t -> MAProblem on a fixed node set, solved along a
/// parameter grid 0 = t_0 < ... < t_K = 1.
struct HomotopySchedule {
  std::vector<double> grid;
  std::function<MAProblem(double)> family;
  bool warm_start = true;
  /// Smallest step tried before giving up.
  double min_step = 1e-3;
  /// Steps are halved until no mass changes by more than this fraction.
  double max_relative_mass_change = 0.5;
  /// Called after every attempted step with its parameter and outcome.
  std::function<void(double t, bool accepted)> on_attempt;
};

struct HomotopyStep {
  double t = 0.0;
  bool on_grid = false;
  MASolution solution;
};

struct HomotopyResult {
  std::vector<HomotopyStep> steps;  // accepted steps, grid points flagged
  std::size_t failed_attempts = 0;
  /// Solutions at the grid points, in grid order.
  std::vector<PLConvexFunction> grid_solutions() const;
};

/// Warm-started solves along the grid with step halving on failure. Throws
/// MinStepReached carrying the last parameter that was solved.
HomotopyResult homotopy_solve(const HomotopySchedule& schedule, const MAOptions& options = {});

struct LiouvilleOptions {
  double f = 1.0;                 // constant right-hand side, > 0
  double spacing = 0.5;           // grid step on [-R, R]^2
  double window_half_width = 0.5; // inner window [-w, w]^2 for the fit
  double bump = 0.0;              // height of a boundary tent at the corner (R, R)
  double bump_width = 1.0;        // tent length along each edge from the corner
  MAOptions solver;
};

struct LiouvilleRow {
  double radius = 0.0;
  std::size_t interior_nodes = 0;
  double deviation = 0.0;  // max |u - best-fit quadratic| on the window
  double residual = 0.0;
  std::size_t newton_steps = 0;
  std::array<double, 6> fit{};  // c0 + c1 x + c2 y + c3 x^2 + c4 xy + c5 y^2
};

struct DeviationReport {
  std::vector<LiouvilleRow> rows;
  bool non_increasing = true;
  std::string trend;
};

/// Solves det D^2 u = f on [-R, R]^2 for each radius with boundary data from
/// sqrt(f) |x|^2 / 2 (plus the optional corner bump) and measures how far
/// the solution is from a quadratic polynomial on a fixed inner window.
DeviationReport liouville_probe(const std::vector<double>& radii, const LiouvilleOptions& options = {});

}  // namespace convexkit::ma
