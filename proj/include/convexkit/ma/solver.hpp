#pragma once

#include "convexkit/ma/measure.hpp"

#include <optional>
#include <string>
#include <vector>

namespace convexkit::ma {

/// Discrete Dirichlet problem: find a convex u with u = g at the boundary
/// nodes and conditional curvature mu_i at every interior node.
struct MAProblem {
  std::vector<Vec2> domain;  // convex, counterclockwise
  std::vector<Vec2> interior_nodes;
  std::vector<double> masses;
  std::vector<Vec2> boundary_nodes;  // on the domain boundary, including its corners
  std::vector<double> boundary_values;
  Weight theta;
  /// Right-hand side phi(x); when set and `masses` is empty the masses are
  /// its integrals over the Voronoi cells of the interior nodes in the domain.
  std::optional<Weight> density;
};

/// Throws InvalidArgument naming the violated requirement.
void validate_problem(const MAProblem& problem, Tolerance tol = {});

std::vector<double> masses_from_density(const MAProblem& problem, const QuadratureOptions& quadrature = {});

/// Upper bound for the total interior mass: the integral of theta over the
/// whole slope plane. Infinite when theta depends on z or x, or does not
/// decay fast enough.
double feasibility_bound(const Weight& theta);

/// Function on interior nodes (first) followed by boundary nodes.
PLConvexFunction make_function(const MAProblem& problem, const std::vector<double>& interior_values);

/// Conditional curvature of every interior node; nodes above the envelope
/// get zero.
std::vector<double> interior_masses(const MAProblem& problem, const std::vector<double>& interior_values,
                                    const QuadratureOptions& quadrature = {});

struct MAOptions {
  /// Required max_i |m_i - mu_i| / mu_i.
  double tol = 1e-10;
  /// Sweep budget of the monotone iteration.
  std::size_t max_iter = 20000;
  std::size_t max_newton = 60;
  /// Newton takes over once the sweep residual is below this (weights
  /// without z dependence only).
  double newton_switch = 0.1;
  bool allow_newton = true;
  /// Warm start for the interior values.
  std::optional<std::vector<double>> initial;
  /// The solver tightens the relative tolerance to at most tol / 10.
  QuadratureOptions quadrature;
};

struct MASolution {
  PLConvexFunction u;
  std::vector<double> interior_values;
  std::vector<double> masses;
  double residual = 0.0;
  std::size_t sweeps = 0;
  std::size_t newton_steps = 0;
  /// Total deficit sum_i (mu_i - m_i) after each sweep of the last sweep
  /// run; non-increasing.
  std::vector<double> sweep_deficit;
  bool warm_started = false;
};

/// Monotone per-node lowering sweeps from above, finished by damped Newton
/// when theta does not depend on z. Throws Infeasible when the masses exceed
/// feasibility_bound, MaxIterExceeded with the best residual otherwise.
MASolution solve_ma(const MAProblem& problem, const MAOptions& options = {});

double mass_residual(const std::vector<double>& masses, const std::vector<double>& targets);

struct ComparisonReport {
  std::vector<double> difference;  // u1 - u2 at interior nodes
  double max_difference = 0.0;
  std::vector<std::size_t> violations;  // interior nodes with u1 > u2 + tol
  double tolerance = 0.0;
  bool passed() const { return violations.empty(); }
};

/// Checks u1 <= u2 at the interior nodes for solutions of problems with
/// mu1 >= mu2 and g1 <= g2 on the same nodes (functions laid out as by
/// make_function). Throws IncomparableProblems otherwise.
ComparisonReport maximum_principle_check(const PLConvexFunction& u1, const PLConvexFunction& u2,
                                         const MAProblem& problem1, const MAProblem& problem2, double tol = 1e-9);

}  // namespace convexkit::ma
