#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <vector>

namespace convexkit::rigidity {

/// Values on the nodes x = x0 + i h, y = y0 + j h (i along rows).
struct GridPatch {
  double h = 1.0;
  double x0 = 0.0;
  double y0 = 0.0;
  Eigen::MatrixXd z;
  Eigen::MatrixXd zeta;

  std::size_t nx() const { return static_cast<std::size_t>(z.rows()); }
  std::size_t ny() const { return static_cast<std::size_t>(z.cols()); }
  double x(std::size_t i) const { return x0 + static_cast<double>(i) * h; }
  double y(std::size_t j) const { return y0 + static_cast<double>(j) * h; }

  static GridPatch sample(std::size_t nx, std::size_t ny, double h, double x0, double y0,
                          const std::function<double(double, double)>& z,
                          const std::function<double(double, double)>& zeta);
};

/// Central second differences; the mixed one uses the four diagonal neighbours.
struct Hessian2 {
  double xx;
  double xy;
  double yy;
  double det() const { return xx * yy - xy * xy; }
};
Hessian2 discrete_hessian(const Eigen::MatrixXd& f, double h, std::size_t i, std::size_t j);

/// Max over interior nodes of |z_xx zeta_yy - 2 z_xy zeta_xy + z_yy zeta_xx|.
double defo_residual(const GridPatch& patch);

/// Solves z_xx zeta_yy - 2 z_xy zeta_xy + z_yy zeta_xx = 0 for the interior
/// values of `patch.zeta`, keeping its boundary. Throws NotStrictlyConvex
/// listing the interior nodes where the discrete Hessian of z is not
/// positive definite.
GridPatch solve_defo(const GridPatch& patch);

struct MainLemmaNode {
  std::size_t i;
  std::size_t j;
  double det;
};

struct MainLemmaReport {
  std::size_t checked = 0;
  double max_det = -1e300;
  double residual = 0.0;
  double tolerance = 0.0;
  std::vector<MainLemmaNode> violations;
  bool passed() const { return violations.empty(); }
};

/// At every interior node where Hess z is positive definite, checks
/// det Hess zeta <= tol. Throws PrecisionWarning when the equation residual
/// exceeds `max_residual`.
MainLemmaReport main_lemma_check(const GridPatch& patch, double tol = 1e-8, double max_residual = 1e-8);

}  // namespace convexkit::rigidity
