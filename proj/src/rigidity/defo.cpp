#include "convexkit/rigidity/defo.hpp"

#include "convexkit/core/errors.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace convexkit::rigidity {

GridPatch GridPatch::sample(std::size_t nx, std::size_t ny, double h, double x0, double y0,
                            const std::function<double(double, double)>& z,
                            const std::function<double(double, double)>& zeta) {
  GridPatch p;
  p.h = h;
  p.x0 = x0;
  p.y0 = y0;
  p.z.resize(static_cast<long>(nx), static_cast<long>(ny));
  p.zeta.resize(static_cast<long>(nx), static_cast<long>(ny));
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) {
      p.z(static_cast<long>(i), static_cast<long>(j)) = z(p.x(i), p.y(j));
      p.zeta(static_cast<long>(i), static_cast<long>(j)) = zeta ? zeta(p.x(i), p.y(j)) : 0.0;
    }
  return p;
}

Hessian2 discrete_hessian(const Eigen::MatrixXd& f, double h, std::size_t i, std::size_t j) {
  const long a = static_cast<long>(i), b = static_cast<long>(j);
  const double h2 = h * h;
  return {(f(a + 1, b) - 2.0 * f(a, b) + f(a - 1, b)) / h2,
          (f(a + 1, b + 1) - f(a + 1, b - 1) - f(a - 1, b + 1) + f(a - 1, b - 1)) / (4.0 * h2),
          (f(a, b + 1) - 2.0 * f(a, b) + f(a, b - 1)) / h2};
}

namespace {

void check_patch(const GridPatch& p) {
  if (p.z.rows() < 3 || p.z.cols() < 3) throw InvalidArgument("grid patch needs at least 3 nodes per axis");
  if (p.zeta.rows() != p.z.rows() || p.zeta.cols() != p.z.cols())
    throw InvalidArgument("z and zeta grids differ in shape");
  if (!(p.h > 0.0) || !std::isfinite(p.h)) throw InvalidArgument("grid spacing must be positive");
  if (!p.z.allFinite() || !p.zeta.allFinite()) throw InvalidArgument("grid values must be finite");
}

}  // namespace

double defo_residual(const GridPatch& patch) {
  check_patch(patch);
  double r = 0.0;
  for (std::size_t i = 1; i + 1 < patch.nx(); ++i)
    for (std::size_t j = 1; j + 1 < patch.ny(); ++j) {
      const Hessian2 z = discrete_hessian(patch.z, patch.h, i, j);
      const Hessian2 s = discrete_hessian(patch.zeta, patch.h, i, j);
      r = std::max(r, std::abs(z.xx * s.yy - 2.0 * z.xy * s.xy + z.yy * s.xx));
    }
  return r;
}

GridPatch solve_defo(const GridPatch& patch) {
  check_patch(patch);
  const std::size_t nx = patch.nx(), ny = patch.ny();
  const std::size_t mx = nx - 2, my = ny - 2;
  auto index = [&](std::size_t i, std::size_t j) { return static_cast<long>((i - 1) * my + (j - 1)); };

  std::vector<std::pair<std::size_t, std::size_t>> bad;
  std::vector<Eigen::Triplet<double>> entries;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<long>(mx * my));
  for (std::size_t i = 1; i + 1 < nx; ++i)
    for (std::size_t j = 1; j + 1 < ny; ++j) {
      const Hessian2 z = discrete_hessian(patch.z, patch.h, i, j);
      if (!(z.xx > 0.0 && z.det() > 0.0)) {
        bad.emplace_back(i, j);
        continue;
      }
      // h^2 (z_yy zeta_xx + z_xx zeta_yy - 2 z_xy zeta_xy).
      const double cx = z.yy, cy = z.xx, cxy = -2.0 * z.xy / 4.0;
      const long row = index(i, j);
      const std::pair<std::pair<long, long>, double> stencil[] = {
          {{0, 0}, -2.0 * (cx + cy)}, {{1, 0}, cx},    {{-1, 0}, cx},    {{0, 1}, cy},   {{0, -1}, cy},
          {{1, 1}, cxy},              {{-1, -1}, cxy}, {{1, -1}, -cxy}, {{-1, 1}, -cxy}};
      for (const auto& [off, w] : stencil) {
        const std::size_t a = static_cast<std::size_t>(static_cast<long>(i) + off.first);
        const std::size_t b = static_cast<std::size_t>(static_cast<long>(j) + off.second);
        if (a == 0 || b == 0 || a + 1 == nx || b + 1 == ny)
          rhs(row) -= w * patch.zeta(static_cast<long>(a), static_cast<long>(b));
        else
          entries.emplace_back(row, index(a, b), w);
      }
    }
  if (!bad.empty()) {
    std::ostringstream os;
    os << "discrete Hessian of z is not positive definite at " << bad.size() << " interior node(s), first ("
       << bad.front().first << ", " << bad.front().second << ")";
    throw NotStrictlyConvex(os.str());
  }
  Eigen::SparseMatrix<double> a(static_cast<long>(mx * my), static_cast<long>(mx * my));
  a.setFromTriplets(entries.begin(), entries.end());
  a.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw NotStrictlyConvex("bending equation matrix is singular");
  const Eigen::VectorXd sol = lu.solve(rhs);
  GridPatch out = patch;
  for (std::size_t i = 1; i + 1 < nx; ++i)
    for (std::size_t j = 1; j + 1 < ny; ++j) out.zeta(static_cast<long>(i), static_cast<long>(j)) = sol(index(i, j));
  return out;
}

MainLemmaReport main_lemma_check(const GridPatch& patch, double tol, double max_residual) {
  MainLemmaReport report;
  report.residual = defo_residual(patch);
  report.tolerance = tol;
  if (report.residual > max_residual) {
    std::ostringstream os;
    os << "bending equation residual " << report.residual << " exceeds " << max_residual
       << "; the curvature sign check is not meaningful";
    throw PrecisionWarning(os.str());
  }
  for (std::size_t i = 1; i + 1 < patch.nx(); ++i)
    for (std::size_t j = 1; j + 1 < patch.ny(); ++j) {
      const Hessian2 z = discrete_hessian(patch.z, patch.h, i, j);
      if (!(z.xx > 0.0 && z.det() > 0.0)) continue;
      const double d = discrete_hessian(patch.zeta, patch.h, i, j).det();
      ++report.checked;
      report.max_det = std::max(report.max_det, d);
      if (d > tol) report.violations.push_back({i, j, d});
    }
  return report;
}

}  // namespace convexkit::rigidity
