#include "convexkit/minkowski/minkowski.hpp"

#include "convexkit/core/errors.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace convexkit::minkowski {

Vec3 check_closing(const MinkowskiProblem& problem) { return closing_defect(problem.normals, problem.areas); }

void validate_problem(const MinkowskiProblem& problem, double closing_threshold) {
  const std::size_t m = problem.normals.size();
  if (m < 4) throw InvalidArgument("a Minkowski problem needs at least 4 normals");
  if (problem.areas.size() != m) throw InvalidArgument("one area per normal required");
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!all_finite(problem.normals[i]) || std::abs(problem.normals[i].norm() - 1.0) > 1e-9)
      throw InvalidArgument("normal " + std::to_string(i) + " is not a unit vector");
    if (!(problem.areas[i] > 0.0) || !std::isfinite(problem.areas[i]))
      throw InvalidArgument("area " + std::to_string(i) + " must be positive");
    total += problem.areas[i];
    for (std::size_t j = 0; j < i; ++j)
      if ((problem.normals[i] - problem.normals[j]).norm() <= 1e-9)
        throw InvalidArgument("normals " + std::to_string(j) + " and " + std::to_string(i) + " coincide");
  }
  if (!positively_spanning(problem.normals)) throw InvalidArgument("normals do not positively span space");
  const double defect = check_closing(problem).norm();
  if (defect > closing_threshold * total) {
    std::ostringstream os;
    os << "closing defect " << defect << " exceeds " << closing_threshold << " of the total area";
    throw InvalidArgument(os.str());
  }
}

CurvatureSample icosphere_sample(int level, const std::function<double(const Vec3&)>& curvature) {
  if (level < 0 || level > 6) throw InvalidArgument("icosphere level must be in [0, 6]");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                         {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& p : v) p.normalize();
  std::vector<std::array<std::size_t, 3>> tri = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                                 {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                                 {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                                 {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> mid;
    auto midpoint = [&](std::size_t a, std::size_t b) {
      const auto key = std::minmax(a, b);
      if (auto it = mid.find(key); it != mid.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      return mid[key] = v.size() - 1;
    };
    std::vector<std::array<std::size_t, 3>> next;
    for (const auto& f : tri) {
      const std::size_t ab = midpoint(f[0], f[1]), bc = midpoint(f[1], f[2]), ca = midpoint(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({ab, f[1], bc});
      next.push_back({ca, bc, f[2]});
      next.push_back({ab, bc, ca});
    }
    tri = std::move(next);
  }
  CurvatureSample s;
  s.centers = v;
  s.cell_areas.assign(v.size(), 0.0);
  for (const auto& f : tri) {
    const double area = std::abs(signed_solid_angle(v[f[0]], v[f[1]], v[f[2]]));
    for (std::size_t k : f) s.cell_areas[k] += area / 3.0;
  }
  for (const Vec3& n : v) s.curvature.push_back(curvature(n));
  return s;
}

DiscretizedCurvature discretize_curvature(const CurvatureSample& sample) {
  const std::size_t m = sample.centers.size();
  if (sample.cell_areas.size() != m || sample.curvature.size() != m)
    throw InvalidArgument("curvature sample needs one area and one value per cell");
  DiscretizedCurvature out;
  Eigen::MatrixXd n(static_cast<long>(m), 3);
  for (std::size_t j = 0; j < m; ++j) {
    const double k = sample.curvature[j];
    if (!(k > 0.0) || !std::isfinite(k))
      throw NegativeCurvature("curvature at cell " + std::to_string(j) + " is not positive");
    if (!(sample.cell_areas[j] > 0.0)) throw InvalidArgument("cell areas must be positive");
    out.raw_areas.push_back(sample.cell_areas[j] / k);
    n.row(static_cast<long>(j)) = sample.centers[j].normalized().transpose();
  }
  out.defect_before = closing_defect(sample.centers, out.raw_areas);
  const Eigen::Vector3d coeff = (n.transpose() * n).ldlt().solve(out.defect_before);
  const Eigen::VectorXd delta = -n * coeff;
  out.problem.normals.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    out.correction.push_back(delta(static_cast<long>(j)));
    const double a = out.raw_areas[j] + out.correction[j];
    if (!(a > 0.0)) throw InvalidArgument("closing correction makes an area non-positive");
    out.problem.normals.push_back(sample.centers[j].normalized());
    out.problem.areas.push_back(a);
  }
  out.defect_after = check_closing(out.problem);
  return out;
}

std::vector<double> area_map(const std::vector<Vec3>& normals, const std::vector<double>& support_numbers) {
  return polytope_from_support(normals, support_numbers).areas();
}

Eigen::MatrixXd area_jacobian(const std::vector<Vec3>& normals, const HalfspaceIntersection& body) {
  const long m = static_cast<long>(normals.size());
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(m, m);
  for (const FaceAdjacency& e : body.edges) {
    const Vec3& a = normals[e.face_a];
    const Vec3& b = normals[e.face_b];
    const double s = a.cross(b).norm(), c = a.dot(b);
    if (s <= 1e-14) continue;
    const long ia = static_cast<long>(e.face_a), ib = static_cast<long>(e.face_b);
    j(ia, ib) += e.length / s;
    j(ib, ia) += e.length / s;
    j(ia, ia) -= e.length * c / s;
    j(ib, ib) -= e.length * c / s;
  }
  return j;
}

namespace {

struct Evaluation {
  bool valid = false;
  double volume = 0.0;
  Eigen::VectorXd areas;
  HalfspaceIntersection body;
};

}  // namespace

MinkowskiSolution solve_minkowski(const MinkowskiProblem& problem, const MinkowskiOptions& options) {
  validate_problem(problem, options.closing_threshold);
  const std::size_t m = problem.normals.size();
  const long lm = static_cast<long>(m);
  Eigen::VectorXd target(lm);
  Eigen::MatrixXd n(lm, 3);
  for (std::size_t i = 0; i < m; ++i) {
    target(static_cast<long>(i)) = problem.areas[i];
    n.row(static_cast<long>(i)) = problem.normals[i].transpose();
  }
  // Projector onto the complement of translations h -> h + N c.
  const Eigen::MatrixXd translation = n * (n.transpose() * n).inverse() * n.transpose();
  const Eigen::MatrixXd complement = Eigen::MatrixXd::Identity(lm, lm) - translation;

  // f(h) = <A, h> - log vol(h) is convex (vol^(1/3) is concave) and, under the
  // closing condition, invariant under translations.
  auto evaluate = [&](const Eigen::VectorXd& h) {
    Evaluation ev;
    try {
      std::vector<double> hv(h.data(), h.data() + h.size());
      ev.body = halfspace_intersection(problem.normals, hv, Tolerance{1e-13});
    } catch (const EmptyBody&) {
      return ev;
    }
    ev.volume = ev.body.polytope.volume();
    if (!(ev.volume > 0.0)) return ev;
    ev.areas = Eigen::Map<const Eigen::VectorXd>(ev.body.polytope.areas().data(), lm);
    ev.valid = true;
    return ev;
  };
  // At a critical point the areas are vol * A.
  auto residual_of = [&](const Evaluation& ev) {
    double r = 0.0;
    for (long i = 0; i < lm; ++i) r = std::max(r, std::abs(ev.areas(i) / ev.volume - target(i)) / target(i));
    return r;
  };
  // A face missing from the body can move in to touch it without changing
  // the body; this lowers f since A_i > 0.
  auto tighten = [&](Eigen::VectorXd& h, const Evaluation& ev) {
    bool changed = false;
    for (long i = 0; i < lm; ++i) {
      if (ev.areas(i) > 0.0) continue;
      double support = -std::numeric_limits<double>::infinity();
      for (const Vec3& v : ev.body.polytope.vertices())
        support = std::max(support, v.dot(problem.normals[static_cast<std::size_t>(i)]));
      if (support < h(i)) {
        h(i) = support;
        changed = true;
      }
    }
    return changed;
  };

  Eigen::VectorXd h = Eigen::VectorXd::Ones(lm);
  if (options.initial) {
    if (options.initial->size() != m) throw InvalidArgument("initial support vector has the wrong size");
    h = Eigen::Map<const Eigen::VectorXd>(options.initial->data(), lm);
  }
  Evaluation ev = evaluate(h);
  if (!ev.valid) throw InvalidArgument("initial support numbers do not bound a body");

  double damping = -1.0;
  double best = residual_of(ev);
  std::size_t iter = 0;
  for (; iter < options.max_iter; ++iter) {
    if (tighten(h, ev)) ev = evaluate(h);
    const double res = residual_of(ev);
    best = std::min(best, res);
    if (res <= options.tol) break;
    const Eigen::VectorXd a = ev.areas / ev.volume;
    const Eigen::VectorXd gradient = complement * (target - a);
    const Eigen::MatrixXd hess =
        complement * (-area_jacobian(problem.normals, ev.body) / ev.volume + a * a.transpose()) * complement;
    const double scale = hess.diagonal().cwiseAbs().maxCoeff();
    if (damping < 0.0) damping = 1e-3 * scale;
    Eigen::VectorXd step;
    for (int k = 0; k < 80 && step.size() == 0; ++k) {
      Eigen::LLT<Eigen::MatrixXd> llt(hess + (damping + 1e-14 * scale) * Eigen::MatrixXd::Identity(lm, lm));
      if (llt.info() == Eigen::Success) {
        Eigen::VectorXd s = -(complement * llt.solve(gradient));
        if (s.allFinite()) step = std::move(s);
      }
      if (step.size() == 0) damping = std::max(10.0 * damping, 1e-12 * scale);
    }
    if (step.size() == 0) break;
    // f differences are taken from a Simpson rule on the area map, which is
    // exact for the piecewise cubic volume; plain differences of f lose all
    // digits near the optimum.
    const double slope = gradient.dot(step);
    bool moved = false;
    for (double alpha = 1.0; alpha > 1e-12 && !moved; alpha *= 0.5) {
      Evaluation mid = evaluate(h + 0.5 * alpha * step);
      if (!mid.valid) continue;
      Evaluation trial = evaluate(h + alpha * step);
      if (!trial.valid) continue;
      const double dv = alpha / 6.0 * (ev.areas + 4.0 * mid.areas + trial.areas).dot(step);
      if (!(dv / ev.volume > -1.0)) continue;
      const double df = alpha * target.dot(step) - std::log1p(dv / ev.volume);
      if (df <= 1e-4 * alpha * slope) {
        h += alpha * step;
        ev = std::move(trial);
        moved = true;
        damping = alpha == 1.0 ? std::max(0.1 * damping, 1e-12 * scale) : 10.0 * damping;
      }
    }
    if (!moved) damping = std::max(10.0 * damping, 1e-12 * scale);
  }
  const double res = residual_of(ev);
  best = std::min(best, res);

  std::vector<std::size_t> small;
  for (long i = 0; i < lm; ++i)
    if (ev.areas(i) / ev.volume < options.small_face_fraction * target(i)) small.push_back(static_cast<std::size_t>(i));
  if (!small.empty())
    throw DegenerateFace("face " + std::to_string(small.front()) + " has no area at the optimum (" +
                         std::to_string(small.size()) + " faces)");
  if (res > options.tol) throw MaxIterExceeded("Minkowski iteration did not reach the area tolerance", best);

  // Areas scale with the square of the body: divide by sqrt(vol), then center.
  const double s = 1.0 / std::sqrt(ev.volume);
  std::vector<double> hs(m);
  for (std::size_t i = 0; i < m; ++i) hs[i] = s * h(static_cast<long>(i));
  const ConvexPolytope body = polytope_from_support(problem.normals, hs);
  const Vec3 c = body.centroid();
  MinkowskiSolution out;
  out.polytope = body.translated(-c);
  for (std::size_t i = 0; i < m; ++i) out.support_numbers.push_back(hs[i] - problem.normals[i].dot(c));
  out.areas = out.polytope.areas();
  for (std::size_t i = 0; i < m; ++i)
    out.residual = std::max(out.residual, std::abs(out.areas[i] - problem.areas[i]) / problem.areas[i]);
  out.iterations = iter;
  return out;
}

}  // namespace convexkit::minkowski
