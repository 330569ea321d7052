#include "cli.hpp"
#include "generators.hpp"

#include "convexkit/core/errors.hpp"
#include "convexkit/io/problem.hpp"
#include "convexkit/ma/continuation.hpp"
#include "convexkit/metric/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>
#include <sstream>

namespace convexkit::cli {

using nlohmann::json;

namespace {

const std::string& single_input(const RunConfig& c) {
  if (c.inputs.size() != 1) throw UsageError("expected exactly one input file");
  return c.inputs.front();
}

io::Report start(const RunConfig& c) {
  io::Report r;
  for (const auto& part : c.command) r.command += (r.command.empty() ? "" : " ") + part;
  r.config = config_json(c);
  return r;
}

json vec_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

json mesh_json(const ConvexPolytope& p) {
  json verts = json::array();
  for (const Vec3& v : p.vertices()) verts.push_back(vec_json(v));
  json faces = json::array();
  for (const FaceCycle& f : p.faces())
    if (f.size() >= 3) faces.push_back(f);
  return {{"vertices", verts}, {"faces", faces}};
}

// A net and, for mesh input, the polytope it was cut from.
struct LoadedNet {
  std::optional<metric::PolytopeNet> cut;
  std::optional<ConvexPolytope> polytope;
  std::optional<metric::MetricNet> direct;
  const metric::MetricNet& net() const { return cut ? cut->net : *direct; }
};

LoadedNet load_net(const std::string& path) {
  io::ProblemFile file = io::parse_problem(path);
  LoadedNet out;
  if (file.kind == io::ProblemKind::Mesh) {
    out.polytope = io::polytope_from_off(std::get<io::OffMesh>(file.payload));
    out.cut = metric::net_from_polytope(*out.polytope);
  } else if (file.kind == io::ProblemKind::Net) {
    out.direct = std::get<metric::MetricNet>(file.payload);
  } else {
    throw SchemaError("expected a net or a mesh, got " + io::to_string(file.kind));
  }
  return out;
}

json check_json(const metric::ConditionCheck& c) { return {{"passed", c.passed}, {"details", c.details}}; }

metric::SurfacePoint surface_point(const LoadedNet& n, const std::string& text, std::optional<std::size_t> vertex,
                                   const char* name) {
  if (vertex) {
    if (!n.cut) throw UsageError(std::string("--") + name + "-vertex needs a mesh input");
    for (std::size_t p = 0; p < n.cut->corner_vertex.size(); ++p)
      for (std::size_t i = 0; i < n.cut->corner_vertex[p].size(); ++i)
        if (n.cut->corner_vertex[p][i] == *vertex) return {p, n.net().corner(p, i)};
    throw UsageError(std::string("--") + name + "-vertex: no such vertex");
  }
  std::istringstream in(text);
  std::size_t poly = 0;
  double x = 0.0, y = 0.0;
  char c1 = 0, c2 = 0;
  if (!(in >> poly >> c1 >> x >> c2 >> y) || c1 != ',' || c2 != ',')
    throw UsageError(std::string("--") + name + " expects 'polygon,x,y'");
  if (poly >= n.net().polygon_count()) throw UsageError(std::string("--") + name + ": no such polygon");
  return {poly, Vec2(x, y)};
}

}  // namespace

io::Report net_validate(const RunConfig& c) {
  io::Report r = start(c);
  const LoadedNet n = load_net(single_input(c));
  Tolerance tol;
  if (c.tol) tol.relative = *c.tol;
  const metric::ValidationReport v = metric::validate_net(n.net(), tol);
  r.passed = v.passed();
  r.metrics = {{"polygons", n.net().polygon_count()},
               {"vertex_classes", n.net().vertex_class_count()},
               {"euler_characteristic", v.euler_characteristic},
               {"connected", v.connected},
               {"sphere_topology", check_json(v.sphere_topology)},
               {"equal_edges", check_json(v.equal_edges)},
               {"angle_bound", check_json(v.angle_bound)},
               {"mismatched_identifications", v.mismatched_identifications}};
  io::Table t{{"class", "full_angle"}, {}};
  for (std::size_t k = 0; k < v.full_angles.size(); ++k) t.rows.push_back({k, v.full_angles[k]});
  r.tables["full_angles"] = t;
  return r;
}

io::Report net_curvature(const RunConfig& c) {
  io::Report r = start(c);
  const LoadedNet n = load_net(single_input(c));
  const metric::CurvatureReport k = metric::vertex_curvatures(n.net());
  io::Table t{{"class", "full_angle", "curvature"}, {}};
  if (n.cut) t.columns.insert(t.columns.end(), {"vertex", "normal_cone_area"});
  double worst = 0.0;
  for (std::size_t i = 0; i < k.curvature.size(); ++i) {
    std::vector<json> row{i, k.full_angle[i], k.curvature[i]};
    if (n.cut) {
      const std::size_t v = n.cut->class_vertex[i];
      const double area = normal_cone_area(*n.polytope, v);
      worst = std::max(worst, std::abs(area - k.curvature[i]));
      row.insert(row.end(), {v, area});
    }
    t.rows.push_back(std::move(row));
  }
  r.tables["curvatures"] = t;
  r.metrics = {{"vertex_classes", k.curvature.size()},
               {"total_curvature", k.total},
               {"total_minus_4pi", k.total - 4.0 * std::numbers::pi}};
  if (n.cut) r.metrics["max_intrinsic_vs_spherical_image"] = worst;
  return r;
}

io::Report net_geodesic(const RunConfig& c) {
  io::Report r = start(c);
  const LoadedNet n = load_net(single_input(c));
  const metric::SurfacePoint p = surface_point(n, c.from, c.from_vertex, "from");
  const metric::SurfacePoint q = surface_point(n, c.to, c.to_vertex, "to");
  metric::GeodesicOptions opt;
  if (c.max_iter) opt.max_faces = *c.max_iter;
  const metric::GeodesicPath path = metric::shortest_path(n.net(), p, q, opt);
  r.metrics = {{"length", path.length}, {"polygons_crossed", path.faces.size()},
               {"explored_sequences", path.explored_sequences}};
  io::Table t{{"polygon", "x", "y"}, {}};
  for (const auto& pt : path.points) t.rows.push_back({pt.polygon, pt.position.x(), pt.position.y()});
  r.tables["path"] = t;
  return r;
}

namespace {

ma::MAOptions ma_options(const RunConfig& c) {
  ma::MAOptions o;
  if (c.tol) o.tol = *c.tol;
  if (c.max_iter) o.max_iter = *c.max_iter;
  return o;
}

void solution_table(io::Report& r, const ma::MAProblem& p, const ma::MASolution& s) {
  io::Table t{{"x", "y", "value", "mass", "target"}, {}};
  for (std::size_t i = 0; i < p.interior_nodes.size(); ++i)
    t.rows.push_back({p.interior_nodes[i].x(), p.interior_nodes[i].y(), s.interior_values[i], s.masses[i], p.masses[i]});
  r.tables["solution"] = t;
}

}  // namespace

io::Report ma_solve(const RunConfig& c) {
  io::Report r = start(c);
  const ma::MAProblem p = std::get<ma::MAProblem>(io::parse_problem(single_input(c), io::ProblemKind::MAProblem).payload);
  const ma::MAOptions o = ma_options(c);
  r.metrics["interior_nodes"] = p.interior_nodes.size();
  r.metrics["total_mass"] = std::accumulate(p.masses.begin(), p.masses.end(), 0.0);
  r.metrics["feasibility_bound"] = ma::feasibility_bound(p.theta);
  try {
    if (!c.homotopy) {
      const ma::MASolution s = ma::solve_ma(p, o);
      r.metrics["residual"] = s.residual;
      r.metrics["sweeps"] = s.sweeps;
      r.metrics["newton_steps"] = s.newton_steps;
      solution_table(r, p, s);
      return r;
    }
    // From equal masses of the same total to the target masses.
    const double mean = std::accumulate(p.masses.begin(), p.masses.end(), 0.0) / static_cast<double>(p.masses.size());
    ma::HomotopySchedule h;
    for (std::size_t k = 0; k <= c.steps; ++k) h.grid.push_back(static_cast<double>(k) / static_cast<double>(c.steps));
    h.family = [&](double t) {
      ma::MAProblem q = p;
      for (double& m : q.masses) m = (1.0 - t) * mean + t * m;
      return q;
    };
    const ma::HomotopyResult res = ma::homotopy_solve(h, o);
    io::Table t{{"t", "on_grid", "residual", "sweeps", "newton_steps"}, {}};
    for (const auto& s : res.steps)
      t.rows.push_back({s.t, s.on_grid, s.solution.residual, s.solution.sweeps, s.solution.newton_steps});
    r.tables["homotopy"] = t;
    r.metrics["failed_attempts"] = res.failed_attempts;
    r.metrics["residual"] = res.steps.back().solution.residual;
    solution_table(r, p, res.steps.back().solution);
  } catch (const MinStepReached& e) {
    r.passed = false;
    r.metrics["error"] = e.what();
    r.metrics["last_parameter"] = e.last_parameter();
  } catch (const MaxIterExceeded& e) {
    r.passed = false;
    r.metrics["error"] = e.what();
    r.metrics["best_residual"] = e.best_residual();
  } catch (const Infeasible& e) {
    r.passed = false;
    r.metrics["error"] = e.what();
  }
  return r;
}

namespace {

minkowski::MinkowskiOptions minkowski_options(const RunConfig& c) {
  minkowski::MinkowskiOptions o;
  if (c.tol) o.tol = *c.tol;
  if (c.max_iter) o.max_iter = *c.max_iter;
  return o;
}

double identity_error(const minkowski::MinkowskiSolution& s) {
  double v = 0.0;
  for (std::size_t i = 0; i < s.areas.size(); ++i) v += s.areas[i] * s.support_numbers[i] / 3.0;
  return std::abs(v - s.polytope.volume()) / s.polytope.volume();
}

minkowski::MinkowskiProblem load_minkowski(const RunConfig& c, io::Report& r) {
  auto input = std::get<io::MinkowskiInput>(io::parse_problem(single_input(c), io::ProblemKind::MinkowskiProblem).payload);
  if (auto* p = std::get_if<minkowski::MinkowskiProblem>(&input)) return *p;
  const auto d = minkowski::discretize_curvature(std::get<minkowski::CurvatureSample>(input));
  r.metrics["defect_before_correction"] = d.defect_before.norm();
  r.metrics["defect_after_correction"] = d.defect_after.norm();
  double corr = 0.0;
  for (double x : d.correction) corr = std::max(corr, std::abs(x));
  r.metrics["max_area_correction"] = corr;
  return d.problem;
}

}  // namespace

io::Report minkowski_solve(const RunConfig& c) {
  io::Report r = start(c);
  const minkowski::MinkowskiProblem p = load_minkowski(c, r);
  r.metrics["faces"] = p.normals.size();
  try {
    const minkowski::MinkowskiSolution s = minkowski::solve_minkowski(p, minkowski_options(c));
    r.metrics["iterations"] = s.iterations;
    r.metrics["residual"] = s.residual;
    r.metrics["volume"] = s.polytope.volume();
    r.metrics["centroid_norm"] = s.polytope.centroid().norm();
    r.metrics["volume_identity_error"] = identity_error(s);
    io::Table t{{"face", "nx", "ny", "nz", "target_area", "area", "support_number"}, {}};
    for (std::size_t i = 0; i < p.normals.size(); ++i)
      t.rows.push_back({i, p.normals[i].x(), p.normals[i].y(), p.normals[i].z(), p.areas[i], s.areas[i], s.support_numbers[i]});
    r.tables["faces"] = t;
    r.attachments["polytope"] = mesh_json(s.polytope);
  } catch (const DegenerateFace& e) {
    r.passed = false;
    r.metrics["error"] = e.what();
  } catch (const MaxIterExceeded& e) {
    r.passed = false;
    r.metrics["error"] = e.what();
    r.metrics["best_residual"] = e.best_residual();
  }
  return r;
}

io::Report minkowski_check(const RunConfig& c) {
  io::Report r = start(c);
  const minkowski::MinkowskiProblem p = load_minkowski(c, r);
  const Vec3 d = minkowski::check_closing(p);
  double total = 0.0;
  for (double a : p.areas) total += a;
  const double threshold = c.tol.value_or(1e-9);
  r.metrics["faces"] = p.normals.size();
  r.metrics["defect"] = vec_json(d);
  r.metrics["defect_norm"] = d.norm();
  r.metrics["relative_defect"] = d.norm() / total;
  r.metrics["threshold"] = threshold;
  r.metrics["positively_spanning"] = positively_spanning(p.normals);
  r.passed = d.norm() <= threshold * total && positively_spanning(p.normals);
  return r;
}

io::Report minkowski_roundtrip(const RunConfig& c) {
  io::Report r = start(c);
  if (c.faces < 4 || c.faces > 500) throw UsageError("--faces must be in [4, 500]");
  Rng rng(c.seed);
  io::Table t{{"trial", "faces", "iterations", "residual", "support_error", "volume_identity_error"}, {}};
  double worst = 0.0;
  for (std::size_t trial = 0; trial < c.count; ++trial) {
    const ConvexPolytope original = random_circumscribed(rng, c.faces).centered();
    const minkowski::MinkowskiProblem p{original.normals(), original.areas()};
    try {
      const auto s = minkowski::solve_minkowski(p, minkowski_options(c));
      double err = 0.0;
      for (std::size_t i = 0; i < p.normals.size(); ++i)
        err = std::max(err, std::abs(s.support_numbers[i] - original.support_numbers()[i]) /
                                std::max(std::abs(original.support_numbers()[i]), 1e-300));
      worst = std::max(worst, err);
      t.rows.push_back({trial, p.normals.size(), s.iterations, s.residual, err, identity_error(s)});
    } catch (const Error& e) {
      r.passed = false;
      t.rows.push_back({trial, p.normals.size(), nullptr, nullptr, nullptr, e.what()});
    }
  }
  r.tables["roundtrip"] = t;
  r.metrics["trials"] = c.count;
  r.metrics["max_support_error"] = worst;
  r.metrics["support_tolerance"] = 1e-6;
  if (worst > 1e-6) r.passed = false;
  return r;
}

namespace {

rigidity::TriangulatedSurface load_surface(const RunConfig& c) {
  const std::string& path = single_input(c);
  io::ProblemFile file = io::parse_problem(path);
  if (file.kind == io::ProblemKind::RigidityProblem) return std::get<rigidity::TriangulatedSurface>(file.payload);
  if (file.kind != io::ProblemKind::Mesh) throw SchemaError("expected a mesh or a rigidity problem");
  const auto& mesh = std::get<io::OffMesh>(file.payload);
  const bool triangles = std::all_of(mesh.faces.begin(), mesh.faces.end(), [](const auto& f) { return f.size() == 3; });
  if (triangles && c.split == "fan") return std::get<rigidity::TriangulatedSurface>(io::parse_problem(path, io::ProblemKind::RigidityProblem).payload);
  const ConvexPolytope p = io::polytope_from_off(mesh);
  if (c.split == "center") return rigidity::TriangulatedSurface::from_polytope_with_face_centers(p);
  return rigidity::TriangulatedSurface::from_polytope(p);
}

}  // namespace

io::Report rigidity_analyze(const RunConfig& c) {
  io::Report r = start(c);
  const rigidity::TriangulatedSurface s = load_surface(c);
  const rigidity::BendingSpace b = rigidity::bending_space(s, c.tol.value_or(1e-10));
  r.metrics = {{"vertices", s.vertices().size()},
               {"edges", s.edges().size()},
               {"triangles", s.triangles().size()},
               {"kernel_dim", b.kernel_dim},
               {"nontrivial_dim", b.nontrivial_dim},
               {"sigma_max", b.sigma_max},
               {"rank_threshold", b.threshold},
               {"trivial_residual", b.trivial_residual},
               {"flat_vertices", b.flat_vertices},
               {"spectrum_tail", b.spectrum_tail}};
  return r;
}

namespace {

rigidity::GridPatch load_patch(const RunConfig& c) {
  return std::get<rigidity::GridPatch>(io::parse_problem(single_input(c), io::ProblemKind::GridPatch).payload);
}

json grid_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (long i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (long k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    a.push_back(row);
  }
  return a;
}

void lemma_metrics(io::Report& r, const rigidity::GridPatch& g, double tol) {
  try {
    const auto lemma = rigidity::main_lemma_check(g, tol);
    r.metrics["lemma_checked_nodes"] = lemma.checked;
    r.metrics["lemma_max_det"] = lemma.max_det;
    r.metrics["lemma_violations"] = lemma.violations.size();
    if (!lemma.passed()) r.passed = false;
  } catch (const PrecisionWarning& e) {
    r.passed = false;
    r.metrics["error"] = e.what();
  }
}

}  // namespace

io::Report defo_solve(const RunConfig& c) {
  io::Report r = start(c);
  const rigidity::GridPatch g = load_patch(c);
  try {
    const rigidity::GridPatch s = rigidity::solve_defo(g);
    r.metrics["residual"] = rigidity::defo_residual(s);
    lemma_metrics(r, s, c.tol.value_or(1e-8));
    r.attachments["grid_patch"] = {{"kind", "grid-patch"}, {"h", s.h}, {"x0", s.x0}, {"y0", s.y0},
                                   {"z", grid_json(s.z)}, {"zeta", grid_json(s.zeta)}};
  } catch (const NotStrictlyConvex& e) {
    r.passed = false;
    r.metrics["error"] = e.what();
  }
  return r;
}

io::Report defo_check(const RunConfig& c) {
  io::Report r = start(c);
  const rigidity::GridPatch g = load_patch(c);
  r.metrics["residual"] = rigidity::defo_residual(g);
  lemma_metrics(r, g, c.tol.value_or(1e-8));
  return r;
}

}  // namespace convexkit::cli
