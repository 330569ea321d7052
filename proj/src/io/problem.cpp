#include "convexkit/io/problem.hpp"

#include "convexkit/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace convexkit::io {

using nlohmann::json;

namespace {

const std::pair<ProblemKind, const char*> kKindNames[] = {
    {ProblemKind::Mesh, "mesh"},
    {ProblemKind::Net, "net"},
    {ProblemKind::MAProblem, "ma-problem"},
    {ProblemKind::MinkowskiProblem, "minkowski-problem"},
    {ProblemKind::RigidityProblem, "rigidity-problem"},
    {ProblemKind::GridPatch, "grid-patch"},
};

[[noreturn]] void bad_field(const std::string& field, const std::string& what) {
  throw ParseError(what, 0, field);
}

const json& member(const json& obj, const std::string& key, const std::string& path = {}) {
  const std::string field = path.empty() ? key : path + "." + key;
  if (!obj.is_object()) bad_field(path.empty() ? "(root)" : path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) bad_field(field, "missing required field");
  return *it;
}

const json* optional_member(const json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) bad_field(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad_field(field, "number is not finite");
  return v;
}

std::size_t index(const json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 0) bad_field(field, "expected a non-negative integer");
  return j.get<std::size_t>();
}

const json& array(const json& j, const std::string& field) {
  if (!j.is_array()) bad_field(field, "expected an array");
  return j;
}

std::string at(const std::string& field, std::size_t i) { return field + "[" + std::to_string(i) + "]"; }

template <int N>
Eigen::Matrix<double, N, 1> vec(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != N) bad_field(field, "expected an array of " + std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> v;
  for (int k = 0; k < N; ++k) v[k] = number(j[static_cast<std::size_t>(k)], at(field, static_cast<std::size_t>(k)));
  return v;
}

template <int N>
std::vector<Eigen::Matrix<double, N, 1>> vec_list(const json& j, const std::string& field) {
  std::vector<Eigen::Matrix<double, N, 1>> out;
  for (std::size_t i = 0; i < array(j, field).size(); ++i) out.push_back(vec<N>(j[i], at(field, i)));
  return out;
}

std::vector<double> number_list(const json& j, const std::string& field) {
  std::vector<double> out;
  for (std::size_t i = 0; i < array(j, field).size(); ++i) out.push_back(number(j[i], at(field, i)));
  return out;
}

std::vector<std::size_t> index_list(const json& j, const std::string& field) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < array(j, field).size(); ++i) out.push_back(index(j[i], at(field, i)));
  return out;
}

Eigen::MatrixXd grid(const json& j, const std::string& field) {
  const std::size_t rows = array(j, field).size();
  if (rows == 0) bad_field(field, "grid is empty");
  const std::size_t cols = array(j[0], at(field, 0)).size();
  Eigen::MatrixXd m(static_cast<long>(rows), static_cast<long>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (array(j[i], at(field, i)).size() != cols) bad_field(at(field, i), "grid rows differ in length");
    for (std::size_t k = 0; k < cols; ++k)
      m(static_cast<long>(i), static_cast<long>(k)) = number(j[i][k], at(at(field, i), k));
  }
  return m;
}

ma::Weight weight(const json& j, const std::string& field) {
  if (j.is_number()) return ma::Weight::constant(number(j, field));
  if (!j.is_string()) bad_field(field, "expected an expression string, a number or null");
  try {
    return ma::Weight::parse(j.get<std::string>());
  } catch (const ParseError& e) {
    throw ParseError(std::string("bad expression: ") + e.what(), 0, field);
  }
}

OffMesh parse_mesh(const json& j) {
  OffMesh mesh;
  mesh.vertices = vec_list<3>(member(j, "vertices"), "vertices");
  const json& faces = array(member(j, "faces"), "faces");
  for (std::size_t f = 0; f < faces.size(); ++f) {
    mesh.faces.push_back(index_list(faces[f], at("faces", f)));
    if (mesh.faces.back().size() < 3) throw SchemaError("face " + std::to_string(f) + " has fewer than 3 corners");
    for (std::size_t v : mesh.faces.back())
      if (v >= mesh.vertices.size()) throw SchemaError("face " + std::to_string(f) + " references a missing vertex");
  }
  return mesh;
}

metric::EdgeRef edge_ref(const json& j, const std::string& field) {
  const auto v = index_list(j, field);
  if (v.size() != 2) bad_field(field, "edge reference is [polygon, edge]");
  return {v[0], v[1]};
}

metric::MetricNet parse_net(const json& j) {
  std::vector<std::vector<Vec2>> polygons;
  const json& polys = array(member(j, "polygons"), "polygons");
  for (std::size_t p = 0; p < polys.size(); ++p) polygons.push_back(vec_list<2>(polys[p], at("polygons", p)));
  std::vector<metric::Identification> ids;
  const json& list = array(member(j, "identifications"), "identifications");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string field = at("identifications", i);
    metric::Identification id;
    if (list[i].is_object()) {
      id.a = edge_ref(member(list[i], "a", field), field + ".a");
      id.b = edge_ref(member(list[i], "b", field), field + ".b");
      if (const json* r = optional_member(list[i], "reversed")) {
        if (!r->is_boolean()) bad_field(field + ".reversed", "expected a boolean");
        id.reversed = r->get<bool>();
      }
    } else {
      if (!list[i].is_array() || list[i].size() != 2) bad_field(field, "identification is [[p, e], [q, f]]");
      id.a = edge_ref(list[i][0], at(field, 0));
      id.b = edge_ref(list[i][1], at(field, 1));
    }
    ids.push_back(id);
  }
  try {
    return metric::MetricNet(std::move(polygons), std::move(ids));
  } catch (const InvalidNet& e) {
    throw SchemaError(e.what());
  }
}

ma::MAProblem parse_ma(const json& j) {
  ma::MAProblem p;
  p.domain = vec_list<2>(member(j, "domain"), "domain");
  p.interior_nodes = vec_list<2>(member(j, "nodes"), "nodes");
  if (const json* m = optional_member(j, "masses")) p.masses = number_list(*m, "masses");
  const json& boundary = array(member(j, "boundary"), "boundary");
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    const Eigen::Vector3d b = vec<3>(boundary[i], at("boundary", i));
    p.boundary_nodes.emplace_back(b.x(), b.y());
    p.boundary_values.push_back(b.z());
  }
  if (const json* t = optional_member(j, "theta")) p.theta = weight(*t, "theta");
  if (const json* d = optional_member(j, "density")) p.density = weight(*d, "density");
  if (p.masses.empty() && !p.density) bad_field("masses", "either masses or a density is required");
  try {
    if (p.masses.empty()) p.masses = ma::masses_from_density(p);
    ma::validate_problem(p);
  } catch (const InvalidArgument& e) {
    throw SchemaError(e.what());
  }
  return p;
}

MinkowskiInput parse_minkowski(const json& j) {
  if (const json* c = optional_member(j, "curvature")) {
    minkowski::CurvatureSample s;
    const json& cells = array(member(*c, "cells", "curvature"), "curvature.cells");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const Eigen::Vector4d cell = vec<4>(cells[i], at("curvature.cells", i));
      const Vec3 n = cell.head<3>();
      if (!(n.norm() > 0.0)) throw SchemaError("cell " + std::to_string(i) + " has a zero center");
      s.centers.push_back(n.normalized());
      s.cell_areas.push_back(cell[3]);
    }
    s.curvature = number_list(member(*c, "K", "curvature"), "curvature.K");
    if (s.curvature.size() != s.centers.size()) throw SchemaError("one curvature value per cell required");
    for (std::size_t i = 0; i < s.cell_areas.size(); ++i)
      if (!(s.cell_areas[i] > 0.0)) throw SchemaError("cell " + std::to_string(i) + " has non-positive area");
    return s;
  }
  minkowski::MinkowskiProblem p;
  p.normals = vec_list<3>(member(j, "normals"), "normals");
  p.areas = number_list(member(j, "areas"), "areas");
  if (p.normals.size() != p.areas.size()) throw SchemaError("one area per normal required");
  for (std::size_t i = 0; i < p.normals.size(); ++i) {
    if (!(p.normals[i].norm() > 0.0)) throw SchemaError("normal " + std::to_string(i) + " is zero");
    p.normals[i].normalize();
    if (!(p.areas[i] > 0.0)) throw SchemaError("area " + std::to_string(i) + " is not positive");
  }
  return p;
}

rigidity::TriangulatedSurface surface(std::vector<Vec3> vertices, const std::vector<std::vector<std::size_t>>& faces,
                                      bool with_boundary) {
  std::vector<rigidity::Triangle> tris;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (faces[f].size() != 3) throw SchemaError("face " + std::to_string(f) + " is not a triangle");
    tris.push_back({faces[f][0], faces[f][1], faces[f][2]});
  }
  return rigidity::TriangulatedSurface(std::move(vertices), std::move(tris), with_boundary);
}

rigidity::TriangulatedSurface parse_rigidity(const json& j) {
  std::vector<std::vector<std::size_t>> faces;
  const json& tris = array(member(j, "triangles"), "triangles");
  for (std::size_t t = 0; t < tris.size(); ++t) faces.push_back(index_list(tris[t], at("triangles", t)));
  bool with_boundary = false;
  if (const json* b = optional_member(j, "with_boundary")) {
    if (!b->is_boolean()) bad_field("with_boundary", "expected a boolean");
    with_boundary = b->get<bool>();
  }
  return surface(vec_list<3>(member(j, "vertices"), "vertices"), faces, with_boundary);
}

rigidity::GridPatch parse_grid(const json& j) {
  rigidity::GridPatch g;
  g.h = number(member(j, "h"), "h");
  if (!(g.h > 0.0)) throw SchemaError("grid spacing h must be positive");
  if (const json* x = optional_member(j, "x0")) g.x0 = number(*x, "x0");
  if (const json* y = optional_member(j, "y0")) g.y0 = number(*y, "y0");
  g.z = grid(member(j, "z"), "z");
  if (const json* s = optional_member(j, "zeta")) {
    g.zeta = grid(*s, "zeta");
    if (g.zeta.rows() != g.z.rows() || g.zeta.cols() != g.z.cols()) throw SchemaError("z and zeta grids differ in shape");
  } else {
    g.zeta = Eigen::MatrixXd::Zero(g.z.rows(), g.z.cols());
  }
  if (g.z.rows() < 3 || g.z.cols() < 3) throw SchemaError("grid patch needs at least 3 nodes per axis");
  return g;
}

int line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

void expect(ProblemKind got, std::optional<ProblemKind> expected) {
  if (expected && *expected != got)
    throw SchemaError("expected a " + to_string(*expected) + " file, got " + to_string(got));
}

}  // namespace

std::string to_string(ProblemKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "unknown";
}

ProblemKind problem_kind_from_string(const std::string& name) {
  for (const auto& [k, n] : kKindNames)
    if (name == n) return k;
  throw ParseError("unknown problem kind '" + name + "'", 0, "kind");
}

ProblemFile parse_problem_json(const std::string& text, std::optional<ProblemKind> expected) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), line_of(text, e.byte));
  }
  const json& kind = member(j, "kind");
  if (!kind.is_string()) bad_field("kind", "expected a string");
  const ProblemKind k = problem_kind_from_string(kind.get<std::string>());
  expect(k, expected);
  switch (k) {
    case ProblemKind::Mesh: return {k, parse_mesh(j)};
    case ProblemKind::Net: return {k, parse_net(j)};
    case ProblemKind::MAProblem: return {k, parse_ma(j)};
    case ProblemKind::MinkowskiProblem: return {k, parse_minkowski(j)};
    case ProblemKind::RigidityProblem: return {k, parse_rigidity(j)};
    case ProblemKind::GridPatch: return {k, parse_grid(j)};
  }
  throw ParseError("unknown problem kind", 0, "kind");
}

ProblemFile parse_problem(const std::filesystem::path& path, std::optional<ProblemKind> expected) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "': file not found or unreadable");
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".off") {
    OffMesh mesh = read_off(in);
    if (expected == ProblemKind::RigidityProblem) return {*expected, surface(mesh.vertices, mesh.faces, false)};
    expect(ProblemKind::Mesh, expected);
    return {ProblemKind::Mesh, std::move(mesh)};
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_problem_json(buffer.str(), expected);
}

namespace {

template <typename V>
json vec_json(const V& v) {
  json a = json::array();
  for (long k = 0; k < v.size(); ++k) a.push_back(v[k]);
  return a;
}

template <typename V>
json vec_list_json(const std::vector<V>& list) {
  json a = json::array();
  for (const V& v : list) a.push_back(vec_json(v));
  return a;
}

json grid_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (long i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (long k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    a.push_back(std::move(row));
  }
  return a;
}

}  // namespace

json problem_to_json(const ProblemFile& problem) {
  json j;
  j["kind"] = to_string(problem.kind);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, OffMesh>) {
          j["vertices"] = vec_list_json(p.vertices);
          j["faces"] = p.faces;
        } else if constexpr (std::is_same_v<T, metric::MetricNet>) {
          json polys = json::array();
          for (const auto& poly : p.polygons()) polys.push_back(vec_list_json(poly));
          j["polygons"] = polys;
          json ids = json::array();
          for (const auto& id : p.identifications())
            ids.push_back({{"a", {id.a.polygon, id.a.edge}}, {"b", {id.b.polygon, id.b.edge}}, {"reversed", id.reversed}});
          j["identifications"] = ids;
        } else if constexpr (std::is_same_v<T, ma::MAProblem>) {
          j["domain"] = vec_list_json(p.domain);
          j["nodes"] = vec_list_json(p.interior_nodes);
          j["masses"] = p.masses;
          json b = json::array();
          for (std::size_t i = 0; i < p.boundary_nodes.size(); ++i)
            b.push_back({p.boundary_nodes[i].x(), p.boundary_nodes[i].y(), p.boundary_values[i]});
          j["boundary"] = b;
          j["theta"] = p.theta.text();
          if (p.density) j["density"] = p.density->text();
        } else if constexpr (std::is_same_v<T, MinkowskiInput>) {
          if (const auto* m = std::get_if<minkowski::MinkowskiProblem>(&p)) {
            j["normals"] = vec_list_json(m->normals);
            j["areas"] = m->areas;
          } else {
            const auto& s = std::get<minkowski::CurvatureSample>(p);
            json cells = json::array();
            for (std::size_t i = 0; i < s.centers.size(); ++i)
              cells.push_back({s.centers[i].x(), s.centers[i].y(), s.centers[i].z(), s.cell_areas[i]});
            j["curvature"] = {{"cells", cells}, {"K", s.curvature}};
          }
        } else if constexpr (std::is_same_v<T, rigidity::TriangulatedSurface>) {
          j["vertices"] = vec_list_json(p.vertices());
          j["triangles"] = p.triangles();
          j["with_boundary"] = p.with_boundary();
        } else {
          j["h"] = p.h;
          j["x0"] = p.x0;
          j["y0"] = p.y0;
          j["z"] = grid_json(p.z);
          j["zeta"] = grid_json(p.zeta);
        }
      },
      problem.payload);
  return j;
}

}  // namespace convexkit::io
