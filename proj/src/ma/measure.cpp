#include "convexkit/ma/measure.hpp"

#include "convexkit/core/errors.hpp"

#include <array>
#include <cmath>

namespace convexkit::ma {

namespace {

// Halfplane <a, p> <= b.
struct Line {
  Vec2 a;
  double b;
  std::size_t owner;
};

struct LabeledPolygon {
  std::vector<Vec2> vertices;
  std::vector<Line> edges;  // edge k starts at vertices[k]
};

Vec2 meet(const Line& l1, const Line& l2, const Vec2& fallback) {
  const double det = l1.a.x() * l2.a.y() - l1.a.y() * l2.a.x();
  const double scale = l1.a.norm() * l2.a.norm();
  if (std::abs(det) <= 1e-15 * scale) return fallback;
  return Vec2((l1.b * l2.a.y() - l2.b * l1.a.y()) / det, (l1.a.x() * l2.b - l2.a.x() * l1.b) / det);
}

void clip(LabeledPolygon& poly, const Line& line) {
  const std::size_t n = poly.vertices.size();
  std::vector<double> d(n);
  std::vector<char> inside(n);
  bool any_out = false, any_in = false;
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2& v = poly.vertices[k];
    d[k] = line.a.dot(v) - line.b;
    inside[k] = d[k] <= 1e-14 * (line.a.norm() * v.norm() + std::abs(line.b));
    (inside[k] ? any_in : any_out) = true;
  }
  if (!any_out) return;
  if (!any_in) {
    poly.vertices.clear();
    poly.edges.clear();
    return;
  }
  LabeledPolygon out;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t next = (k + 1) % n;
    if (inside[k]) {
      out.vertices.push_back(poly.vertices[k]);
      out.edges.push_back(poly.edges[k]);
    }
    if (inside[k] != inside[next]) {
      const double t = d[k] / (d[k] - d[next]);
      const Vec2 guess = poly.vertices[k] + t * (poly.vertices[next] - poly.vertices[k]);
      out.vertices.push_back(meet(poly.edges[k], line, guess));
      out.edges.push_back(inside[k] ? line : poly.edges[k]);
    }
  }
  // Drop zero-length edges.
  LabeledPolygon clean;
  const std::size_t m = out.vertices.size();
  for (std::size_t k = 0; k < m; ++k) {
    const Vec2& v = out.vertices[k];
    const Vec2& w = out.vertices[(k + 1) % m];
    if ((v - w).norm() <= 1e-14 * (v.norm() + w.norm())) continue;
    clean.vertices.push_back(v);
    clean.edges.push_back(out.edges[k]);
  }
  if (clean.vertices.size() < 3) clean = {};
  poly = std::move(clean);
}

LabeledPolygon box(double size) {
  LabeledPolygon p;
  p.vertices = {Vec2(-size, -size), Vec2(size, -size), Vec2(size, size), Vec2(-size, size)};
  p.edges = {Line{Vec2(0, -1), size, kBoxEdge}, Line{Vec2(1, 0), size, kBoxEdge}, Line{Vec2(0, 1), size, kBoxEdge},
             Line{Vec2(-1, 0), size, kBoxEdge}};
  return p;
}

LabeledPolygon window_polygon(const std::vector<Vec2>& w) {
  if (w.size() < 3 || signed_area(w) <= 0.0) throw InvalidArgument("cell window must be a counterclockwise polygon");
  LabeledPolygon p;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const Vec2 e = w[(k + 1) % w.size()] - w[k];
    const Vec2 n(e.y(), -e.x());
    p.vertices.push_back(w[k]);
    p.edges.push_back(Line{n, n.dot(w[k]), kWindowEdge});
  }
  return p;
}

LabeledPolygon clip_cell(const PLConvexFunction& u, std::size_t i, LabeledPolygon poly) {
  const Vec2& xi = u.nodes[i];
  // Nearest nodes first: the polygon shrinks early and later clips are cheap.
  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(u.nodes.size());
  for (std::size_t j = 0; j < u.nodes.size(); ++j)
    if (j != i) order.emplace_back((u.nodes[j] - xi).squaredNorm(), j);
  std::sort(order.begin(), order.end());
  for (const auto& [dist, j] : order) {
    if (dist == 0.0) throw InvalidArgument("duplicate nodes in piecewise-linear function");
    clip(poly, Line{u.nodes[j] - xi, u.values[j] - u.values[i], j});
    if (poly.vertices.empty()) break;
  }
  return poly;
}

SubgradientCell make_cell(std::size_t node, const LabeledPolygon& poly, bool clipped) {
  SubgradientCell cell;
  cell.node = node;
  cell.polygon = poly.vertices;
  for (const Line& l : poly.edges) cell.edge_owner.push_back(l.owner);
  cell.area = cell.polygon.size() >= 3 ? std::max(0.0, signed_area(cell.polygon)) : 0.0;
  cell.mass = cell.area;
  cell.clipped = clipped;
  return cell;
}

void check_function(const PLConvexFunction& u, std::size_t node) {
  if (u.nodes.size() != u.values.size()) throw InvalidArgument("one value per node required");
  if (node >= u.nodes.size()) throw InvalidArgument("node index out of range");
}

// Triangle rule of degree 5 (7 points).
constexpr std::array<std::array<double, 3>, 7> kRule = {{
    {1.0 / 3.0, 1.0 / 3.0, 0.225},
    {0.059715871789770, 0.470142064105115, 0.132394152788506},
    {0.470142064105115, 0.059715871789770, 0.132394152788506},
    {0.470142064105115, 0.470142064105115, 0.132394152788506},
    {0.797426985353087, 0.101286507323456, 0.125939180544827},
    {0.101286507323456, 0.797426985353087, 0.125939180544827},
    {0.101286507323456, 0.101286507323456, 0.125939180544827},
}};

double triangle_rule(const Vec2& a, const Vec2& b, const Vec2& c, const std::function<double(const Vec2&)>& f) {
  const double area = 0.5 * std::abs(cross2(b - a, c - a));
  double sum = 0.0;
  for (const auto& q : kRule) {
    const double v = f(q[0] * a + q[1] * b + (1.0 - q[0] - q[1]) * c);
    if (!std::isfinite(v)) throw QuadratureFailure("weight is not finite inside a cell");
    sum += q[2] * v;
  }
  return area * sum;
}

struct Piece {
  Vec2 a, b, c;
  double coarse;   // 7-point value on the whole triangle
  double refined;  // sum of the 7-point values on its four children
  double child[4];
  double error() const { return std::abs(refined - coarse); }
};

Piece make_piece(const Vec2& a, const Vec2& b, const Vec2& c, double coarse,
                 const std::function<double(const Vec2&)>& f) {
  Piece p{a, b, c, coarse, 0.0, {}};
  const Vec2 ab = 0.5 * (a + b), bc = 0.5 * (b + c), ca = 0.5 * (c + a);
  p.child[0] = triangle_rule(a, ab, ca, f);
  p.child[1] = triangle_rule(ab, b, bc, f);
  p.child[2] = triangle_rule(ca, bc, c, f);
  p.child[3] = triangle_rule(ab, bc, ca, f);
  p.refined = p.child[0] + p.child[1] + p.child[2] + p.child[3];
  return p;
}

}  // namespace

SubgradientCell subgradient_cell(const PLConvexFunction& u, std::size_t node,
                                 const std::optional<std::vector<Vec2>>& window) {
  check_function(u, node);
  if (window) return make_cell(node, clip_cell(u, node, window_polygon(*window)), true);
  double slope = 0.0;
  for (std::size_t j = 0; j < u.nodes.size(); ++j)
    if (j != node)
      slope = std::max(slope, std::abs(u.values[j] - u.values[node]) / (u.nodes[j] - u.nodes[node]).norm());
  LabeledPolygon poly;
  for (double size = 1e6 * (slope + 1.0); size <= 1e18 * (slope + 1.0); size *= 1e6) {
    poly = clip_cell(u, node, box(size));
    bool touches_box = false;
    for (const Line& l : poly.edges) touches_box = touches_box || l.owner == kBoxEdge;
    if (!touches_box) return make_cell(node, poly, false);
  }
  throw UnboundedCell("node " + std::to_string(node) + " has an unbounded subgradient cell; supply a window");
}

SubgradientCell ma_measure(const PLConvexFunction& u, std::size_t node, const std::optional<std::vector<Vec2>>& window) {
  SubgradientCell cell = subgradient_cell(u, node, window);
  if (cell.polygon.empty() && !window)
    throw NotEnvelopeVertex("node " + std::to_string(node) + " lies above the lower convex envelope");
  return cell;
}

std::vector<std::size_t> nodes_above_envelope(const PLConvexFunction& u) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < u.nodes.size(); ++i) {
    try {
      if (subgradient_cell(u, i).polygon.empty()) out.push_back(i);
    } catch (const UnboundedCell&) {
      // Unbounded cells are non-empty.
    }
  }
  return out;
}

double integrate_polygon(std::span<const Vec2> polygon, const std::function<double(const Vec2&)>& f,
                         const QuadratureOptions& options) {
  if (polygon.size() < 3 || signed_area(polygon) == 0.0) return 0.0;
  // Global adaptivity: always split the piece with the largest error estimate.
  auto worse = [](const Piece& x, const Piece& y) { return x.error() < y.error(); };
  std::vector<Piece> heap;
  double total = 0.0, error = 0.0;
  for (std::size_t k = 1; k + 1 < polygon.size(); ++k) {
    const Piece p = make_piece(polygon[0], polygon[k], polygon[k + 1],
                               triangle_rule(polygon[0], polygon[k], polygon[k + 1], f), f);
    total += p.refined;
    error += p.error();
    heap.push_back(p);
  }
  std::make_heap(heap.begin(), heap.end(), worse);
  const std::size_t budget = std::size_t{1} << (2 * std::min(options.max_depth, 12));
  while (error > options.relative_tolerance * std::abs(total) && heap.size() < budget) {
    std::pop_heap(heap.begin(), heap.end(), worse);
    const Piece p = heap.back();
    heap.pop_back();
    total -= p.refined;
    error -= p.error();
    const Vec2 ab = 0.5 * (p.a + p.b), bc = 0.5 * (p.b + p.c), ca = 0.5 * (p.c + p.a);
    const Piece kids[4] = {make_piece(p.a, ab, ca, p.child[0], f), make_piece(ab, p.b, bc, p.child[1], f),
                           make_piece(ca, bc, p.c, p.child[2], f), make_piece(ab, bc, ca, p.child[3], f)};
    for (const Piece& k : kids) {
      total += k.refined;
      error += k.error();
      heap.push_back(k);
      std::push_heap(heap.begin(), heap.end(), worse);
    }
    error = std::max(error, 0.0);
  }
  return total;
}

double cell_mass(const SubgradientCell& cell, const PLConvexFunction& u, const Weight& theta,
                 const QuadratureOptions& options) {
  const double z = u.values[cell.node];
  const Vec2& x = u.nodes[cell.node];
  if (!theta.uses_p()) {
    const double w = theta(Vec2::Zero(), z, x);
    if (!std::isfinite(w)) throw QuadratureFailure("weight is not finite");
    return w * cell.area;
  }
  return integrate_polygon(cell.polygon, [&](const Vec2& p) { return theta(p, z, x); }, options);
}

double conditional_curvature(const PLConvexFunction& u, std::size_t node, const Weight& theta,
                             const QuadratureOptions& options, const std::optional<std::vector<Vec2>>& window) {
  return cell_mass(ma_measure(u, node, window), u, theta, options);
}

double edge_integral(const Vec2& a, const Vec2& b, const Weight& theta, double z, const Vec2& x) {
  static constexpr double node[5] = {-0.906179845938664, -0.538469310105683, 0.0, 0.538469310105683,
                                     0.906179845938664};
  static constexpr double weight[5] = {0.236926885056189, 0.478628670499366, 0.568888888888889,
                                       0.478628670499366, 0.236926885056189};
  const double length = (b - a).norm();
  if (!theta.uses_p()) return theta(Vec2::Zero(), z, x) * length;
  constexpr int panels = 8;
  double sum = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double t0 = static_cast<double>(k) / panels, t1 = static_cast<double>(k + 1) / panels;
    for (int q = 0; q < 5; ++q) {
      const double t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * node[q];
      sum += 0.5 * (t1 - t0) * weight[q] * theta(a + t * (b - a), z, x);
    }
  }
  return sum * length;
}

}  // namespace convexkit::ma
