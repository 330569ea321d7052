#include "convexkit/metric/geodesic.hpp"

#include "convexkit/core/errors.hpp"

#include <limits>
#include <queue>

namespace convexkit::metric {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

// Orthogonal map x -> m x + t (rotation, possibly composed with a reflection).
struct Rigid {
  Eigen::Matrix2d m = Eigen::Matrix2d::Identity();
  Vec2 t = Vec2::Zero();

  Vec2 apply(const Vec2& x) const { return m * x + t; }
  Vec2 inverse(const Vec2& y) const { return m.transpose() * (y - t); }
};

// Rigid map sending segment [from0, from1] onto [to0, to1].
Rigid rigid_between(const Vec2& from0, const Vec2& from1, const Vec2& to0, const Vec2& to1) {
  const Vec2 a = from1 - from0, b = to1 - to0;
  const double angle = std::atan2(cross2(a, b), a.dot(b));
  Rigid r;
  r.m << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  r.t = to0 - r.m * from0;
  return r;
}

Rigid reflected_across(const Rigid& r, const Vec2& a, const Vec2& b) {
  const Vec2 d = (b - a).normalized();
  const Eigen::Matrix2d house = 2.0 * d * d.transpose() - Eigen::Matrix2d::Identity();
  Rigid out;
  out.m = house * r.m;
  out.t = house * (r.t - a) + a;
  return out;
}

Vec2 centroid_of(const std::vector<Vec2>& poly) {
  Vec2 c = Vec2::Zero();
  for (const Vec2& p : poly) c += p;
  return c / static_cast<double>(poly.size());
}

struct Node {
  std::size_t parent = kNone;
  std::size_t polygon = 0;
  Rigid frame;
  std::size_t entry_edge = kNone;
  Vec2 left = Vec2::Zero();  // window on the entry edge, counterclockwise from left to right
  Vec2 right = Vec2::Zero();
  std::size_t depth = 1;
  std::size_t source = 0;
};

void require_geodesic_ready(const MetricNet& net, Tolerance tol) {
  const ValidationReport v = validate_net(net, tol);
  if (!v.sphere_topology.passed || !v.equal_edges.passed)
    throw InvalidNet("shortest paths need a closed net with equal identified edges");
  for (std::size_t p = 0; p < net.polygon_count(); ++p)
    for (std::size_t k = 0; k < net.corner_count(p); ++k)
      if (net.corner_angle(Corner{p, k}) > kPi + 1e-12)
        throw InvalidNet("shortest paths need convex polygons; polygon " + std::to_string(p) + " is not");
}

}  // namespace

std::vector<SurfacePoint> equivalent_points(const MetricNet& net, const SurfacePoint& p, Tolerance tol) {
  if (p.polygon >= net.polygon_count()) throw InvalidArgument("surface point names a missing polygon");
  const auto& poly = net.polygons()[p.polygon];
  const double eps = tol.absolute(net.scale());
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Vec2& a = poly[k];
    const Vec2& b = poly[(k + 1) % poly.size()];
    if (cross2(b - a, p.position - a) < -eps * (b - a).norm())
      throw InvalidArgument("surface point lies outside its polygon");
  }
  for (std::size_t k = 0; k < poly.size(); ++k) {
    if ((poly[k] - p.position).norm() > eps) continue;
    std::vector<SurfacePoint> out;
    for (const Corner& c : net.class_corners(net.vertex_class(Corner{p.polygon, k})))
      out.push_back(SurfacePoint{c.polygon, net.corner(c.polygon, c.index)});
    return out;
  }
  std::vector<SurfacePoint> out{p};
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Vec2& a = poly[k];
    const Vec2& b = poly[(k + 1) % poly.size()];
    if (segment_distance(p.position, a, b) > eps) continue;
    const auto glue = net.partner(EdgeRef{p.polygon, k});
    if (!glue) continue;
    const double s = (p.position - a).dot(b - a) / (b - a).squaredNorm();
    const Vec2 g0 = net.corner(glue->edge.polygon, glue->edge.edge);
    const Vec2 g1 = net.corner(glue->edge.polygon, glue->edge.edge + 1);
    out.push_back(SurfacePoint{glue->edge.polygon, glue->reversed ? Vec2(g1 + s * (g0 - g1)) : Vec2(g0 + s * (g1 - g0))});
  }
  return out;
}

SurfacePoint GeodesicPath::point_at(double s) const {
  if (segments.empty()) return points.empty() ? SurfacePoint{} : points.front();
  s = std::clamp(s, 0.0, length);
  for (const PathSegment& seg : segments) {
    const double l = (seg.to - seg.from).norm();
    if (s <= l || &seg == &segments.back()) {
      const double t = l > 0.0 ? std::min(s / l, 1.0) : 0.0;
      return SurfacePoint{seg.polygon, seg.from + t * (seg.to - seg.from)};
    }
    s -= l;
  }
  return points.back();
}

GeodesicPath shortest_path(const MetricNet& net, const SurfacePoint& p, const SurfacePoint& q,
                           const GeodesicOptions& options) {
  require_geodesic_ready(net, options.tol);
  const double scale = net.scale();
  const double eps = options.tol.absolute(scale);
  const double angular = 1e-12;
  const double sliver = 1e-11 * scale;

  const std::vector<SurfacePoint> sources = equivalent_points(net, p, options.tol);
  const std::vector<SurfacePoint> targets = equivalent_points(net, q, options.tol);
  std::vector<std::vector<SurfacePoint>> targets_in(net.polygon_count());
  for (const SurfacePoint& t : targets) targets_in[t.polygon].push_back(t);

  std::vector<Node> nodes;
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;

  double best = std::numeric_limits<double>::infinity();
  std::size_t best_node = kNone;
  Vec2 best_end = Vec2::Zero();
  SurfacePoint best_target;
  double truncated_bound = std::numeric_limits<double>::infinity();

  auto in_wedge = [&](const Vec2& s, const Vec2& l, const Vec2& r, const Vec2& x) {
    const Vec2 sx = x - s, sl = l - s, sr = r - s;
    return cross2(sl, sx) >= -angular * sl.norm() * sx.norm() && cross2(sx, sr) >= -angular * sx.norm() * sr.norm();
  };

  auto push_child = [&](std::size_t parent_index, std::size_t edge, Vec2 left, Vec2 right) {
    const Node& parent = nodes[parent_index];
    const Vec2& s = sources[parent.source].position;
    if (cross2(left - s, right - s) < 0.0) std::swap(left, right);
    const double bound = segment_distance(s, left, right);
    if (bound >= best) return;
    if (parent.depth + 1 > options.max_faces) {
      truncated_bound = std::min(truncated_bound, bound);
      return;
    }
    const Gluing glue = *net.partner(EdgeRef{parent.polygon, edge});
    const Vec2 a = parent.frame.apply(net.corner(parent.polygon, edge));
    const Vec2 b = parent.frame.apply(net.corner(parent.polygon, edge + 1));
    const std::size_t g = glue.edge.polygon;
    const Vec2 g_a = net.corner(g, glue.reversed ? glue.edge.edge + 1 : glue.edge.edge);
    const Vec2 g_b = net.corner(g, glue.reversed ? glue.edge.edge : glue.edge.edge + 1);
    Rigid frame = rigid_between(g_a, g_b, a, b);
    const Vec2 parent_inside = parent.frame.apply(centroid_of(net.polygons()[parent.polygon]));
    const Vec2 child_inside = frame.apply(centroid_of(net.polygons()[g]));
    if (cross2(b - a, parent_inside - a) * cross2(b - a, child_inside - a) > 0.0) frame = reflected_across(frame, a, b);
    Node child;
    child.parent = parent_index;
    child.polygon = g;
    child.frame = frame;
    child.entry_edge = glue.edge.edge;
    child.left = left;
    child.right = right;
    child.depth = parent.depth + 1;
    child.source = parent.source;
    nodes.push_back(child);
    queue.emplace(bound, nodes.size() - 1);
  };

  for (std::size_t si = 0; si < sources.size(); ++si) {
    const SurfacePoint& src = sources[si];
    Node root;
    root.polygon = src.polygon;
    root.source = si;
    nodes.push_back(root);
    const std::size_t root_index = nodes.size() - 1;
    for (const SurfacePoint& t : targets_in[src.polygon]) {
      const double d = (t.position - src.position).norm();
      if (d < best) {
        best = d;
        best_node = root_index;
        best_end = t.position;
        best_target = t;
      }
    }
    const auto& poly = net.polygons()[src.polygon];
    for (std::size_t k = 0; k < poly.size(); ++k) {
      const Vec2& a = poly[k];
      const Vec2& b = poly[(k + 1) % poly.size()];
      if (std::abs(cross2(b - a, src.position - a)) <= eps * (b - a).norm()) continue;
      push_child(root_index, k, a, b);
    }
  }

  std::size_t explored = 0;
  while (!queue.empty()) {
    const auto [bound, index] = queue.top();
    queue.pop();
    if (bound >= best) break;
    if (++explored > options.max_sequences)
      throw SearchBudgetExceeded("shortest path search exceeded " + std::to_string(options.max_sequences) +
                                 " unfolded sequences");
    const Node node = nodes[index];
    const Vec2& s = sources[node.source].position;
    for (const SurfacePoint& t : targets_in[node.polygon]) {
      const Vec2 end = node.frame.apply(t.position);
      if (!in_wedge(s, node.left, node.right, end)) continue;
      const double d = (end - s).norm();
      if (d < best) {
        best = d;
        best_node = index;
        best_end = end;
        best_target = t;
      }
    }
    const auto& poly = net.polygons()[node.polygon];
    const Vec2 sl = node.left - s, sr = node.right - s;
    for (std::size_t k = 0; k < poly.size(); ++k) {
      if (k == node.entry_edge) continue;
      const Vec2 p0 = node.frame.apply(poly[k]);
      const Vec2 p1 = node.frame.apply(poly[(k + 1) % poly.size()]);
      const Vec2 dir = p1 - p0;
      double lo = 0.0, hi = 1.0;
      // Keep cross(sl, p(s) - s) >= 0 and cross(p(s) - s, sr) >= 0. Slivers
      // along rays through a vertex are dropped; targets on such rays are
      // still caught by the closed wedge test of the neighboring sequence.
      auto restrict = [&](double c0, double c1) {
        if (c1 > 0.0) lo = std::max(lo, -c0 / c1);
        else if (c1 < 0.0) hi = std::min(hi, -c0 / c1);
        else if (c0 < 0.0) hi = -1.0;
      };
      restrict(cross2(sl, p0 - s), cross2(sl, dir));
      restrict(cross2(p0 - s, sr), cross2(dir, sr));
      if (hi - lo <= 0.0 || (hi - lo) * dir.norm() <= sliver) continue;
      push_child(index, k, p0 + lo * dir, p0 + hi * dir);
    }
  }

  if (best_node == kNone) throw SearchBudgetExceeded("no unfolding within the face-sequence bound reaches the target");
  if (truncated_bound < best - eps)
    throw SearchBudgetExceeded("face-sequence bound " + std::to_string(options.max_faces) +
                               " prevents certifying the shortest path");

  // Rebuild the polygon sequence and the edge crossings.
  std::vector<std::size_t> chain;
  for (std::size_t i = best_node; i != kNone; i = nodes[i].parent) chain.push_back(i);
  std::reverse(chain.begin(), chain.end());
  const Vec2 start = sources[nodes[chain.front()].source].position;
  const Vec2 dir = best_end - start;

  GeodesicPath path;
  path.length = best;
  path.explored_sequences = explored;
  path.points.push_back(sources[nodes[chain.front()].source]);
  std::vector<Vec2> unfolded{start};
  for (std::size_t i = 1; i < chain.size(); ++i) {
    const Node& n = nodes[chain[i]];
    const Vec2 a = n.frame.apply(net.corner(n.polygon, n.entry_edge));
    const Vec2 b = n.frame.apply(net.corner(n.polygon, n.entry_edge + 1));
    const double denom = cross2(dir, b - a);
    const double t = std::abs(denom) > 0.0 ? cross2(a - start, b - a) / denom : 0.0;
    const Vec2 x = start + std::clamp(t, 0.0, 1.0) * dir;
    unfolded.push_back(x);
    path.points.push_back(SurfacePoint{n.polygon, n.frame.inverse(x)});
  }
  unfolded.push_back(best_end);
  path.points.push_back(best_target);
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const Node& n = nodes[chain[i]];
    path.faces.push_back(n.polygon);
    path.segments.push_back(PathSegment{n.polygon, n.frame.inverse(unfolded[i]), n.frame.inverse(unfolded[i + 1])});
  }
  return path;
}

double intrinsic_distance(const MetricNet& net, const SurfacePoint& p, const SurfacePoint& q,
                          const GeodesicOptions& options) {
  return shortest_path(net, p, q, options).length;
}

}  // namespace convexkit::metric
