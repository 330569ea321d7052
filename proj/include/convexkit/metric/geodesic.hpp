#pragma once

#include "convexkit/metric/net.hpp"

#include <cstddef>
#include <vector>

namespace convexkit::metric {

/// A point of the glued surface, given by a polygon and planar coordinates
/// inside it. Points on edges or corners have several equivalent
/// representations.
struct SurfacePoint {
  std::size_t polygon = 0;
  Vec2 position = Vec2::Zero();
};

/// Straight piece of a geodesic inside one polygon, in that polygon's
/// coordinates.
struct PathSegment {
  std::size_t polygon = 0;
  Vec2 from = Vec2::Zero();
  Vec2 to = Vec2::Zero();
};

/// Polygon path that unfolds to a straight segment.
struct GeodesicPath {
  std::vector<SurfacePoint> points;  // start, edge crossings, end
  std::vector<std::size_t> faces;    // polygon sequence
  std::vector<PathSegment> segments;
  double length = 0.0;
  std::size_t explored_sequences = 0;

  /// Point at arc length `s` from the start (clamped to [0, length]).
  SurfacePoint point_at(double s) const;
};

struct GeodesicOptions {
  /// Longest polygon sequence the search may unfold.
  std::size_t max_faces = 32;
  /// Hard cap on unfolded sequences.
  std::size_t max_sequences = 2'000'000;
  Tolerance tol;
};

/// Shortest path between two surface points by exhaustive unfolding with a
/// priority queue on straight-line lower bounds. Visibility windows restrict
/// every unfolded polygon sequence to the straight segments that can still
/// pass through it. Throws InvalidNet if the net fails conditions (1) or (2)
/// or has non-convex polygons, and SearchBudgetExceeded when the face-sequence
/// bound prevents certifying the minimum.
GeodesicPath shortest_path(const MetricNet& net, const SurfacePoint& p, const SurfacePoint& q,
                           const GeodesicOptions& options = {});

/// Length of shortest_path.
double intrinsic_distance(const MetricNet& net, const SurfacePoint& p, const SurfacePoint& q,
                          const GeodesicOptions& options = {});

/// All representations of `p` (several for edge and corner points).
std::vector<SurfacePoint> equivalent_points(const MetricNet& net, const SurfacePoint& p, Tolerance tol = {});

}  // namespace convexkit::metric
