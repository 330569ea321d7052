#pragma once

#include "convexkit/metric/geodesic.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace convexkit::metric {

/// Angle at the apex of the planar triangle with sides x, y (adjacent) and
/// d (opposite). Throws TriangleInequalityViolated unless x, y > 0 and
/// |x - y| <= d <= x + y up to rounding.
double comparison_angle(double x, double y, double d);

struct ScanOptions {
  /// Cap on the scanned lengths along each path; unset scans the full paths.
  std::optional<double> radius;
  /// Allowed increase of the comparison angle between consecutive samples.
  double tolerance = 1e-9;
  GeodesicOptions geodesic;
  /// Replaces the sampled distance d_k; used to inject perturbations.
  std::function<double(std::size_t k, double d)> distance_hook;
};

struct ScanSample {
  double x = 0.0;
  double y = 0.0;
  double d = 0.0;
  double angle = 0.0;
};

struct ScanReport {
  std::vector<ScanSample> samples;  // k = 1..n, nested outward
  std::vector<std::size_t> violations;  // k with angle[k+1] > angle[k] + tolerance (0-based)
  double limit_angle = 0.0;             // estimate of the angle between the paths
  double radius = 0.0;
  double tolerance = 0.0;
};

/// Comparison angles for points at arc lengths x k/n and y k/n along the
/// shortest paths O->A and O->B, k = 1..n. On a non-negatively curved
/// surface the angles are non-increasing in k.
ScanReport angle_monotonicity_scan(const MetricNet& net, const SurfacePoint& o, const SurfacePoint& a,
                                   const SurfacePoint& b, std::size_t samples, const ScanOptions& options = {});

struct ExcessReport {
  double excess = 0.0;
  double angles[3] = {0.0, 0.0, 0.0};
  double radius[3] = {0.0, 0.0, 0.0};
};

/// alpha + beta + gamma - pi of the geodesic triangle ABC, each angle taken
/// from a scan in a neighborhood free of other vertices.
ExcessReport triangle_excess(const MetricNet& net, const SurfacePoint& a, const SurfacePoint& b,
                             const SurfacePoint& c, const GeodesicOptions& options = {});

}  // namespace convexkit::metric
