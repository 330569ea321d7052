#include "convexkit/metric/angles.hpp"

#include "convexkit/core/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace convexkit::metric {

double comparison_angle(double x, double y, double d) {
  const double slack = 1e-12 * (x + y + d);
  if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(d) || d < std::abs(x - y) - slack || d > x + y + slack) {
    std::ostringstream os;
    os << "sides " << x << ", " << y << ", " << d << " violate the triangle inequality";
    throw TriangleInequalityViolated(os.str());
  }
  // Half-angle form: accurate for angles close to 0 and pi.
  const double near = std::max(0.0, (d - x + y) * (d + x - y));
  const double far = std::max(0.0, (x + y - d) * (x + y + d));
  return 2.0 * std::atan2(std::sqrt(near), std::sqrt(far));
}

ScanReport angle_monotonicity_scan(const MetricNet& net, const SurfacePoint& o, const SurfacePoint& a,
                                   const SurfacePoint& b, std::size_t samples, const ScanOptions& options) {
  if (samples < 2) throw InvalidArgument("angle scan needs at least 2 samples");
  const GeodesicPath oa = shortest_path(net, o, a, options.geodesic);
  const GeodesicPath ob = shortest_path(net, o, b, options.geodesic);
  double x = oa.length, y = ob.length;
  if (options.radius) {
    x = std::min(x, *options.radius);
    y = std::min(y, *options.radius);
  }
  ScanReport report;
  report.radius = std::max(x, y);
  report.tolerance = options.tolerance;
  for (std::size_t k = 1; k <= samples; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(samples);
    ScanSample s;
    s.x = x * t;
    s.y = y * t;
    s.d = intrinsic_distance(net, oa.point_at(s.x), ob.point_at(s.y), options.geodesic);
    if (options.distance_hook) s.d = options.distance_hook(k, s.d);
    s.angle = comparison_angle(s.x, s.y, s.d);
    report.samples.push_back(s);
  }
  for (std::size_t k = 0; k + 1 < report.samples.size(); ++k)
    if (report.samples[k + 1].angle > report.samples[k].angle + options.tolerance) report.violations.push_back(k);
  report.limit_angle = report.samples.front().angle;
  return report;
}

ExcessReport triangle_excess(const MetricNet& net, const SurfacePoint& a, const SurfacePoint& b,
                             const SurfacePoint& c, const GeodesicOptions& options) {
  const SurfacePoint pts[3] = {a, b, c};
  const double eps = options.tol.absolute(net.scale());
  ExcessReport report;
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    const SurfacePoint& apex = pts[i];
    const SurfacePoint& p = pts[(i + 1) % 3];
    const SurfacePoint& q = pts[(i + 2) % 3];
    double radius = std::min(intrinsic_distance(net, apex, p, options), intrinsic_distance(net, apex, q, options));
    for (std::size_t cls = 0; cls < net.vertex_class_count(); ++cls) {
      const Corner& corner = net.class_corners(cls).front();
      const SurfacePoint v{corner.polygon, net.corner(corner.polygon, corner.index)};
      const double dist = intrinsic_distance(net, apex, v, options);
      if (dist > eps) radius = std::min(radius, dist);
    }
    ScanOptions scan;
    scan.radius = 0.5 * radius;
    scan.geodesic = options;
    report.radius[i] = 0.5 * radius;
    report.angles[i] = angle_monotonicity_scan(net, apex, p, q, 2, scan).limit_angle;
    sum += report.angles[i];
  }
  report.excess = sum - kPi;
  return report;
}

}  // namespace convexkit::metric
