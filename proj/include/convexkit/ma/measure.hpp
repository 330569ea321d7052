#pragma once

#include "convexkit/core/geometry.hpp"
#include "convexkit/ma/weight.hpp"

#include <optional>
#include <span>
#include <vector>

namespace convexkit::ma {

/// Lower convex envelope of the lifted points (node, value).
struct PLConvexFunction {
  std::vector<Vec2> nodes;
  std::vector<double> values;
};

/// Edge of a cell polygon and the constraint that produced it: the node
/// whose support inequality is tight there, or kWindowEdge / kBoxEdge.
inline constexpr std::size_t kWindowEdge = static_cast<std::size_t>(-1);
inline constexpr std::size_t kBoxEdge = static_cast<std::size_t>(-2);

/// Subdifferential of u at a node: the slopes p of all supporting planes,
/// {p : <p, x_j - x_i> <= u_j - u_i for all j}.
struct SubgradientCell {
  std::size_t node = 0;
  std::vector<Vec2> polygon;            // counterclockwise
  std::vector<std::size_t> edge_owner;  // edge k runs from polygon[k] to polygon[k + 1]
  double area = 0.0;
  double mass = 0.0;  // weighted mass; equals area until a weight is applied
  bool clipped = false;  // intersected with a caller window
};

/// Subgradient cell of `node`. Nodes on the boundary of the node hull have
/// unbounded cells: pass a convex counterclockwise `window` to clip them,
/// otherwise UnboundedCell is thrown. Throws NotEnvelopeVertex when the node
/// lies strictly above the envelope.
SubgradientCell ma_measure(const PLConvexFunction& u, std::size_t node,
                           const std::optional<std::vector<Vec2>>& window = std::nullopt);

/// Same cell, but an empty cell (node above the envelope) is returned with
/// zero area instead of throwing.
SubgradientCell subgradient_cell(const PLConvexFunction& u, std::size_t node,
                                 const std::optional<std::vector<Vec2>>& window = std::nullopt);

/// Indices of nodes strictly above the envelope.
std::vector<std::size_t> nodes_above_envelope(const PLConvexFunction& u);

struct QuadratureOptions {
  /// Refine until the summed differences between each piece's 7-point
  /// estimate and the sum over its four children fall below this fraction of
  /// the total.
  double relative_tolerance = 1e-3;
  /// Caps the number of pieces at 4^max_depth.
  int max_depth = 10;
};

/// Integral of f over a convex polygon: fan triangulation with the degree-5
/// 7-point triangle rule and globally adaptive 4-way refinement. Throws
/// QuadratureFailure on non-finite samples.
double integrate_polygon(std::span<const Vec2> polygon, const std::function<double(const Vec2&)>& f,
                         const QuadratureOptions& options = {});

/// Integral of theta(p, u(B_i), B_i) over the cell of node i.
double conditional_curvature(const PLConvexFunction& u, std::size_t node, const Weight& theta,
                             const QuadratureOptions& options = {},
                             const std::optional<std::vector<Vec2>>& window = std::nullopt);

/// Weighted mass of an already computed cell.
double cell_mass(const SubgradientCell& cell, const PLConvexFunction& u, const Weight& theta,
                 const QuadratureOptions& options = {});

/// Integral of theta(p) along the segment [a, b] (theta evaluated with the
/// node's z and x). Used for the Jacobian of the mass map.
double edge_integral(const Vec2& a, const Vec2& b, const Weight& theta, double z, const Vec2& x);

}  // namespace convexkit::ma
