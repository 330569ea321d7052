#pragma once

#include "convexkit/core/polytope.hpp"

#include <random>
#include <vector>

namespace convexkit::cli {

using Rng = std::mt19937_64;

Vec3 random_unit(Rng& rng);

/// Hull of `n` points on the unit sphere with radial jitter in [1, 1 + jitter].
ConvexPolytope random_hull(Rng& rng, std::size_t n, double jitter = 0.3);

/// Body circumscribed about the unit sphere by `faces` random tangent planes,
/// shifted by a random offset of size up to `shift`. Every plane is a face.
ConvexPolytope random_circumscribed(Rng& rng, std::size_t faces, double shift = 0.5);

ConvexPolytope unit_cube();
ConvexPolytope regular_octahedron();
ConvexPolytope regular_icosahedron();
ConvexPolytope regular_tetrahedron();

}  // namespace convexkit::cli
