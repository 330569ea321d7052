#pragma once

#include "convexkit/core/polytope.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace convexkit::io {

/// Raw contents of an ASCII OFF file.
struct OffMesh {
  std::vector<Vec3> vertices;
  std::vector<std::vector<std::size_t>> faces;
};

/// Accepts "#" comments and blank lines; the edge count is ignored. Throws
/// ParseError with the offending line.
OffMesh read_off(std::istream& in);
OffMesh read_off(const std::filesystem::path& path);

/// Header is exactly "OFF\n<nv> <nf> 0\n"; coordinates with 17 significant digits.
void write_off(std::ostream& out, const OffMesh& mesh);
void write_off(const std::filesystem::path& path, const OffMesh& mesh);

OffMesh to_off(const ConvexPolytope& polytope);
/// Faces checked by ConvexPolytope::from_faces (SchemaError on violation).
ConvexPolytope polytope_from_off(const OffMesh& mesh);

}  // namespace convexkit::io
