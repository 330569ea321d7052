#include "convexkit/io/off.hpp"

#include "convexkit/core/errors.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace convexkit::io {

namespace {

// Next non-empty line with comments stripped; false at end of input.
bool next_line(std::istream& in, std::string& line, int& number) {
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

}  // namespace

OffMesh read_off(std::istream& in) {
  std::string line;
  int number = 0;
  if (!next_line(in, line, number)) throw ParseError("empty OFF file", number);
  std::istringstream head(line);
  std::string magic;
  head >> magic;
  if (magic != "OFF") throw ParseError("OFF file must start with 'OFF'", number);
  // Counts may follow on the header line.
  long nv = -1, nf = -1, ne = 0;
  if (!(head >> nv)) {
    if (!next_line(in, line, number)) throw ParseError("missing OFF counts line", number);
    std::istringstream counts(line);
    if (!(counts >> nv >> nf)) throw ParseError("malformed OFF counts line", number);
    counts >> ne;
  } else if (!(head >> nf)) {
    throw ParseError("malformed OFF counts line", number);
  }
  if (nv < 0 || nf < 0) throw ParseError("negative OFF counts", number);

  OffMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(nv));
  for (long i = 0; i < nv; ++i) {
    if (!next_line(in, line, number)) throw ParseError("unexpected end of file in vertex list", number);
    std::istringstream row(line);
    Vec3 v;
    if (!(row >> v.x() >> v.y() >> v.z())) throw ParseError("vertex needs three coordinates", number);
    if (!all_finite(v)) throw ParseError("vertex coordinate is not finite", number);
    mesh.vertices.push_back(v);
  }
  for (long f = 0; f < nf; ++f) {
    if (!next_line(in, line, number)) throw ParseError("unexpected end of file in face list", number);
    std::istringstream row(line);
    long k = 0;
    if (!(row >> k) || k < 3) throw ParseError("face needs a corner count of at least 3", number);
    std::vector<std::size_t> face;
    for (long c = 0; c < k; ++c) {
      long idx = -1;
      if (!(row >> idx)) throw ParseError("face has fewer indices than its count", number);
      if (idx < 0 || idx >= nv) throw ParseError("face index " + std::to_string(idx) + " out of range", number);
      face.push_back(static_cast<std::size_t>(idx));
    }
    mesh.faces.push_back(std::move(face));
  }
  return mesh;
}

OffMesh read_off(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return read_off(in);
}

void write_off(std::ostream& out, const OffMesh& mesh) {
  out << "OFF\n" << mesh.vertices.size() << ' ' << mesh.faces.size() << " 0\n";
  out << std::setprecision(17);
  for (const Vec3& v : mesh.vertices) out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& f : mesh.faces) {
    out << f.size();
    for (std::size_t i : f) out << ' ' << i;
    out << '\n';
  }
}

void write_off(const std::filesystem::path& path, const OffMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path.string() + "'");
  write_off(out, mesh);
}

OffMesh to_off(const ConvexPolytope& polytope) {
  OffMesh mesh{polytope.vertices(), {}};
  for (const FaceCycle& f : polytope.faces())
    if (f.size() >= 3) mesh.faces.push_back(f);
  return mesh;
}

ConvexPolytope polytope_from_off(const OffMesh& mesh) { return ConvexPolytope::from_faces(mesh.vertices, mesh.faces); }

}  // namespace convexkit::io
