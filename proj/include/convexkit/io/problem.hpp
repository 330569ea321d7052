#pragma once

#include "convexkit/io/off.hpp"
#include "convexkit/ma/solver.hpp"
#include "convexkit/metric/net.hpp"
#include "convexkit/minkowski/minkowski.hpp"
#include "convexkit/rigidity/defo.hpp"
#include "convexkit/rigidity/surface.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <variant>

namespace convexkit::io {

enum class ProblemKind { Mesh, Net, MAProblem, MinkowskiProblem, RigidityProblem, GridPatch };

std::string to_string(ProblemKind kind);
/// Throws ParseError for an unknown name.
ProblemKind problem_kind_from_string(const std::string& name);

/// Minkowski data given directly or as curvature samples on the sphere.
using MinkowskiInput = std::variant<minkowski::MinkowskiProblem, minkowski::CurvatureSample>;

using ProblemPayload = std::variant<OffMesh, metric::MetricNet, ma::MAProblem, MinkowskiInput,
                                    rigidity::TriangulatedSurface, rigidity::GridPatch>;

struct ProblemFile {
  ProblemKind kind;
  ProblemPayload payload;
};

/// Reads an OFF mesh (".off") or a JSON problem with a top-level "kind".
/// When `expected` is given the file must have that kind; an OFF file is
/// accepted as a rigidity problem (triangles only). Throws ParseError for
/// unreadable or malformed text and SchemaError for violated constraints.
ProblemFile parse_problem(const std::filesystem::path& path, std::optional<ProblemKind> expected = {});
ProblemFile parse_problem_json(const std::string& text, std::optional<ProblemKind> expected = {});

/// JSON form of each payload, with a "kind" member; parse_problem_json inverts it.
nlohmann::json problem_to_json(const ProblemFile& problem);

}  // namespace convexkit::io
