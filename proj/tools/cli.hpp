#pragma once

#include "convexkit/io/report.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace convexkit::cli {

struct RunConfig {
  std::vector<std::string> command;  // e.g. {"minkowski", "roundtrip"}
  std::vector<std::string> inputs;
  std::optional<double> tol;
  std::optional<std::size_t> max_iter;
  std::uint64_t seed = 1;
  std::string out;
  io::ReportFormat format = io::ReportFormat::Json;

  // command specific
  bool homotopy = false;
  std::size_t steps = 4;
  std::size_t faces = 20;
  std::size_t count = 5;
  std::string split = "fan";
  std::string from;
  std::string to;
  std::optional<std::size_t> from_vertex;
  std::optional<std::size_t> to_vertex;
  std::string demo;
};

/// Thrown for bad arguments or unreadable input; exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

io::Report net_validate(const RunConfig& config);
io::Report net_curvature(const RunConfig& config);
io::Report net_geodesic(const RunConfig& config);
io::Report ma_solve(const RunConfig& config);
io::Report minkowski_solve(const RunConfig& config);
io::Report minkowski_check(const RunConfig& config);
io::Report minkowski_roundtrip(const RunConfig& config);
io::Report rigidity_analyze(const RunConfig& config);
io::Report defo_solve(const RunConfig& config);
io::Report defo_check(const RunConfig& config);

std::vector<std::string> demo_names();
/// Throws UnknownDemo.
io::Report run_demo(const RunConfig& config);

/// Effective configuration as stored in reports.
nlohmann::json config_json(const RunConfig& config);

int run(int argc, char** argv);

}  // namespace convexkit::cli
