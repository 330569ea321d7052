#pragma once

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace convexkit::io {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;
};

/// Result of one run. `metrics` holds scalars, `config` the effective
/// settings, `tables` row data and `attachments` larger objects such as meshes.
struct Report {
  std::string command;
  bool passed = true;
  nlohmann::json metrics = nlohmann::json::object();
  nlohmann::json config = nlohmann::json::object();
  std::map<std::string, Table> tables;
  nlohmann::json attachments = nlohmann::json::object();
};

enum class ReportFormat { Json, Csv };

/// Everything but the timestamp; keys sorted, reals in shortest round-trip form.
nlohmann::json report_to_json(const Report& report);
Report report_from_json(const nlohmann::json& j);

/// JSON output adds the single time-dependent key "generated_at".
void write_report(std::ostream& out, const Report& report, ReportFormat format = ReportFormat::Json);
void write_report(const std::filesystem::path& path, const Report& report, ReportFormat format = ReportFormat::Json);
/// Parses a JSON report written by write_report, dropping "generated_at".
Report read_report(const std::filesystem::path& path);

}  // namespace convexkit::io
