#include "convexkit/io/report.hpp"

#include "convexkit/core/errors.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace convexkit::io {

using nlohmann::json;

json report_to_json(const Report& report) {
  json j;
  j["command"] = report.command;
  j["passed"] = report.passed;
  j["metrics"] = report.metrics;
  j["config"] = report.config;
  json tables = json::object();
  for (const auto& [name, t] : report.tables) tables[name] = {{"columns", t.columns}, {"rows", t.rows}};
  j["tables"] = tables;
  j["attachments"] = report.attachments;
  return j;
}

Report report_from_json(const json& j) {
  try {
    Report r;
    r.command = j.at("command").get<std::string>();
    r.passed = j.at("passed").get<bool>();
    r.metrics = j.at("metrics");
    r.config = j.at("config");
    for (const auto& [name, t] : j.at("tables").items()) {
      Table table;
      table.columns = t.at("columns").get<std::vector<std::string>>();
      for (const json& row : t.at("rows")) table.rows.push_back(row.get<std::vector<json>>());
      r.tables[name] = std::move(table);
    }
    r.attachments = j.at("attachments");
    return r;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("not a report: ") + e.what());
  }
}

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string csv_cell(const json& v) {
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

void flatten(const json& j, const std::string& prefix, std::ostream& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else {
    out << csv_cell(prefix) << ',' << csv_cell(j) << '\n';
  }
}

}  // namespace

void write_report(std::ostream& out, const Report& report, ReportFormat format) {
  if (format == ReportFormat::Json) {
    json j = report_to_json(report);
    j["generated_at"] = utc_now();
    out << j.dump(2) << '\n';
    return;
  }
  out << "key,value\n";
  out << "command," << csv_cell(report.command) << '\n';
  out << "passed," << (report.passed ? "true" : "false") << '\n';
  flatten(report.metrics, "metrics", out);
  flatten(report.config, "config", out);
  for (const auto& [name, t] : report.tables) {
    out << "\n# " << name << '\n';
    for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << csv_cell(t.columns[c]);
    out << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv_cell(row[c]);
      out << '\n';
    }
  }
}

void write_report(const std::filesystem::path& path, const Report& report, ReportFormat format) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path.string() + "'");
  write_report(out, report, format);
}

Report read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  json j;
  try {
    j = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  j.erase("generated_at");
  return report_from_json(j);
}

}  // namespace convexkit::io
