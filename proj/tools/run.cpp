#include "cli.hpp"

#include "convexkit/core/errors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>

namespace convexkit::cli {

using nlohmann::json;

json config_json(const RunConfig& c) {
  json j{{"command", c.command}, {"inputs", c.inputs}, {"seed", c.seed},
         {"format", c.format == io::ReportFormat::Json ? "json" : "csv"}};
  j["tol"] = c.tol ? json(*c.tol) : json(nullptr);
  j["max_iter"] = c.max_iter ? json(*c.max_iter) : json(nullptr);
  const std::string& head = c.command.empty() ? std::string() : c.command.front();
  if (head == "ma") {
    j["homotopy"] = c.homotopy;
    j["steps"] = c.steps;
  } else if (head == "minkowski") {
    j["faces"] = c.faces;
    j["count"] = c.count;
  } else if (head == "rigidity") {
    j["split"] = c.split;
  } else if (head == "net") {
    j["from"] = c.from;
    j["to"] = c.to;
    j["from_vertex"] = c.from_vertex ? json(*c.from_vertex) : json(nullptr);
    j["to_vertex"] = c.to_vertex ? json(*c.to_vertex) : json(nullptr);
  } else if (head == "demo") {
    j["demo"] = c.demo;
  }
  return j;
}

namespace {

using Handler = std::function<io::Report(const RunConfig&)>;

void emit(const io::Report& r, const RunConfig& c) {
  if (c.out.empty()) {
    io::write_report(std::cout, r, c.format);
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw UsageError("cannot write " + c.out);
  io::write_report(f, r, c.format);
}

}  // namespace

int run(int argc, char** argv) {
  RunConfig c;
  Handler handler;
  std::string format = "json";

  CLI::App app{"Convex surfaces: intrinsic metrics, Monge-Ampere, Minkowski and rigidity tools", "convexkit"};
  app.require_subcommand(1);
  app.add_option("--tol", c.tol, "Solver tolerance")->check(CLI::PositiveNumber);
  app.add_option("--max-iter", c.max_iter, "Iteration budget")->check(CLI::PositiveNumber);
  app.add_option("--seed", c.seed, "Seed for randomized suites");
  app.add_option("--out", c.out, "Report path (default stdout)");
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));

  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help, Handler h,
                  bool takes_input = true) {
    CLI::App* sub = parent->add_subcommand(name, help)->fallthrough();
    if (takes_input) sub->add_option("input", c.inputs, "Input file")->required();
    sub->callback([&, h, parent, name] {
      c.command = {parent->get_name(), name};
      handler = h;
    });
    return sub;
  };

  CLI::App* net = app.add_subcommand("net", "Metric nets")->require_subcommand(1)->fallthrough();
  leaf(net, "validate", "Check the gluing conditions", net_validate);
  leaf(net, "curvature", "Vertex curvatures", net_curvature);
  CLI::App* geo = leaf(net, "geodesic", "Shortest path between two points", net_geodesic);
  geo->add_option("--from", c.from, "Start point as polygon,x,y");
  geo->add_option("--to", c.to, "End point as polygon,x,y");
  geo->add_option("--from-vertex", c.from_vertex, "Start at a polytope vertex (OFF input)");
  geo->add_option("--to-vertex", c.to_vertex, "End at a polytope vertex (OFF input)");

  CLI::App* ma = app.add_subcommand("ma", "Monge-Ampere problems")->require_subcommand(1)->fallthrough();
  CLI::App* solve = leaf(ma, "solve", "Solve a Dirichlet problem", ma_solve);
  solve->add_flag("--homotopy", c.homotopy, "Reach the masses by continuation from a uniform start");
  solve->add_option("--steps", c.steps, "Continuation grid steps")->check(CLI::PositiveNumber);

  CLI::App* mk = app.add_subcommand("minkowski", "Minkowski problems")->require_subcommand(1)->fallthrough();
  leaf(mk, "solve", "Recover a polytope from normals and areas", minkowski_solve);
  leaf(mk, "check", "Closing condition and solution check", minkowski_check);
  CLI::App* rt = leaf(mk, "roundtrip", "Solve random polytopes and compare", minkowski_roundtrip, false);
  rt->add_option("--faces", c.faces, "Face budget of the random polytopes")->check(CLI::Range(4, 64));
  rt->add_option("--count", c.count, "Number of polytopes")->check(CLI::PositiveNumber);

  CLI::App* rg = app.add_subcommand("rigidity", "Infinitesimal rigidity")->require_subcommand(1)->fallthrough();
  CLI::App* an = leaf(rg, "analyze", "Bending space of a surface", rigidity_analyze);
  an->add_option("--split", c.split, "Triangulation of polygonal faces")->check(CLI::IsMember({"fan", "center"}));
  CLI::App* defo = rg->add_subcommand("defo", "Bending equation on a grid patch")->require_subcommand(1)->fallthrough();
  for (auto [name, help, h] : {std::tuple{"solve", "Solve the Dirichlet problem", Handler(defo_solve)},
                               std::tuple{"check", "Sign of the bending field Hessian", Handler(defo_check)}}) {
    CLI::App* sub = defo->add_subcommand(name, help)->fallthrough();
    sub->add_option("input", c.inputs, "Grid patch file")->required();
    sub->callback([&, h = h, n = std::string(name)] {
      c.command = {"rigidity", "defo", n};
      handler = h;
    });
  }

  std::string names;
  for (const auto& n : demo_names()) names += (names.empty() ? "" : ", ") + n;
  CLI::App* demo = app.add_subcommand("demo", "Curated scenarios: " + names)->fallthrough();
  demo->add_option("name", c.demo, "Scenario name")->required();
  demo->callback([&] {
    c.command = {"demo", c.demo};
    handler = run_demo;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return 0;
    std::cerr << app.help();
    return 2;
  }
  c.format = format == "csv" ? io::ReportFormat::Csv : io::ReportFormat::Json;

  try {
    const io::Report report = handler(c);
    emit(report, c);
    return report.passed ? 0 : 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const UnknownDemo& e) {
    std::cerr << "error: " << e.what() << "\navailable demos: " << names << "\n";
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace convexkit::cli
