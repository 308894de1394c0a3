#pragma once

// Command dispatch for the `weber` tool. run() takes the arguments after the
// program name and explicit streams so that tests drive the same code path
// as the executable.
//
// Exit codes: 0 feasible, 1 malformed input, 2 infeasible or no root.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "weber/bifacility.hpp"
#include "weber/dynamics.hpp"
#include "weber/io.hpp"
#include "weber/multifacility.hpp"
#include "weber/svg.hpp"
#include "weber/unifacility.hpp"

namespace weber::cli {

using io::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitMalformed = 1;
inline constexpr int kExitInfeasible = 2;

struct Options {
  std::string input = "-";
  std::string output = "-";
  std::string format = "json";
  std::string pairing = "fixed";
  double tolerance = 1e-12;
  std::string selector = "bridge";
  std::string grid;
  std::string mode = "grid";
  std::string which = "delta";
  std::string bracket;
};

/// Outcome of a command: the document to print and the exit code.
struct Outcome {
  json document;
  int code = kExitOk;
};

namespace detail {

inline bool infeasible_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::AssumptionViolated:
    case ErrorCode::NoSignChange:
    case ErrorCode::ReductionInfeasible:
    case ErrorCode::InfeasibleTopology:
    case ErrorCode::NoWeightTriangle:
    case ErrorCode::PerturbationInfeasible:
    case ErrorCode::InfeasibleBase: return true;
    default: return false;
  }
}

inline std::string node(char kind, std::size_t index) { return std::string(1, kind) + std::to_string(index + 1); }

inline io::ResultDocument base_result(const io::ConfigDocument& cfg, const std::string& command) {
  io::ResultDocument r;
  r.kind = io::to_string(cfg.kind);
  for (const auto& t : cfg.terminals) r.terminals.push_back({io::round9(t.point), io::round9(t.weight)});
  r.provenance = {{"tool", "weber"}, {"version", io::kToolVersion}, {"command", command}, {"input", io::to_json(cfg)}};
  return r;
}

inline json deltas_json(const DeltaSet& d) {
  return {{"delta", {io::num(d.delta[0]), io::num(d.delta[1]), io::num(d.delta[2]), io::num(d.delta[3])}},
          {"delta_bridge", io::num(d.delta_bridge)}};
}

inline void add_topology_edges(io::ResultDocument& r, const MultiTopology& top) {
  for (std::size_t i = 0; i < top.facility_count; ++i) {
    for (std::size_t j = 0; j < top.n(); ++j) {
      if (top.ft_weights[i][j] > 0.0) r.edges.push_back({node('W', i), node('P', j), io::round9(top.ft_weights[i][j])});
    }
  }
  for (std::size_t i = 0; i < top.facility_count; ++i) {
    for (std::size_t k = i + 1; k < top.facility_count; ++k) {
      if (top.ff_weights[i][k] > 0.0) r.edges.push_back({node('W', i), node('W', k), io::round9(top.ff_weights[i][k])});
    }
  }
}

inline Outcome solve_numeric(const io::ConfigDocument& cfg, const Options& opt, const std::string& command) {
  const MultiTopology top = io::to_topology(cfg);
  const MultiResult res = numeric_min(top, cfg.init.value_or(std::vector<Point>{}), opt.tolerance);
  io::ResultDocument r = base_result(cfg, command);
  r.status = "FEASIBLE";
  for (Point p : res.facilities) r.facilities.push_back(io::round9(p));
  r.cost = io::round9(res.cost);
  add_topology_edges(r, top);
  r.diagnostics = {{"method", "numeric_min"},
                   {"passes", res.passes},
                   {"converged", res.converged},
                   {"stationarity", io::num(multi_stationarity(top, res.facilities))}};
  return {io::to_json(r), kExitOk};
}

inline Outcome solve_tri(const io::ConfigDocument& cfg) {
  const TriConfig tri = io::to_tri(cfg);
  const ExistenceReport3 ex = existence3(tri);
  io::ResultDocument r = base_result(cfg, "solve");
  r.diagnostics = {{"k", io::num(weight_triangle_k(tri.terminals[0].weight, tri.terminals[1].weight, tri.terminals[2].weight))},
                   {"cos_alpha", {io::num(ex.cos_alpha[0]), io::num(ex.cos_alpha[1]), io::num(ex.cos_alpha[2])}},
                   {"cos_beta", {io::num(ex.cos_beta[0]), io::num(ex.cos_beta[1]), io::num(ex.cos_beta[2])}},
                   {"weight_triangle_exists", ex.weight_triangle_exists}};
  if (!ex.feasible) {
    r.status = "INFEASIBLE";
    r.diagnostics["failed"] = json::array({ex.weight_triangle_exists ? "angle_condition" : "weight_triangle"});
    r.diagnostics["best_terminal"] = best_terminal(tri.terminals) + 1;
    return {io::to_json(r), kExitInfeasible};
  }
  const UniSolution3 s = solve3(tri);
  r.status = "FEASIBLE";
  r.facilities = {io::round9(s.w)};
  r.cost = io::round9(s.cost);
  for (std::size_t j = 0; j < 3; ++j) r.edges.push_back({"W1", node('P', j), io::round9(tri.terminals[j].weight)});
  r.diagnostics["d"] = io::num(s.d);
  r.diagnostics["K"] = {io::num(s.bigK[0]), io::num(s.bigK[1]), io::num(s.bigK[2])};
  return {io::to_json(r), kExitOk};
}

inline Outcome solve_quad(const io::ConfigDocument& cfg, const Options& opt) {
  const QuadConfig quad = io::to_quad(cfg);
  PairedSolution ps;
  if (opt.pairing == "auto") {
    ps = solve_best_pairing(quad);
  } else {
    ps = {solve_bifacility(quad), quad, 0};
  }
  const BiSolution& s = ps.solution;
  io::ResultDocument r = base_result(cfg, "solve");
  const auto& a = s.assumption;
  auto input_index = [&](int j) { return static_cast<std::size_t>((j + ps.shift) % 4); };
  r.diagnostics = {{"k12", io::num(a.k12)},
                   {"k34", io::num(a.k34)},
                   {"cond_43", io::num(a.cond_43)},
                   {"cond_44", io::num(a.cond_44)},
                   {"assumption2", a.holds},
                   {"pairing", {{input_index(0) + 1, input_index(1) + 1}, {input_index(2) + 1, input_index(3) + 1}}},
                   {"failed", s.failed}};
  if (s.deltas) r.diagnostics["deltas"] = deltas_json(*s.deltas);
  if (!s.feasible) {
    r.status = "INFEASIBLE";
    return {io::to_json(r), kExitInfeasible};
  }
  r.status = "FEASIBLE";
  r.facilities = {io::round9(*s.w1), io::round9(*s.w2)};
  r.cost = io::round9(*s.cost);
  for (int j = 0; j < 4; ++j) {
    r.edges.push_back({j < 2 ? "W1" : "W2", node('P', input_index(j)), io::round9(ps.config.weight(j))});
  }
  r.edges.push_back({"W1", "W2", io::round9(quad.bridge_weight)});
  return {io::to_json(r), kExitOk};
}

inline Outcome solve_five_three(const io::ConfigDocument& cfg) {
  const FiveThreeConfig c = io::to_five_three(cfg);
  io::ResultDocument r = base_result(cfg, "solve");
  const FiveThreeSolution s = solve_5t3f(c);
  const MultiTopology top = to_topology(c);
  const std::vector<Point> w{s.w1, s.w2, s.w3};
  r.status = "FEASIBLE";
  for (Point p : w) r.facilities.push_back(io::round9(p));
  r.cost = io::round9(s.cost);
  add_topology_edges(r, top);
  r.diagnostics = {{"q_a", io::point_json(s.q_a)},
                   {"q_b", io::point_json(s.q_b)},
                   {"stationarity", io::num(multi_stationarity(top, w))}};
  return {io::to_json(r), kExitOk};
}

inline Outcome cmd_solve(const io::ConfigDocument& cfg, const Options& opt) {
  switch (cfg.kind) {
    case io::ProblemKind::Tri: return solve_tri(cfg);
    case io::ProblemKind::Quad: return solve_quad(cfg, opt);
    case io::ProblemKind::FiveThree: return solve_five_three(cfg);
    case io::ProblemKind::General: return solve_numeric(cfg, opt, "solve");
  }
  return {};
}

inline json circle_json(const char* name, const Circle& c) {
  return {{"name", name}, {"center", io::point_json(c.center)}, {"radius", io::num(c.radius)}};
}

inline Outcome cmd_construct(const io::ConfigDocument& cfg, const Options& opt) {
  if (cfg.kind != io::ProblemKind::Quad) io::detail::malformed("kind", "construct requires a QUAD document");
  const QuadConfig quad = io::to_quad(cfg);
  validate_quad(quad);
  const PickScaffold sc = pick_scaffold(quad);
  Outcome out = solve_quad(cfg, opt);
  io::ResultDocument r = io::parse_result(out.document);
  // The scaffold is drawn even when the facilities do not exist; the exit
  // code still reports infeasibility.
  r.status = out.code == kExitOk ? "CONSTRUCTED" : "INFEASIBLE";
  r.provenance["command"] = "construct";
  r.construction = {{"points",
                     {{"Q1", io::point_json(sc.q1)},
                      {"Q2", io::point_json(sc.q2)},
                      {"QT1", io::point_json(sc.qtilde[0])},
                      {"QT2", io::point_json(sc.qtilde[1])},
                      {"QT3", io::point_json(sc.qtilde[2])},
                      {"QT4", io::point_json(sc.qtilde[3])}}},
                    {"circles", {circle_json("C1", sc.c1), circle_json("C2", sc.c2), circle_json("C3", sc.c3)}},
                    {"pick_line", {io::point_json(sc.q1), io::point_json(sc.q2)}}};
  r.loci.push_back({"pick_line", {io::round9(sc.q1), io::round9(sc.q2)}});
  return {io::to_json(r), out.code};
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

inline double parse_double(const std::string& s, const std::string& field) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    io::detail::malformed(field, "expected a number, got '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) io::detail::malformed(field, "expected a number, got '" + s + "'");
  return v;
}

inline Point parse_point(const std::string& s, const std::string& field) {
  const auto xy = split(s, ',');
  if (xy.size() != 2) io::detail::malformed(field, "expected x,y");
  return {parse_double(xy[0], field), parse_double(xy[1], field)};
}

inline int parse_index(const std::string& s, const std::string& field) {
  const double v = parse_double(s, field);
  if (v != std::floor(v) || v < 1 || v > 4) io::detail::malformed(field, "expected an index in 1..4");
  return static_cast<int>(v);
}

/// bridge | weight:J | path:J:x0,y0:x1,y1
inline ParamSelector parse_selector(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() == 1 && parts[0] == "bridge") return ParamSelector::bridge();
  if (parts.size() == 2 && parts[0] == "weight") return ParamSelector::weight(parse_index(parts[1], "--selector"));
  if (parts.size() == 4 && parts[0] == "path") {
    return ParamSelector::path(parse_index(parts[1], "--selector"), parse_point(parts[2], "--selector"),
                               parse_point(parts[3], "--selector"));
  }
  io::detail::malformed("--selector", "expected bridge, weight:J or path:J:x0,y0:x1,y1");
}

/// delta | delta1..delta4
inline DeltaSelector parse_which(const std::string& s) {
  if (s == "delta") return DeltaSelector::bridge();
  if (s.size() == 6 && s.rfind("delta", 0) == 0 && s[5] >= '1' && s[5] <= '4') return DeltaSelector::terminal(s[5] - '0');
  io::detail::malformed("--which", "expected delta or delta1..delta4");
}

/// lo:hi:n or a comma-separated list of values.
inline std::vector<double> parse_grid(const std::string& s) {
  if (s.empty()) io::detail::malformed("--grid", "required in grid mode");
  const auto parts = split(s, ':');
  if (parts.size() == 3) {
    const double n = parse_double(parts[2], "--grid");
    if (n < 1 || n != std::floor(n)) io::detail::malformed("--grid", "point count must be a positive integer");
    return linspace(parse_double(parts[0], "--grid"), parse_double(parts[1], "--grid"), static_cast<std::size_t>(n));
  }
  if (parts.size() != 1) io::detail::malformed("--grid", "expected lo:hi:n or v1,v2,...");
  std::vector<double> g;
  for (const auto& v : split(s, ',')) g.push_back(parse_double(v, "--grid"));
  return g;
}

inline json record_json(const SweepRecord& rec) {
  json j = {{"param", io::round9(rec.param)}, {"status", to_string(rec.status)}};
  if (rec.status == SweepStatus::FacilityAtTerminal) j["terminal"] = rec.terminal;
  j["w1"] = rec.w1 ? io::point_json(*rec.w1) : json(nullptr);
  j["w2"] = rec.w2 ? io::point_json(*rec.w2) : json(nullptr);
  j["cost"] = rec.cost ? io::num(*rec.cost) : json(nullptr);
  j["deltas"] = rec.deltas ? deltas_json(*rec.deltas) : json(nullptr);
  return j;
}

inline Outcome cmd_sweep(const io::ConfigDocument& cfg, const Options& opt) {
  if (cfg.kind != io::ProblemKind::Quad) io::detail::malformed("kind", "sweep requires a QUAD document");
  const QuadConfig quad = io::to_quad(cfg);
  const ParamSelector sel = parse_selector(opt.selector);
  json terminals = json::array();
  for (const auto& t : cfg.terminals) {
    terminals.push_back({{"x", io::round9(t.point.x)}, {"y", io::round9(t.point.y)}, {"weight", io::round9(t.weight)}});
  }
  if (opt.mode == "root") {
    const DeltaSelector which = parse_which(opt.which);
    const auto b = split(opt.bracket, ':');
    if (b.size() != 2) io::detail::malformed("--bracket", "expected lo:hi");
    const double lo = parse_double(b[0], "--bracket"), hi = parse_double(b[1], "--bracket");
    const double root = find_bifurcation(quad, sel, which, lo, hi);
    return {{{"schema_version", io::kSchemaVersion},
             {"kind", "ROOT"},
             {"selector", opt.selector},
             {"which", opt.which},
             {"bracket", {lo, hi}},
             {"root", io::round9(root)}},
            kExitOk};
  }
  if (opt.mode != "grid") io::detail::malformed("--mode", "expected grid or root");
  const auto records = sweep(quad, sel, parse_grid(opt.grid));
  json recs = json::array();
  for (const auto& rec : records) recs.push_back(record_json(rec));
  return {{{"schema_version", io::kSchemaVersion},
           {"kind", "SWEEP"},
           {"selector", opt.selector},
           {"terminals", terminals},
           {"records", recs}},
          kExitOk};
}

/// Drawable form of any document the tool emits.
inline io::ResultDocument plottable(const json& doc) {
  if (doc.is_object() && doc.contains("kind") && doc["kind"] == "SWEEP") {
    io::ResultDocument r;
    r.kind = "SWEEP";
    r.status = "SWEEP";
    if (!doc.contains("terminals") || !doc.contains("records")) io::detail::malformed("document", "incomplete sweep");
    for (std::size_t i = 0; i < doc["terminals"].size(); ++i) {
      const std::string f = "terminals[" + std::to_string(i) + "]";
      r.terminals.push_back({io::detail::point_from(doc["terminals"][i], f), 1.0});
    }
    io::Polyline w1{"W1", {}}, w2{"W2", {}};
    for (const auto& rec : doc["records"]) {
      if (rec.value("status", "") != "BIFACILITY") continue;
      w1.points.push_back(io::detail::point_from(rec["w1"], "records.w1"));
      w2.points.push_back(io::detail::point_from(rec["w2"], "records.w2"));
    }
    r.loci = {w1, w2};
    return r;
  }
  return io::parse_result(doc);
}

inline json read_json(const std::string& path, std::istream& in) {
  try {
    if (path == "-") return json::parse(in);
    std::ifstream f(path);
    if (!f) io::detail::malformed("--input", "cannot open '" + path + "'");
    return json::parse(f);
  } catch (const json::exception& e) {
    io::detail::malformed("--input", std::string("invalid JSON: ") + e.what());
  }
}

inline void write_text(const std::string& path, std::ostream& out, const std::string& text) {
  if (path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) io::detail::malformed("--output", "cannot open '" + path + "'");
  f << text;
}

inline std::string csv_of(const json& doc) {
  std::ostringstream s;
  auto cell = [](const json& v) -> std::string { return v.is_null() ? "" : v.dump(); };
  if (doc.value("kind", "") == "ROOT") {
    s << "root\n" << doc["root"].dump() << "\n";
    return s.str();
  }
  if (doc.value("kind", "") != "SWEEP") io::detail::malformed("--format", "csv is available for sweep output only");
  s << "param,status,terminal,w1x,w1y,w2x,w2y,cost,delta1,delta2,delta3,delta4,delta\n";
  for (const auto& r : doc["records"]) {
    s << cell(r["param"]) << ',' << r["status"].get<std::string>() << ',' << (r.contains("terminal") ? cell(r["terminal"]) : "")
      << ',';
    s << (r["w1"].is_null() ? "," : cell(r["w1"]["x"]) + "," + cell(r["w1"]["y"])) << ',';
    s << (r["w2"].is_null() ? "," : cell(r["w2"]["x"]) + "," + cell(r["w2"]["y"])) << ',';
    s << cell(r["cost"]);
    if (r["deltas"].is_null()) {
      s << ",,,,,";
    } else {
      for (int j = 0; j < 4; ++j) s << ',' << cell(r["deltas"]["delta"][j]);
      s << ',' << cell(r["deltas"]["delta_bridge"]);
    }
    s << '\n';
  }
  return s.str();
}

inline std::string render(const json& doc, const std::string& format) {
  if (format == "json") return doc.dump(2) + "\n";
  if (format == "svg") return svg::render(plottable(doc));
  if (format == "csv") return csv_of(doc);
  io::detail::malformed("--format", "expected json, csv or svg");
}

}  // namespace detail

inline int run(std::vector<std::string> args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weber facility-location solver"};
  app.require_subcommand(1);
  Options opt;
  auto common = [&](CLI::App* c) {
    c->add_option("--input", opt.input, "input JSON file, - for stdin");
    c->add_option("--output", opt.output, "output file, - for stdout");
    c->add_option("--format", opt.format, "json, csv or svg")->check(CLI::IsMember({"json", "csv", "svg"}));
  };
  CLI::App* solve = app.add_subcommand("solve", "closed-form solve for the document's problem kind");
  common(solve);
  solve->add_option("--pairing", opt.pairing, "QUAD pairing: fixed or auto")->check(CLI::IsMember({"fixed", "auto"}));
  solve->add_option("--tolerance", opt.tolerance, "relative tolerance for numeric solves");
  CLI::App* construct = app.add_subcommand("construct", "phantom points and circles of the geometric construction");
  common(construct);
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "parameter sweep or bifurcation root");
  common(sweep_cmd);
  sweep_cmd->add_option("--selector", opt.selector, "bridge, weight:J or path:J:x0,y0:x1,y1");
  sweep_cmd->add_option("--grid", opt.grid, "lo:hi:n or v1,v2,...");
  sweep_cmd->add_option("--mode", opt.mode, "grid or root")->check(CLI::IsMember({"grid", "root"}));
  sweep_cmd->add_option("--which", opt.which, "delta or delta1..delta4");
  sweep_cmd->add_option("--bracket", opt.bracket, "lo:hi");
  CLI::App* plot = app.add_subcommand("plot", "render a result or sweep document as SVG");
  plot->add_option("--input", opt.input, "input JSON file, - for stdin");
  plot->add_option("--output", opt.output, "output file, - for stdout");
  CLI::App* oracle = app.add_subcommand("oracle", "numeric minimizer for any problem kind");
  common(oracle);
  oracle->add_option("--tolerance", opt.tolerance, "relative tolerance");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitMalformed;
  }

  try {
    const json input = detail::read_json(opt.input, in);
    if (plot->parsed()) {
      detail::write_text(opt.output, out, svg::render(detail::plottable(input)));
      return kExitOk;
    }
    const io::ConfigDocument cfg = io::parse_config(input);
    Outcome result;
    std::string command;
    try {
      if (solve->parsed()) {
        command = "solve";
        result = detail::cmd_solve(cfg, opt);
      } else if (construct->parsed()) {
        command = "construct";
        result = detail::cmd_construct(cfg, opt);
      } else if (sweep_cmd->parsed()) {
        command = "sweep";
        result = detail::cmd_sweep(cfg, opt);
      } else {
        command = "oracle";
        result = detail::solve_numeric(cfg, opt, "oracle");
      }
    } catch (const Error& e) {
      if (!detail::infeasible_code(e.code())) throw;
      io::ResultDocument r = detail::base_result(cfg, command);
      r.status = "INFEASIBLE";
      r.diagnostics = {{"error", to_string(e.code())}, {"message", e.what()}};
      result = {io::to_json(r), kExitInfeasible};
      err << e.what() << "\n";
    }
    detail::write_text(opt.output, out, detail::render(result.document, opt.format));
    return result.code;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return detail::infeasible_code(e.code()) ? kExitInfeasible : kExitMalformed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitMalformed;
  }
}

}  // namespace weber::cli
