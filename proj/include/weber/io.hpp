#pragma once

// JSON documents for the command-line tool: problem configurations in, and
// results (facilities, cost, diagnostics, drawable geometry) out.

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "weber/bifacility.hpp"
#include "weber/error.hpp"
#include "weber/geometry.hpp"
#include "weber/multifacility.hpp"
#include "weber/unifacility.hpp"

namespace weber::io {

using nlohmann::json;

inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kToolVersion = "1.0.0";

enum class ProblemKind { Tri, Quad, FiveThree, General };

inline const char* to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::Tri: return "TRI";
    case ProblemKind::Quad: return "QUAD";
    case ProblemKind::FiveThree: return "FIVE_THREE";
    case ProblemKind::General: return "GENERAL";
  }
  return "";
}

/// Rounds to 9 significant decimal digits, the printed precision of every
/// result value.
inline double round9(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return std::strtod(buf, nullptr);
}

inline Point round9(Point p) { return {round9(p.x), round9(p.y)}; }

using Matrix = std::vector<std::vector<double>>;

struct ConfigDocument {
  std::string schema_version = kSchemaVersion;
  ProblemKind kind = ProblemKind::Quad;
  std::vector<WeightedTerminal> terminals;
  std::optional<double> bridge_weight;                  // QUAD
  std::optional<std::array<double, 2>> bridge_weights;  // FIVE_THREE: mt13, mt23
  std::optional<std::size_t> facility_count;            // GENERAL
  std::optional<Matrix> ft_weights;                     // GENERAL
  std::optional<Matrix> ff_weights;                     // GENERAL
  std::optional<std::vector<Point>> init;               // starting facilities for numeric solves

  friend bool operator==(const ConfigDocument&, const ConfigDocument&) = default;
};

namespace detail {

[[noreturn]] inline void malformed(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::MalformedInput, field + ": " + why);
}

inline double finite_number(const json& j, const std::string& field) {
  if (!j.is_number()) malformed(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) malformed(field, "must be finite");
  return v;
}

inline double positive_number(const json& j, const std::string& field) {
  const double v = finite_number(j, field);
  if (!(v > 0.0)) malformed(field, "must be positive");
  return v;
}

inline Point point_from(const json& j, const std::string& field) {
  if (!j.is_object()) malformed(field, "expected an object with x and y");
  if (!j.contains("x")) malformed(field + ".x", "missing");
  if (!j.contains("y")) malformed(field + ".y", "missing");
  return {finite_number(j["x"], field + ".x"), finite_number(j["y"], field + ".y")};
}

inline Matrix matrix_from(const json& j, const std::string& field) {
  if (!j.is_array()) malformed(field, "expected an array of rows");
  Matrix m;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string row = field + "[" + std::to_string(i) + "]";
    if (!j[i].is_array()) malformed(row, "expected an array");
    std::vector<double> r;
    for (std::size_t k = 0; k < j[i].size(); ++k) {
      const std::string cell = row + "[" + std::to_string(k) + "]";
      const double v = finite_number(j[i][k], cell);
      if (v < 0.0) malformed(cell, "must be non-negative");
      r.push_back(v);
    }
    m.push_back(std::move(r));
  }
  return m;
}

inline json point_json(Point p) { return {{"x", p.x}, {"y", p.y}}; }

}  // namespace detail

inline ConfigDocument parse_config(const json& j) {
  using detail::malformed;
  if (!j.is_object()) malformed("document", "expected a JSON object");
  static const std::vector<std::string> known{"schema_version", "kind",       "terminals",  "bridge_weight",
                                              "bridge_weights", "facility_count", "ft_weights", "ff_weights",
                                              "init"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) malformed(key, "unknown field");
  }

  ConfigDocument doc;
  if (!j.contains("schema_version") || !j["schema_version"].is_string()) malformed("schema_version", "missing");
  doc.schema_version = j["schema_version"].get<std::string>();
  if (doc.schema_version != kSchemaVersion) malformed("schema_version", "unsupported version");

  if (!j.contains("kind") || !j["kind"].is_string()) malformed("kind", "missing");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "TRI") {
    doc.kind = ProblemKind::Tri;
  } else if (kind == "QUAD") {
    doc.kind = ProblemKind::Quad;
  } else if (kind == "FIVE_THREE") {
    doc.kind = ProblemKind::FiveThree;
  } else if (kind == "GENERAL") {
    doc.kind = ProblemKind::General;
  } else {
    malformed("kind", "expected TRI, QUAD, FIVE_THREE or GENERAL");
  }

  if (!j.contains("terminals") || !j["terminals"].is_array()) malformed("terminals", "missing");
  const json& ts = j["terminals"];
  if (ts.empty()) malformed("terminals", "must not be empty");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const std::string f = "terminals[" + std::to_string(i) + "]";
    WeightedTerminal t;
    t.point = detail::point_from(ts[i], f);
    if (ts[i].contains("weight")) {
      t.weight = detail::positive_number(ts[i]["weight"], f + ".weight");
    } else if (doc.kind == ProblemKind::General) {
      t.weight = 1.0;
    } else {
      malformed(f + ".weight", "missing");
    }
    for (const auto& [key, _] : ts[i].items()) {
      if (key != "x" && key != "y" && key != "weight") malformed(f + "." + key, "unknown field");
    }
    doc.terminals.push_back(t);
  }

  auto require_count = [&](std::size_t n) {
    if (doc.terminals.size() != n) malformed("terminals", "expected exactly " + std::to_string(n) + " terminals");
  };
  if (j.contains("bridge_weight")) doc.bridge_weight = detail::positive_number(j["bridge_weight"], "bridge_weight");
  if (j.contains("bridge_weights")) {
    const json& b = j["bridge_weights"];
    if (!b.is_array() || b.size() != 2) malformed("bridge_weights", "expected [mt13, mt23]");
    doc.bridge_weights = std::array<double, 2>{detail::positive_number(b[0], "bridge_weights[0]"),
                                               detail::positive_number(b[1], "bridge_weights[1]")};
  }
  if (j.contains("facility_count")) {
    if (!j["facility_count"].is_number_unsigned() || j["facility_count"].get<std::size_t>() == 0) {
      malformed("facility_count", "expected a positive integer");
    }
    doc.facility_count = j["facility_count"].get<std::size_t>();
  }
  if (j.contains("ft_weights")) doc.ft_weights = detail::matrix_from(j["ft_weights"], "ft_weights");
  if (j.contains("ff_weights")) doc.ff_weights = detail::matrix_from(j["ff_weights"], "ff_weights");
  if (j.contains("init")) {
    if (!j["init"].is_array()) malformed("init", "expected an array of points");
    std::vector<Point> init;
    for (std::size_t i = 0; i < j["init"].size(); ++i) {
      init.push_back(detail::point_from(j["init"][i], "init[" + std::to_string(i) + "]"));
    }
    doc.init = init;
  }

  switch (doc.kind) {
    case ProblemKind::Tri: require_count(3); break;
    case ProblemKind::Quad:
      require_count(4);
      if (!doc.bridge_weight) malformed("bridge_weight", "required for QUAD");
      break;
    case ProblemKind::FiveThree:
      require_count(5);
      if (!doc.bridge_weights) malformed("bridge_weights", "required for FIVE_THREE");
      break;
    case ProblemKind::General: {
      if (!doc.facility_count) malformed("facility_count", "required for GENERAL");
      if (!doc.ft_weights) malformed("ft_weights", "required for GENERAL");
      const std::size_t l = *doc.facility_count;
      if (doc.ft_weights->size() != l) malformed("ft_weights", "expected facility_count rows");
      for (const auto& r : *doc.ft_weights) {
        if (r.size() != doc.terminals.size()) malformed("ft_weights", "expected one column per terminal");
      }
      if (!doc.ff_weights) doc.ff_weights = Matrix(l, std::vector<double>(l, 0.0));
      if (doc.ff_weights->size() != l) malformed("ff_weights", "expected facility_count rows");
      for (const auto& r : *doc.ff_weights) {
        if (r.size() != l) malformed("ff_weights", "expected facility_count columns");
      }
      break;
    }
  }
  return doc;
}

inline json to_json(const ConfigDocument& doc) {
  json j;
  j["schema_version"] = doc.schema_version;
  j["kind"] = to_string(doc.kind);
  j["terminals"] = json::array();
  for (const auto& t : doc.terminals) j["terminals"].push_back({{"x", t.point.x}, {"y", t.point.y}, {"weight", t.weight}});
  if (doc.bridge_weight) j["bridge_weight"] = *doc.bridge_weight;
  if (doc.bridge_weights) j["bridge_weights"] = {(*doc.bridge_weights)[0], (*doc.bridge_weights)[1]};
  if (doc.facility_count) j["facility_count"] = *doc.facility_count;
  if (doc.ft_weights) j["ft_weights"] = *doc.ft_weights;
  if (doc.ff_weights) j["ff_weights"] = *doc.ff_weights;
  if (doc.init) {
    j["init"] = json::array();
    for (Point p : *doc.init) j["init"].push_back(detail::point_json(p));
  }
  return j;
}

inline TriConfig to_tri(const ConfigDocument& doc) {
  return {{{doc.terminals[0], doc.terminals[1], doc.terminals[2]}}};
}

inline QuadConfig to_quad(const ConfigDocument& doc) {
  return {{{doc.terminals[0], doc.terminals[1], doc.terminals[2], doc.terminals[3]}}, *doc.bridge_weight};
}

inline FiveThreeConfig to_five_three(const ConfigDocument& doc) {
  FiveThreeConfig c;
  for (int j = 0; j < 5; ++j) c.terminals[j] = doc.terminals[j];
  c.mt13 = (*doc.bridge_weights)[0];
  c.mt23 = (*doc.bridge_weights)[1];
  return c;
}

/// Equivalent general topology for any problem kind.
inline MultiTopology to_topology(const ConfigDocument& doc) {
  switch (doc.kind) {
    case ProblemKind::Tri: return unifacility_topology(doc.terminals);
    case ProblemKind::Quad: return weber::to_topology(to_quad(doc));
    case ProblemKind::FiveThree: return weber::to_topology(to_five_three(doc));
    case ProblemKind::General: break;
  }
  MultiTopology top;
  top.terminals = doc.terminals;
  top.facility_count = *doc.facility_count;
  top.ft_weights = *doc.ft_weights;
  top.ff_weights = *doc.ff_weights;
  return top;
}

/// Network edge between named nodes: "P<j>" for terminals, "W<i>" for
/// facilities (both 1-based).
struct Edge {
  std::string a;
  std::string b;
  double weight = 0.0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Polyline {
  std::string name;
  std::vector<Point> points;
  friend bool operator==(const Polyline&, const Polyline&) = default;
};

struct ResultDocument {
  std::string schema_version = kSchemaVersion;
  std::string kind;
  std::string status;
  std::vector<Point> facilities;
  std::optional<double> cost;
  std::vector<WeightedTerminal> terminals;
  std::vector<Edge> edges;
  std::vector<Polyline> loci;
  json diagnostics = json::object();
  json construction;  // null unless produced by construct
  json provenance = json::object();

  friend bool operator==(const ResultDocument& a, const ResultDocument& b) {
    auto same_terminals = [&] {
      if (a.terminals.size() != b.terminals.size()) return false;
      for (std::size_t i = 0; i < a.terminals.size(); ++i) {
        if (!(a.terminals[i].point == b.terminals[i].point) || a.terminals[i].weight != b.terminals[i].weight) {
          return false;
        }
      }
      return true;
    };
    return a.schema_version == b.schema_version && a.kind == b.kind && a.status == b.status &&
           a.facilities == b.facilities && a.cost == b.cost && same_terminals() && a.edges == b.edges &&
           a.loci == b.loci && a.diagnostics == b.diagnostics && a.construction == b.construction &&
           a.provenance == b.provenance;
  }
};

inline json to_json(const ResultDocument& r) {
  json j;
  j["schema_version"] = r.schema_version;
  j["kind"] = r.kind;
  j["status"] = r.status;
  j["facilities"] = json::array();
  for (Point p : r.facilities) j["facilities"].push_back(detail::point_json(p));
  j["cost"] = r.cost ? json(*r.cost) : json(nullptr);
  j["terminals"] = json::array();
  for (const auto& t : r.terminals) j["terminals"].push_back({{"x", t.point.x}, {"y", t.point.y}, {"weight", t.weight}});
  j["edges"] = json::array();
  for (const auto& e : r.edges) j["edges"].push_back({{"a", e.a}, {"b", e.b}, {"weight", e.weight}});
  j["loci"] = json::array();
  for (const auto& l : r.loci) {
    json pts = json::array();
    for (Point p : l.points) pts.push_back(detail::point_json(p));
    j["loci"].push_back({{"name", l.name}, {"points", pts}});
  }
  j["diagnostics"] = r.diagnostics;
  j["construction"] = r.construction;
  j["provenance"] = r.provenance;
  return j;
}

inline ResultDocument parse_result(const json& j) {
  using detail::malformed;
  if (!j.is_object()) malformed("document", "expected a JSON object");
  ResultDocument r;
  auto str = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_string()) malformed(key, "missing");
    return j[key].get<std::string>();
  };
  r.schema_version = str("schema_version");
  if (r.schema_version != kSchemaVersion) malformed("schema_version", "unsupported version");
  r.kind = str("kind");
  r.status = str("status");
  auto arr = [&](const char* key) -> const json& {
    if (!j.contains(key) || !j[key].is_array()) malformed(key, "expected an array");
    return j[key];
  };
  const json& fs = arr("facilities");
  for (std::size_t i = 0; i < fs.size(); ++i) r.facilities.push_back(detail::point_from(fs[i], "facilities[" + std::to_string(i) + "]"));
  if (j.contains("cost") && !j["cost"].is_null()) r.cost = detail::finite_number(j["cost"], "cost");
  const json& ts = arr("terminals");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const std::string f = "terminals[" + std::to_string(i) + "]";
    if (!ts[i].contains("weight")) malformed(f + ".weight", "missing");
    r.terminals.push_back({detail::point_from(ts[i], f), detail::positive_number(ts[i]["weight"], f + ".weight")});
  }
  const json& es = arr("edges");
  for (std::size_t i = 0; i < es.size(); ++i) {
    const std::string f = "edges[" + std::to_string(i) + "]";
    if (!es[i].is_object() || !es[i].contains("a") || !es[i]["a"].is_string() || !es[i].contains("b") ||
        !es[i]["b"].is_string() || !es[i].contains("weight")) {
      malformed(f, "expected {a, b, weight}");
    }
    r.edges.push_back({es[i]["a"].get<std::string>(), es[i]["b"].get<std::string>(),
                       detail::finite_number(es[i]["weight"], f + ".weight")});
  }
  if (j.contains("loci")) {
    const json& ls = arr("loci");
    for (std::size_t i = 0; i < ls.size(); ++i) {
      const std::string f = "loci[" + std::to_string(i) + "]";
      if (!ls[i].is_object() || !ls[i].contains("name") || !ls[i]["name"].is_string() || !ls[i].contains("points") ||
          !ls[i]["points"].is_array()) {
        malformed(f, "expected {name, points}");
      }
      Polyline p{ls[i]["name"].get<std::string>(), {}};
      for (std::size_t k = 0; k < ls[i]["points"].size(); ++k) {
        p.points.push_back(detail::point_from(ls[i]["points"][k], f + ".points[" + std::to_string(k) + "]"));
      }
      r.loci.push_back(std::move(p));
    }
  }
  if (j.contains("diagnostics")) r.diagnostics = j["diagnostics"];
  if (j.contains("construction")) r.construction = j["construction"];
  if (j.contains("provenance")) r.provenance = j["provenance"];
  return r;
}

/// Rounded number, or null where the value is undefined.
inline json num(double v) { return std::isfinite(v) ? json(round9(v)) : json(nullptr); }

inline json point_json(Point p) { return {{"x", round9(p.x)}, {"y", round9(p.y)}}; }

}  // namespace weber::io
