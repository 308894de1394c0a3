#pragma once

// Deterministic SVG rendering of result documents: construction circles
// (dashed), loci (polylines), network edges, terminals and facilities, in
// that order. The y axis points up as in the plane.

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "weber/io.hpp"

namespace weber::svg {

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v == 0.0 ? 0.0 : v);
  return buf;
}

struct Bounds {
  double x0 = std::numeric_limits<double>::infinity();
  double y0 = std::numeric_limits<double>::infinity();
  double x1 = -std::numeric_limits<double>::infinity();
  double y1 = -std::numeric_limits<double>::infinity();

  void add(Point p) {
    x0 = std::min(x0, p.x);
    y0 = std::min(y0, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  }
  bool empty() const { return !(x0 <= x1); }
};

struct Circ {
  Point center;
  double radius;
};

inline std::vector<Circ> construction_circles(const io::json& c) {
  std::vector<Circ> out;
  if (!c.is_object() || !c.contains("circles")) return out;
  for (const auto& e : c["circles"]) {
    out.push_back({{e["center"]["x"].get<double>(), e["center"]["y"].get<double>()}, e["radius"].get<double>()});
  }
  return out;
}

inline std::vector<std::pair<std::string, Point>> construction_points(const io::json& c) {
  std::vector<std::pair<std::string, Point>> out;
  if (!c.is_object() || !c.contains("points")) return out;
  for (const auto& [name, p] : c["points"].items()) out.emplace_back(name, Point{p["x"].get<double>(), p["y"].get<double>()});
  return out;
}

}  // namespace detail

inline std::string render(const io::ResultDocument& doc) {
  using detail::fmt;
  const auto circles = detail::construction_circles(doc.construction);
  const auto cpoints = detail::construction_points(doc.construction);

  detail::Bounds b;
  for (const auto& t : doc.terminals) b.add(t.point);
  for (Point p : doc.facilities) b.add(p);
  for (const auto& l : doc.loci) {
    for (Point p : l.points) b.add(p);
  }
  for (const auto& c : circles) {
    b.add(c.center - Point{c.radius, c.radius});
    b.add(c.center + Point{c.radius, c.radius});
  }
  for (const auto& [_, p] : cpoints) b.add(p);
  if (b.empty()) b.add({0.0, 0.0});
  double w = b.x1 - b.x0, h = b.y1 - b.y0;
  const double span = std::max({w, h, 1e-9});
  if (w == 0.0) w = span;
  if (h == 0.0) h = span;
  const double mx = 0.1 * w, my = 0.1 * h;
  const double vx = b.x0 - mx, vy = -(b.y1 + my), vw = w + 2 * mx, vh = h + 2 * my;
  const double r = 0.012 * span;
  auto X = [](Point p) { return fmt(p.x); };
  auto Y = [](Point p) { return fmt(-p.y); };

  std::map<std::string, Point> nodes;
  for (std::size_t i = 0; i < doc.terminals.size(); ++i) nodes["P" + std::to_string(i + 1)] = doc.terminals[i].point;
  for (std::size_t i = 0; i < doc.facilities.size(); ++i) nodes["W" + std::to_string(i + 1)] = doc.facilities[i];

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" + fmt(vx) + " " + fmt(vy) + " " + fmt(vw) + " " + fmt(vh) +
       "\" width=\"800\" height=\"" + fmt(800.0 * vh / vw) + "\">\n";
  s += "<g fill=\"none\" stroke-width=\"" + fmt(0.004 * span) + "\">\n";
  for (const auto& c : circles) {
    s += "<circle class=\"construction\" cx=\"" + X(c.center) + "\" cy=\"" + Y(c.center) + "\" r=\"" + fmt(c.radius) +
         "\" stroke=\"#888888\" stroke-dasharray=\"" + fmt(0.02 * span) + "\"/>\n";
  }
  for (const auto& l : doc.loci) {
    s += "<polyline class=\"locus\" data-name=\"" + l.name + "\" stroke=\"#2a7ab0\" points=\"";
    for (std::size_t i = 0; i < l.points.size(); ++i) {
      if (i) s += ' ';
      s += X(l.points[i]) + "," + Y(l.points[i]);
    }
    s += "\"/>\n";
  }
  for (const auto& e : doc.edges) {
    const auto ia = nodes.find(e.a), ib = nodes.find(e.b);
    if (ia == nodes.end() || ib == nodes.end()) continue;
    s += "<line class=\"edge\" x1=\"" + X(ia->second) + "\" y1=\"" + Y(ia->second) + "\" x2=\"" + X(ib->second) +
         "\" y2=\"" + Y(ib->second) + "\" stroke=\"#000000\"/>\n";
  }
  s += "</g>\n";
  for (const auto& [name, p] : cpoints) {
    s += "<circle class=\"construction-point\" cx=\"" + X(p) + "\" cy=\"" + Y(p) + "\" r=\"" + fmt(0.6 * r) +
         "\" fill=\"#888888\"/>\n";
    s += "<text x=\"" + fmt(p.x + r) + "\" y=\"" + fmt(-p.y - r) + "\" font-size=\"" + fmt(3 * r) + "\">" + name +
         "</text>\n";
  }
  for (std::size_t i = 0; i < doc.terminals.size(); ++i) {
    const Point p = doc.terminals[i].point;
    s += "<circle class=\"terminal\" cx=\"" + X(p) + "\" cy=\"" + Y(p) + "\" r=\"" + fmt(r) + "\" fill=\"#c0392b\"/>\n";
    s += "<text x=\"" + fmt(p.x + r) + "\" y=\"" + fmt(-p.y - r) + "\" font-size=\"" + fmt(3 * r) + "\">P" +
         std::to_string(i + 1) + "</text>\n";
  }
  for (std::size_t i = 0; i < doc.facilities.size(); ++i) {
    const Point p = doc.facilities[i];
    s += "<rect class=\"facility\" x=\"" + fmt(p.x - r) + "\" y=\"" + fmt(-p.y - r) + "\" width=\"" + fmt(2 * r) +
         "\" height=\"" + fmt(2 * r) + "\" fill=\"#27ae60\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace weber::svg
