#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "weber/error.hpp"

namespace weber {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend constexpr Point operator*(Point a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr Point operator/(Point a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(Point a, Point b) = default;

  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

constexpr double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
/// Counterclockwise quarter turn.
constexpr Point perp(Point a) { return {-a.y, a.x}; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
constexpr Point midpoint(Point a, Point b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

struct Circle {
  Point center;
  double radius = 0.0;
};

struct WeightedTerminal {
  Point point;
  double weight = 0.0;

  friend constexpr bool operator==(const WeightedTerminal&, const WeightedTerminal&) = default;
};

/// |1 1 1; p.x q.x r.x; p.y q.y r.y|, twice the signed area of pqr.
constexpr double signed_area3(Point p, Point q, Point r) {
  return (q.x * r.y - r.x * q.y) - (p.x * r.y - r.x * p.y) + (p.x * q.y - q.x * p.y);
}

inline double dist(Point p, Point q) { return std::hypot(p.x - q.x, p.y - q.y); }

inline double bbox_diagonal(std::span<const Point> pts) {
  if (pts.empty()) return 0.0;
  double x0 = pts[0].x, x1 = pts[0].x, y0 = pts[0].y, y1 = pts[0].y;
  for (const Point& p : pts) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  return std::hypot(x1 - x0, y1 - y0);
}

/// Length scale used by every relative tolerance; never zero.
inline double length_scale(std::span<const Point> pts) {
  const double d = bbox_diagonal(pts);
  return d > 0.0 ? d : 1.0;
}

/// Collinearity threshold on signed_area3 values.
inline double area_epsilon(std::span<const Point> pts) {
  const double d = length_scale(pts);
  return 1e-12 * d * d;
}

inline bool is_ccw_convex_quad(std::span<const Point, 4> pts) {
  const double eps = area_epsilon(pts);
  for (std::size_t i = 0; i < 4; ++i) {
    if (!(signed_area3(pts[i], pts[(i + 1) % 4], pts[(i + 2) % 4]) > eps)) return false;
  }
  return true;
}

inline bool is_ccw_convex_quad(const std::array<Point, 4>& pts) {
  return is_ccw_convex_quad(std::span<const Point, 4>(pts));
}

inline Circle circle_through(Point p, Point q, Point r) {
  const std::array<Point, 3> pts{p, q, r};
  const double s = signed_area3(p, q, r);
  if (!(std::abs(s) > area_epsilon(pts))) {
    throw Error(ErrorCode::DegenerateCollinear, "circle_through: points are collinear");
  }
  // Work relative to p to limit cancellation.
  const Point b = q - p;
  const Point c = r - p;
  const double bb = dot(b, b);
  const double cc = dot(c, c);
  const double d = 2.0 * cross(b, c);
  const Point u{(c.y * bb - b.y * cc) / d, (b.x * cc - c.x * bb) / d};
  return {p + u, norm(u)};
}

/// Distance from p to the infinite line through a and b.
inline double distance_to_line(Point p, Point a, Point b) {
  const Point d = b - a;
  return std::abs(cross(d, p - a)) / norm(d);
}

/// Intersection of lines ab and cd; throws DegenerateCollinear if parallel.
inline Point line_intersection(Point a, Point b, Point c, Point d) {
  const Point r = b - a;
  const Point s = d - c;
  const double den = cross(r, s);
  if (den == 0.0) throw Error(ErrorCode::DegenerateCollinear, "line_intersection: parallel lines");
  const double t = cross(c - a, s) / den;
  return a + t * r;
}

inline std::vector<Point> points_of(std::span<const WeightedTerminal> terminals) {
  std::vector<Point> pts;
  pts.reserve(terminals.size());
  for (const auto& t : terminals) pts.push_back(t.point);
  return pts;
}

}  // namespace weber
