#pragma once

// Single-facility Weber problem: closed-form three-terminal solver, the
// phantom point and circle constructions around it, locus curves under a
// varying weight, and a modified Weiszfeld iteration for any n.

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "weber/error.hpp"
#include "weber/geometry.hpp"

namespace weber {

struct TriConfig {
  std::array<WeightedTerminal, 3> terminals;

  std::array<Point, 3> points() const {
    return {terminals[0].point, terminals[1].point, terminals[2].point};
  }
};

/// (m1+m2+m3)(-m1+m2+m3)(m1-m2+m3)(m1+m2-m3); positive iff a triangle with
/// side lengths m1, m2, m3 exists, and then sqrt(k)/4 is its area.
constexpr double weight_triangle_k(double m1, double m2, double m3) {
  return (m1 + m2 + m3) * (-m1 + m2 + m3) * (m1 - m2 + m3) * (m1 + m2 - m3);
}

struct ExistenceReport3 {
  std::array<double, 3> cos_alpha{};  // terminal triangle angle at P_j
  std::array<double, 3> cos_beta{};   // weight triangle angle opposite side m_j
  bool weight_triangle_exists = false;
  bool feasible = false;
};

struct UniSolution3 {
  Point w;
  double cost = 0.0;
  double k = 0.0;
  double d = 0.0;
  std::array<double, 3> bigK{};
  double s_abs = 0.0;
  std::array<double, 3> r{};  // r12, r13, r23
};

struct LocusResidual {
  double raw = 0.0;
  double normalized = 0.0;  // raw / (w_max^p * L^q), dimensionless
};

inline double weber_cost(std::span<const WeightedTerminal> terminals, Point w) {
  double c = 0.0;
  for (const auto& t : terminals) c += t.weight * dist(w, t.point);
  return c;
}

/// Gradient of the weighted distance sum; terms at coincident terminals are
/// skipped, so at a terminal this is the resultant pull of the others.
inline Point weber_gradient(std::span<const WeightedTerminal> terminals, Point w) {
  Point g{};
  for (const auto& t : terminals) {
    const double d = dist(w, t.point);
    if (d > 0.0) g = g + (t.weight / d) * (w - t.point);
  }
  return g;
}

namespace detail {

inline void check_tri(const TriConfig& cfg) {
  for (const auto& t : cfg.terminals) {
    if (!(t.weight > 0.0) || !std::isfinite(t.weight)) {
      throw Error(ErrorCode::MalformedInput, "terminal weights must be positive and finite");
    }
    if (!t.point.finite()) throw Error(ErrorCode::MalformedInput, "terminal coordinates must be finite");
  }
  const auto pts = cfg.points();
  if (!(std::abs(signed_area3(pts[0], pts[1], pts[2])) > area_epsilon(pts))) {
    throw Error(ErrorCode::DegenerateCollinear, "terminal triangle has zero area");
  }
}

inline double clamp_unit(double c) { return std::max(-1.0, std::min(1.0, c)); }

}  // namespace detail

inline ExistenceReport3 existence3(const TriConfig& cfg) {
  detail::check_tri(cfg);
  ExistenceReport3 rep;
  const auto& t = cfg.terminals;
  for (int j = 0; j < 3; ++j) {
    const int a = (j + 1) % 3;
    const int b = (j + 2) % 3;
    const double ra = dist(t[j].point, t[a].point);
    const double rb = dist(t[j].point, t[b].point);
    const double rab = dist(t[a].point, t[b].point);
    rep.cos_alpha[j] = detail::clamp_unit((ra * ra + rb * rb - rab * rab) / (2.0 * ra * rb));
    const double ma = t[a].weight, mb = t[b].weight, mj = t[j].weight;
    rep.cos_beta[j] = detail::clamp_unit((ma * ma + mb * mb - mj * mj) / (2.0 * ma * mb));
  }
  rep.weight_triangle_exists = weight_triangle_k(t[0].weight, t[1].weight, t[2].weight) > 0.0;
  rep.feasible = rep.weight_triangle_exists;
  for (int j = 0; j < 3; ++j) rep.feasible = rep.feasible && (rep.cos_alpha[j] + rep.cos_beta[j] > 0.0);
  return rep;
}

/// Closed-form optimal facility for three terminals in general position.
/// Throws InfeasibleTopology when the optimum is not interior (it then sits
/// at a terminal; see best_terminal).
inline UniSolution3 solve3(const TriConfig& cfg) {
  if (!existence3(cfg).feasible) {
    throw Error(ErrorCode::InfeasibleTopology, "three-terminal optimum collides with a terminal");
  }
  const auto& t = cfg.terminals;
  const Point p1 = t[0].point, p2 = t[1].point, p3 = t[2].point;
  const double m1 = t[0].weight, m2 = t[1].weight, m3 = t[2].weight;

  UniSolution3 sol;
  sol.r = {dist(p1, p2), dist(p1, p3), dist(p2, p3)};
  const double r12s = sol.r[0] * sol.r[0];
  const double r13s = sol.r[1] * sol.r[1];
  const double r23s = sol.r[2] * sol.r[2];
  sol.k = weight_triangle_k(m1, m2, m3);
  const double sk = std::sqrt(sol.k);
  sol.s_abs = std::abs(signed_area3(p1, p2, p3));

  const double K1 = (r12s + r13s - r23s) * sk / 2.0 + (m2 * m2 + m3 * m3 - m1 * m1) * sol.s_abs;
  const double K2 = (r23s + r12s - r13s) * sk / 2.0 + (m1 * m1 + m3 * m3 - m2 * m2) * sol.s_abs;
  const double K3 = (r13s + r23s - r12s) * sk / 2.0 + (m1 * m1 + m2 * m2 - m3 * m3) * sol.s_abs;
  sol.bigK = {K1, K2, K3};
  sol.d = (m1 * m1 * K1 + m2 * m2 * K2 + m3 * m3 * K3) / sk;

  // K1 K2 K3 * sum(x_j / K_j), expanded to avoid dividing by K_j.
  const double scale = 1.0 / (2.0 * sol.s_abs * sk * sol.d);
  sol.w = {scale * (p1.x * K2 * K3 + p2.x * K1 * K3 + p3.x * K1 * K2),
           scale * (p1.y * K2 * K3 + p2.y * K1 * K3 + p3.y * K1 * K2)};
  sol.cost = std::sqrt(sol.d);
  return sol;
}

/// Apex Q of the triangle P1 P2 Q similar to the weight triangle {m, m1, m2}:
/// |P1Q| = (m2/m)|P1P2|, |P2Q| = (m1/m)|P1P2|. Q lies to the right of the
/// directed line P1 -> P2.
inline Point q_point(Point p1, Point p2, double m1, double m2, double m) {
  const double k = weight_triangle_k(m1, m2, m);
  if (!(k > 0.0)) throw Error(ErrorCode::NoWeightTriangle, "q_point: weights violate the triangle inequality");
  const Point e = p1 - p2;
  return midpoint(p1, p2) + ((m1 * m1 - m2 * m2) * e + std::sqrt(k) * perp(e)) / (2.0 * m * m);
}

/// Circle through P1, P2 and q_point(P1, P2, m1, m2, m); the optimal facility
/// attached to P1, P2 with a third pull of weight m lies on it.
inline Circle circle_c1(Point p1, Point p2, double m1, double m2, double m) {
  const double k = weight_triangle_k(m1, m2, m);
  if (!(k > 0.0)) throw Error(ErrorCode::NoWeightTriangle, "circle_c1: weights violate the triangle inequality");
  const double sk = std::sqrt(k);
  const Point e = p1 - p2;
  return {midpoint(p1, p2) + ((m1 * m1 + m2 * m2 - m * m) / (2.0 * sk)) * perp(e), m1 * m2 * norm(e) / sk};
}

/// Dual triangle: the apex points built outward on each side, keeping the
/// weight of the opposite vertex. Same optimal facility, twice the cost.
inline TriConfig dual_triangle(const TriConfig& cfg) {
  detail::check_tri(cfg);
  const auto& t = cfg.terminals;
  const bool ccw = signed_area3(t[0].point, t[1].point, t[2].point) > 0.0;
  TriConfig dual;
  for (int j = 0; j < 3; ++j) {
    // Side (a, b) opposite vertex j, ordered so that (a, b, j) is ccw.
    int a = (j + 1) % 3;
    int b = (j + 2) % 3;
    if (!ccw) std::swap(a, b);
    dual.terminals[j] = {q_point(t[a].point, t[b].point, t[a].weight, t[b].weight, t[j].weight), t[j].weight};
  }
  return dual;
}

/// Quartic locus of the optimal facility as m3 varies (m3 itself unused):
/// m1^2 S2^2 |W P2|^2 - m2^2 S1^2 |W P1|^2 with S1 = [W P2 P3], S2 = [P1 W P3].
inline LocusResidual locus_residual_3(const TriConfig& cfg, Point probe) {
  const auto& t = cfg.terminals;
  const Point p1 = t[0].point, p2 = t[1].point, p3 = t[2].point;
  const double m1 = t[0].weight, m2 = t[1].weight;
  const double s1 = signed_area3(probe, p2, p3);
  const double s2 = signed_area3(p1, probe, p3);
  const double d1 = dist(probe, p1), d2 = dist(probe, p2);
  LocusResidual res;
  res.raw = m1 * m1 * s2 * s2 * d2 * d2 - m2 * m2 * s1 * s1 * d1 * d1;
  const auto pts = cfg.points();
  const double L = length_scale(pts);
  const double w = std::max(m1, m2);
  res.normalized = res.raw / (w * w * std::pow(L, 6));
  return res;
}

/// Locus of the four-terminal optimal facility as m3 varies (m3 unused).
inline LocusResidual locus_residual_4(std::span<const WeightedTerminal, 4> t, Point probe) {
  const Point p1 = t[0].point, p2 = t[1].point, p3 = t[2].point, p4 = t[3].point;
  const std::array<Point, 4> pts{p1, p2, p3, p4};
  const double L = length_scale(pts);
  const double d1 = dist(probe, p1), d2 = dist(probe, p2), d4 = dist(probe, p4);
  const double eps = 1e-10 * L;
  if (d1 < eps || d2 < eps || d4 < eps) {
    throw Error(ErrorCode::ProbeAtTerminal, "locus_residual_4: probe coincides with a terminal");
  }
  const double m1 = t[0].weight, m2 = t[1].weight, m4 = t[3].weight;
  const double s1 = signed_area3(probe, p2, p3);
  const double s2 = signed_area3(p1, probe, p3);
  const double s4 = signed_area3(probe, p3, p4);
  const double a = m1 * m1 * s2 * s2 / (d1 * d1);
  const double b = m2 * m2 * s1 * s1 / (d2 * d2);
  const double c = m4 * m4 * s4 * s4 / (d4 * d4);
  LocusResidual res;
  res.raw = a * a + b * b + c * c - 2.0 * (a * b + a * c + b * c);
  const double w = std::max({m1, m2, m4});
  res.normalized = res.raw / (std::pow(w, 4) * std::pow(L, 4));
  return res;
}

inline LocusResidual locus_residual_4(const std::array<WeightedTerminal, 4>& t, Point probe) {
  return locus_residual_4(std::span<const WeightedTerminal, 4>(t), probe);
}

/// Intersection of the diagonals; optimal for weights (m1, m2, m1, m2).
inline Point diagonal_point(const std::array<Point, 4>& q) {
  if (!is_ccw_convex_quad(q)) throw Error(ErrorCode::DegenerateQuad, "diagonal_point: not a ccw convex quadrilateral");
  const auto [x1, y1] = q[0];
  const auto [x2, y2] = q[1];
  const auto [x3, y3] = q[2];
  const auto [x4, y4] = q[3];
  const double den = (x3 - x1) * (y2 - y4) - (x2 - x4) * (y3 - y1);
  return {((x1 - x3) * (x2 * y4 - y2 * x4) - (x2 - x4) * (y3 * x1 - y1 * x3)) / den,
          ((y1 - y3) * (x2 * y4 - y2 * x4) - (y2 - y4) * (y3 * x1 - y1 * x3)) / den};
}

/// Tolerances are relative to the bounding-box diagonal of the terminals.
struct WeiszfeldSettings {
  double tolerance = 1e-12;        // stop when an iterate moves less than this
  long max_iterations = 100000;
  double terminal_radius = 1e-10;  // closer than this counts as "at the terminal"
};

struct WeiszfeldResult {
  Point point;
  double cost = 0.0;
  long iterations = 0;
  bool converged = false;
  std::optional<std::size_t> terminal;  // set when the optimum is a terminal
};

namespace detail {

struct TerminalPull {
  double own_weight = 0.0;  // total weight sitting at the terminal location
  Point resultant;          // summed weighted unit vectors towards the others
};

inline TerminalPull terminal_pull(std::span<const WeightedTerminal> t, std::size_t k, double radius) {
  TerminalPull pull;
  for (const auto& other : t) {
    const double d = dist(other.point, t[k].point);
    if (d <= radius) {
      pull.own_weight += other.weight;
    } else {
      pull.resultant = pull.resultant + (other.weight / d) * (other.point - t[k].point);
    }
  }
  return pull;
}

}  // namespace detail

/// Modified Weiszfeld iteration with a safeguarded Newton step. Terminals are
/// first tested for optimality; an iterate landing on a non-optimal terminal
/// is pushed off it along the descent direction.
inline WeiszfeldResult weiszfeld(std::span<const WeightedTerminal> t, Point init, const WeiszfeldSettings& s = {}) {
  if (t.empty()) throw Error(ErrorCode::MalformedInput, "weiszfeld: no terminals");
  if (!init.finite()) throw Error(ErrorCode::MalformedInput, "weiszfeld: non-finite initial point");
  const auto pts = points_of(t);
  const double scale = length_scale(pts);
  const double tol = s.tolerance * scale;
  const double radius = s.terminal_radius * scale;

  for (std::size_t k = 0; k < t.size(); ++k) {
    const auto pull = detail::terminal_pull(t, k, radius);
    if (norm(pull.resultant) <= pull.own_weight) {
      return {t[k].point, weber_cost(t, t[k].point), 0, true, k};
    }
  }

  Point x = init;
  double fx = weber_cost(t, x);
  WeiszfeldResult res{x, fx, 0, false, std::nullopt};
  for (long it = 1; it <= s.max_iterations; ++it) {
    res.iterations = it;
    std::optional<std::size_t> near;
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (dist(x, t[k].point) <= radius) near = k;
    }
    if (near) {
      const auto pull = detail::terminal_pull(t, *near, radius);
      x = t[*near].point + (1e-6 * scale / norm(pull.resultant)) * pull.resultant;
      fx = weber_cost(t, x);
      continue;
    }

    Point num{};
    double den = 0.0;
    double hxx = 0.0, hxy = 0.0, hyy = 0.0;
    Point g{};
    for (const auto& tj : t) {
      const Point v = x - tj.point;
      const double d = norm(v);
      const double w = tj.weight / d;
      num = num + w * tj.point;
      den += w;
      g = g + w * v;
      const Point u = v / d;
      hxx += w * (1.0 - u.x * u.x);
      hxy -= w * u.x * u.y;
      hyy += w * (1.0 - u.y * u.y);
    }
    Point next = num / den;
    double fnext = weber_cost(t, next);
    const double det = hxx * hyy - hxy * hxy;
    if (det > 1e-14 * den * den) {
      const Point xn{x.x - (hyy * g.x - hxy * g.y) / det, x.y - (hxx * g.y - hxy * g.x) / det};
      const double fn = weber_cost(t, xn);
      if (xn.finite() && fn < fnext) {
        next = xn;
        fnext = fn;
      }
    }
    const double step = dist(x, next);
    x = next;
    fx = fnext;
    if (step <= tol) {
      res.converged = true;
      break;
    }
  }
  res.point = x;
  res.cost = fx;
  return res;
}

inline WeiszfeldResult weiszfeld(std::span<const WeightedTerminal> t, const WeiszfeldSettings& s = {}) {
  Point c{};
  double wsum = 0.0;
  for (const auto& tj : t) {
    c = c + tj.weight * tj.point;
    wsum += tj.weight;
  }
  return weiszfeld(t, c / wsum, s);
}

/// Cheapest terminal location, by exhaustive comparison of the n costs.
inline std::size_t best_terminal(std::span<const WeightedTerminal> t) {
  std::size_t best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double c = weber_cost(t, t[k].point);
    if (c < best_cost) {
      best_cost = c;
      best = k;
    }
  }
  return best;
}

}  // namespace weber
