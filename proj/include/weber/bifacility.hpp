#pragma once

// Four terminals, two facilities: W1 serves (P1, P2), W2 serves (P3, P4) and
// the facilities are joined by a bridge of weight m. Closed-form solution by
// radicals, its feasibility conditions, and the geometric scaffolding
// (phantom points and circles) that goes with it.

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "weber/error.hpp"
#include "weber/geometry.hpp"
#include "weber/unifacility.hpp"

namespace weber {

struct QuadConfig {
  std::array<WeightedTerminal, 4> terminals;  // ccw convex order
  double bridge_weight = 0.0;

  std::array<Point, 4> points() const {
    return {terminals[0].point, terminals[1].point, terminals[2].point, terminals[3].point};
  }
  double weight(int j) const { return terminals[j].weight; }
};

struct Assumption2Report {
  double k12 = 0.0;
  double k34 = 0.0;
  // Cotangent sums; positive iff the glued weight quadrilateral is convex at
  // the vertex where the m2/m3 (resp. m1/m4) sides meet the shared side m.
  double cond_43 = 0.0;
  double cond_44 = 0.0;
  bool holds = false;
};

struct TauEtaSystem {
  std::array<double, 4> tau{};
  std::array<double, 4> eta{};
  double delta_cap = 0.0;  // (eta1 + eta2)^2 + (tau1 + tau2)^2
  double k12 = 0.0;
  double k34 = 0.0;
};

struct DeltaSet {
  std::array<double, 4> delta{};  // delta_j > 0: W_j's neighbour P_j is not hit
  double delta_bridge = 0.0;      // > 0: the two facilities do not collide
};

/// The closed-form quantities evaluated regardless of sign conditions.
struct FormalSolution {
  Point w1;
  Point w2;
  double cost = 0.0;
  TauEtaSystem system;
  DeltaSet deltas;
};

struct BiSolution {
  bool feasible = false;
  std::optional<Point> w1;
  std::optional<Point> w2;
  std::optional<double> cost;
  Assumption2Report assumption;
  std::optional<TauEtaSystem> system;
  std::optional<DeltaSet> deltas;
  std::vector<std::string> failed;  // names of violated sufficient conditions
};

struct PickScaffold {
  Point q1;
  Point q2;
  Circle c1;
  Circle c2;
  Circle c3;
  std::array<Point, 4> qtilde{};
};

struct SteinerResult {
  double a_val = 0.0;
  double b_val = 0.0;
  double delta_439 = 0.0;
  double psi = 0.0;  // angle between diagonals P1P3 and P2P4, radians
  double length = 0.0;
  bool full_tree = false;
};

/// F(W1, W2), the network cost for the fixed topology.
inline double bifacility_cost(const QuadConfig& cfg, Point w1, Point w2) {
  const auto& t = cfg.terminals;
  return t[0].weight * dist(w1, t[0].point) + t[1].weight * dist(w1, t[1].point) +
         t[2].weight * dist(w2, t[2].point) + t[3].weight * dist(w2, t[3].point) +
         cfg.bridge_weight * dist(w1, w2);
}

/// Gradient of F with respect to (W1, W2); zero-length edges are skipped.
inline std::array<Point, 2> bifacility_gradient(const QuadConfig& cfg, Point w1, Point w2) {
  const auto& t = cfg.terminals;
  auto pull = [](Point from, Point to, double w) {
    const double d = dist(from, to);
    return d > 0.0 ? (w / d) * (from - to) : Point{};
  };
  const Point bridge = pull(w1, w2, cfg.bridge_weight);
  return {pull(w1, t[0].point, t[0].weight) + pull(w1, t[1].point, t[1].weight) + bridge,
          pull(w2, t[2].point, t[2].weight) + pull(w2, t[3].point, t[3].weight) - bridge};
}

/// Largest stationarity residual over the four partial derivatives, divided
/// by the total weight.
inline double bifacility_stationarity(const QuadConfig& cfg, Point w1, Point w2) {
  const auto g = bifacility_gradient(cfg, w1, w2);
  double total = cfg.bridge_weight;
  for (const auto& t : cfg.terminals) total += t.weight;
  return std::max({std::abs(g[0].x), std::abs(g[0].y), std::abs(g[1].x), std::abs(g[1].y)}) / total;
}

inline void validate_quad(const QuadConfig& cfg) {
  for (const auto& t : cfg.terminals) {
    if (!(t.weight > 0.0) || !std::isfinite(t.weight)) {
      throw Error(ErrorCode::MalformedInput, "terminal weights must be positive and finite");
    }
    if (!t.point.finite()) throw Error(ErrorCode::MalformedInput, "terminal coordinates must be finite");
  }
  if (!(cfg.bridge_weight > 0.0) || !std::isfinite(cfg.bridge_weight)) {
    throw Error(ErrorCode::MalformedInput, "bridge weight must be positive and finite");
  }
  if (!is_ccw_convex_quad(cfg.points())) {
    throw Error(ErrorCode::DegenerateQuad, "terminals must form a strictly convex ccw quadrilateral");
  }
}

inline Assumption2Report assumption2(const QuadConfig& cfg) {
  const double m = cfg.bridge_weight;
  const double m1 = cfg.weight(0), m2 = cfg.weight(1), m3 = cfg.weight(2), m4 = cfg.weight(3);
  Assumption2Report rep;
  rep.k12 = weight_triangle_k(m, m1, m2);
  rep.k34 = weight_triangle_k(m, m3, m4);
  if (rep.k12 > 0.0 && rep.k34 > 0.0) {
    const double s12 = std::sqrt(rep.k12), s34 = std::sqrt(rep.k34);
    const double mm = m * m;
    rep.cond_43 = (mm - m1 * m1 + m2 * m2) / s12 + (mm - m4 * m4 + m3 * m3) / s34;
    rep.cond_44 = (mm + m1 * m1 - m2 * m2) / s12 + (mm + m4 * m4 - m3 * m3) / s34;
  } else {
    rep.cond_43 = rep.cond_44 = std::numeric_limits<double>::quiet_NaN();
  }
  rep.holds = rep.k12 > 0.0 && rep.k34 > 0.0 && rep.cond_43 > 0.0 && rep.cond_44 > 0.0;
  return rep;
}

namespace detail {

struct TauPair {
  double tau_a, tau_b, eta_a, eta_b;
};

// tau/eta for the pair (a, b) sharing a facility, with (c, d) the far pair.
// The (3, 4) values come from the same expression under 1<->3, 2<->4.
inline TauPair tau_pair(const QuadConfig& cfg, int a, int b, int c, int d) {
  const double m = cfg.bridge_weight, mm = m * m;
  const auto& t = cfg.terminals;
  const double ma = t[a].weight, mb = t[b].weight, mc = t[c].weight, md = t[d].weight;
  const auto [xa, ya] = t[a].point;
  const auto [xb, yb] = t[b].point;
  const auto [xc, yc] = t[c].point;
  const auto [xd, yd] = t[d].point;
  const double kab = weight_triangle_k(m, ma, mb);
  const double kcd = weight_triangle_k(m, mc, md);
  const double sab = std::sqrt(kab), scd = std::sqrt(kcd);
  const double plus_ab = mm + ma * ma - mb * mb;
  const double minus_ab = mm - ma * ma + mb * mb;
  const double plus_cd = mm + mc * mc - md * md;
  const double minus_cd = mm - mc * mc + md * md;

  const double far = scd * (xd - xc) - plus_cd * yc - minus_cd * yd;
  const double mix = scd * (yc - yd) + plus_ab * xa + minus_ab * xb - plus_cd * xc - minus_cd * xd;
  TauPair r{};
  r.tau_a = sab * far + 2.0 * mm * sab * yb + kab * (xa - xb) + plus_ab * mix;
  r.tau_b = -sab * far - 2.0 * mm * sab * ya - kab * (xa - xb) + minus_ab * mix;
  const double base = mm - ma * ma - mb * mb;
  r.eta_a = (base * r.tau_a - 2.0 * ma * ma * r.tau_b) / sab;
  r.eta_b = (2.0 * mb * mb * r.tau_a - base * r.tau_b) / sab;
  return r;
}

inline void require_weight_triangles(const QuadConfig& cfg) {
  const double m = cfg.bridge_weight;
  if (!(weight_triangle_k(m, cfg.weight(0), cfg.weight(1)) > 0.0) ||
      !(weight_triangle_k(m, cfg.weight(2), cfg.weight(3)) > 0.0)) {
    throw Error(ErrorCode::AssumptionViolated, "weight triangles {m, m1, m2} and {m, m3, m4} must exist");
  }
}

inline TauEtaSystem tau_eta_unchecked(const QuadConfig& cfg) {
  require_weight_triangles(cfg);
  const auto p12 = tau_pair(cfg, 0, 1, 2, 3);
  const auto p34 = tau_pair(cfg, 2, 3, 0, 1);
  TauEtaSystem sys;
  sys.tau = {p12.tau_a, p12.tau_b, p34.tau_a, p34.tau_b};
  sys.eta = {p12.eta_a, p12.eta_b, p34.eta_a, p34.eta_b};
  const double se = sys.eta[0] + sys.eta[1];
  const double st = sys.tau[0] + sys.tau[1];
  sys.delta_cap = se * se + st * st;
  const double m = cfg.bridge_weight;
  sys.k12 = weight_triangle_k(m, cfg.weight(0), cfg.weight(1));
  sys.k34 = weight_triangle_k(m, cfg.weight(2), cfg.weight(3));
  return sys;
}

}  // namespace detail

inline TauEtaSystem tau_eta(const QuadConfig& cfg) {
  if (!assumption2(cfg).holds) {
    throw Error(ErrorCode::AssumptionViolated, "weight quadrilateral is not convex");
  }
  return detail::tau_eta_unchecked(cfg);
}

inline DeltaSet deltas(const QuadConfig& cfg, const TauEtaSystem& sys) {
  const auto p = cfg.points();
  const auto& tau = sys.tau;
  const auto& eta = sys.eta;
  const double m = cfg.bridge_weight, mm = m * m;
  const double m1 = cfg.weight(0), m2 = cfg.weight(1), m3 = cfg.weight(2), m4 = cfg.weight(3);
  DeltaSet ds;
  ds.delta[0] = eta[1] * (p[0].x - p[1].x) + tau[1] * (p[1].y - p[0].y);
  ds.delta[1] = eta[0] * (p[0].x - p[1].x) + tau[0] * (p[1].y - p[0].y);
  ds.delta[2] = eta[3] * (p[2].x - p[3].x) + tau[3] * (p[3].y - p[2].y);
  ds.delta[3] = eta[2] * (p[2].x - p[3].x) + tau[2] * (p[3].y - p[2].y);
  ds.delta_bridge = -ds.delta[0] * (mm + m1 * m1 - m2 * m2) / std::sqrt(sys.k12) -
                    ds.delta[2] * (mm + m3 * m3 - m4 * m4) / std::sqrt(sys.k34) +
                    (eta[0] + eta[1]) * (p[0].y - p[2].y) + (tau[0] + tau[1]) * (p[0].x - p[2].x);
  return ds;
}

/// Closed-form facilities and cost with no sign checks; needs only the two
/// weight triangles. Used for sweeps across bifurcations and dual configs.
inline FormalSolution formal_solution(const QuadConfig& cfg) {
  FormalSolution f;
  f.system = detail::tau_eta_unchecked(cfg);
  f.deltas = deltas(cfg, f.system);
  const auto p = cfg.points();
  const double mm = cfg.bridge_weight * cfg.bridge_weight;
  const double big = f.system.delta_cap;
  const double c1 = 2.0 * f.deltas.delta[0] * mm / (std::sqrt(f.system.k12) * big);
  const double c3 = 2.0 * f.deltas.delta[2] * mm / (std::sqrt(f.system.k34) * big);
  f.w1 = {p[0].x - c1 * f.system.tau[0], p[0].y - c1 * f.system.eta[0]};
  f.w2 = {p[2].x - c3 * f.system.tau[2], p[2].y - c3 * f.system.eta[2]};
  f.cost = std::sqrt(big) / (4.0 * mm * cfg.bridge_weight);
  return f;
}

/// Optimal bifacility network under the sufficient existence conditions.
/// Infeasibility is a result state listing the failed conditions; it does
/// not prove that no bifacility network exists.
inline BiSolution solve_bifacility(const QuadConfig& cfg) {
  validate_quad(cfg);
  BiSolution sol;
  sol.assumption = assumption2(cfg);
  const auto& a = sol.assumption;
  if (!(a.k12 > 0.0)) sol.failed.emplace_back("weight_triangle_12");
  if (!(a.k34 > 0.0)) sol.failed.emplace_back("weight_triangle_34");
  if (!sol.failed.empty()) return sol;
  if (!(a.cond_43 > 0.0)) sol.failed.emplace_back("weight_quad_vertex_23");
  if (!(a.cond_44 > 0.0)) sol.failed.emplace_back("weight_quad_vertex_14");

  const FormalSolution f = formal_solution(cfg);
  sol.system = f.system;
  sol.deltas = f.deltas;
  for (int j = 0; j < 4; ++j) {
    if (!(f.deltas.delta[j] > 0.0)) sol.failed.push_back("delta_" + std::to_string(j + 1));
  }
  if (!(f.deltas.delta_bridge > 0.0)) sol.failed.emplace_back("delta_bridge");
  if (!sol.failed.empty()) return sol;

  sol.feasible = true;
  sol.w1 = f.w1;
  sol.w2 = f.w2;
  sol.cost = f.cost;
  return sol;
}

/// Convenience wrapper for arbitrary ccw order: tries both pairings of
/// adjacent terminals and keeps the cheaper feasible one.
struct PairedSolution {
  BiSolution solution;
  QuadConfig config;  // terminals as solved: config.terminals[j] = input[(j + shift) % 4]
  int shift = 0;
};

inline PairedSolution solve_best_pairing(const QuadConfig& cfg) {
  std::optional<PairedSolution> best;
  PairedSolution first;
  for (int shift = 0; shift < 2; ++shift) {
    QuadConfig c = cfg;
    for (int j = 0; j < 4; ++j) c.terminals[j] = cfg.terminals[(j + shift) % 4];
    PairedSolution cand{solve_bifacility(c), c, shift};
    if (shift == 0) first = cand;
    if (cand.solution.feasible && (!best || *cand.solution.cost < *best->solution.cost)) best = cand;
  }
  return best ? *best : first;
}

/// Needs only the two weight triangles; the construction is still drawn when
/// the weight quadrilateral is not convex (the facilities then fall outside).
inline PickScaffold pick_scaffold(const QuadConfig& cfg) {
  detail::require_weight_triangles(cfg);
  const auto p = cfg.points();
  const double m = cfg.bridge_weight;
  const double m1 = cfg.weight(0), m2 = cfg.weight(1), m3 = cfg.weight(2), m4 = cfg.weight(3);
  PickScaffold s;
  s.q1 = q_point(p[0], p[1], m1, m2, m);
  s.q2 = q_point(p[2], p[3], m3, m4, m);
  s.qtilde[0] = q_point(p[1], s.q2, m2, m, m1);
  s.qtilde[1] = q_point(s.q2, p[0], m, m1, m2);
  s.qtilde[2] = q_point(p[3], s.q1, m4, m, m3);
  s.qtilde[3] = q_point(s.q1, p[2], m, m3, m4);
  s.c1 = circle_c1(p[0], p[1], m1, m2, m);
  s.c2 = circle_c1(p[2], p[3], m3, m4, m);
  s.c3 = circle_through(s.q1, p[3], s.qtilde[2]);
  return s;
}

/// Bridge delta expanded in coordinates, weights and terminal determinants.
/// Agrees with deltas(...).delta_bridge.
inline double delta_detailed(const QuadConfig& cfg) {
  const auto a = assumption2(cfg);
  if (!a.holds) throw Error(ErrorCode::AssumptionViolated, "weight quadrilateral is not convex");
  const auto p = cfg.points();
  const auto [x1, y1] = p[0];
  const auto [x2, y2] = p[1];
  const auto [x3, y3] = p[2];
  const auto [x4, y4] = p[3];
  const double m = cfg.bridge_weight, mm = m * m;
  const double q1 = cfg.weight(0) * cfg.weight(0), q2 = cfg.weight(1) * cfg.weight(1);
  const double q3 = cfg.weight(2) * cfg.weight(2), q4 = cfg.weight(3) * cfg.weight(3);
  const double s12 = std::sqrt(a.k12), s34 = std::sqrt(a.k34);

  double v = 4.0 * mm * mm * ((x1 - x3) * (x2 - x4) + (y1 - y3) * (y2 - y4));
  v += 2.0 / s34 * ((q1 - q2) * a.k34 - mm * (mm - q1 + q2) * (mm - q3 - q4)) * signed_area3(p[1], p[2], p[3]);
  v += 2.0 / s34 * ((q2 - q1) * a.k34 - mm * (mm + q1 - q2) * (mm - q3 - q4)) * signed_area3(p[0], p[2], p[3]);
  v += 2.0 / s12 * ((q3 - q4) * a.k12 - mm * (mm - q3 + q4) * (mm - q1 - q2)) * signed_area3(p[0], p[1], p[3]);
  v += 2.0 / s12 * ((q4 - q3) * a.k12 - mm * (mm + q3 - q4) * (mm - q1 - q2)) * signed_area3(p[0], p[1], p[2]);
  const double ds = s12 - s34;
  const double mix = s34 * (q2 - q1) + s12 * (q3 - q4);
  v += (ds * ds * mm * mm - mix * mix) / (s12 * s34) * ((x4 - x3) * (x2 - x1) + (y4 - y3) * (y2 - y1));
  return v;
}

/// 4x4 determinant representation of the bridge delta; empty when the edges
/// P1P2 and P3P4 are (numerically) parallel.
inline std::optional<double> delta_determinant_form(const QuadConfig& cfg, const DeltaSet& ds) {
  const auto p = cfg.points();
  const Point e12 = p[0] - p[1];
  const Point e34 = p[2] - p[3];
  const double den = cross(e12, e34);
  if (std::abs(den) <= 1e-9 * norm(e12) * norm(e34)) return std::nullopt;
  const double m = cfg.bridge_weight, mm = m * m;
  const double q1 = cfg.weight(0) * cfg.weight(0), q2 = cfg.weight(1) * cfg.weight(1);
  const double q3 = cfg.weight(2) * cfg.weight(2), q4 = cfg.weight(3) * cfg.weight(3);
  const double s12 = std::sqrt(weight_triangle_k(m, cfg.weight(0), cfg.weight(1)));
  const double s34 = std::sqrt(weight_triangle_k(m, cfg.weight(2), cfg.weight(3)));
  const std::array<double, 4> col{-ds.delta[0] * (mm + q1 - q2) / s12, -ds.delta[1] * (mm - q1 + q2) / s12,
                                  ds.delta[2] * (mm + q3 - q4) / s34, ds.delta[3] * (mm - q3 + q4) / s34};
  // Subtract row 1 to reduce |1 x y c| to a 3x3 determinant.
  std::array<std::array<double, 3>, 3> r{};
  for (int i = 0; i < 3; ++i) r[i] = {p[i + 1].x - p[0].x, p[i + 1].y - p[0].y, col[i + 1] - col[0]};
  const double det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) -
                     r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0]) +
                     r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
  return det / den;
}

/// Equal weights and unit bridge: the full Steiner tree specialization.
inline SteinerResult steiner_case(const std::array<Point, 4>& q) {
  if (!is_ccw_convex_quad(q)) throw Error(ErrorCode::DegenerateQuad, "steiner_case: not a ccw convex quadrilateral");
  const double r3 = std::numbers::sqrt3;
  const auto [x1, y1] = q[0];
  const auto [x2, y2] = q[1];
  const auto [x3, y3] = q[2];
  const auto [x4, y4] = q[3];
  SteinerResult s;
  s.a_val = r3 * (x1 - x2 - x3 + x4) + (y1 + y2 - y3 - y4);
  s.b_val = (x1 + x2 - x3 - x4) + r3 * (-y1 + y2 + y3 - y4);
  // [P1P3] . R(-30deg) . [P2P4]
  const Point d13 = q[2] - q[0];
  const Point d24 = q[3] - q[1];
  const Point row{d13.x * r3 / 2.0 - d13.y / 2.0, d13.x / 2.0 + d13.y * r3 / 2.0};
  s.delta_439 = 8.0 / r3 * dot(row, d24);
  s.psi = std::atan2(std::abs(cross(d13, d24)), dot(d13, d24));
  s.length = 0.5 * std::sqrt(s.a_val * s.a_val + s.b_val * s.b_val);
  s.full_tree = s.delta_439 > 0.0;
  return s;
}

/// Dual configuration: the four cross phantom points with the original
/// weights and bridge. Not convex-feasible in general (its delta is negative).
inline QuadConfig dual_quad(const QuadConfig& cfg) {
  const PickScaffold s = pick_scaffold(cfg);
  QuadConfig dual = cfg;
  for (int j = 0; j < 4; ++j) dual.terminals[j].point = s.qtilde[j];
  return dual;
}

namespace detail {

// Leading principal minors by Gaussian elimination without pivoting: the
// k-th pivot is the ratio of consecutive minors.
inline bool leading_minors_positive(std::array<std::array<double, 4>, 4> h) {
  for (int k = 0; k < 4; ++k) {
    if (!(h[k][k] > 0.0)) return false;
    for (int i = k + 1; i < 4; ++i) {
      const double f = h[i][k] / h[k][k];
      for (int j = k; j < 4; ++j) h[i][j] -= f * h[k][j];
    }
  }
  return true;
}

}  // namespace detail

/// Central-difference Hessian of F at (w1, w2); true iff positive definite.
inline bool hessian_pd_at(const QuadConfig& cfg, Point w1, Point w2) {
  const double h = 1e-5 * length_scale(cfg.points());
  const std::array<double, 4> z{w1.x, w1.y, w2.x, w2.y};
  auto f = [&](std::array<double, 4> v) { return bifacility_cost(cfg, {v[0], v[1]}, {v[2], v[3]}); };
  auto shifted = [&](int i, double di, int j, double dj) {
    auto v = z;
    v[i] += di;
    v[j] += dj;
    return f(v);
  };
  std::array<std::array<double, 4>, 4> hess{};
  const double f0 = f(z);
  for (int i = 0; i < 4; ++i) {
    hess[i][i] = (shifted(i, h, i, 0.0) - 2.0 * f0 + shifted(i, -h, i, 0.0)) / (h * h);
    for (int j = i + 1; j < 4; ++j) {
      hess[i][j] = hess[j][i] =
          (shifted(i, h, j, h) - shifted(i, h, j, -h) - shifted(i, -h, j, h) + shifted(i, -h, j, -h)) / (4.0 * h * h);
    }
  }
  return detail::leading_minors_positive(hess);
}

inline bool hessian_pd_check(const QuadConfig& cfg, const BiSolution& sol) {
  if (!sol.feasible) return false;
  return hessian_pd_at(cfg, *sol.w1, *sol.w2);
}

}  // namespace weber
