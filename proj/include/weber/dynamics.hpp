#pragma once

// Facility dynamics under a varying parameter: sweeps with status
// classification, bifurcation roots of the delta functions, the W2 locus
// curve for a free m3, and derivative / ray-invariance checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <future>
#include <optional>
#include <thread>
#include <vector>

#include "weber/bifacility.hpp"
#include "weber/error.hpp"
#include "weber/geometry.hpp"

namespace weber {

enum class SweepStatus { Bifacility, FacilitiesCollided, FacilityAtTerminal, Infeasible };

inline const char* to_string(SweepStatus s) {
  switch (s) {
    case SweepStatus::Bifacility: return "BIFACILITY";
    case SweepStatus::FacilitiesCollided: return "FACILITIES_COLLIDED";
    case SweepStatus::FacilityAtTerminal: return "FACILITY_AT_TERMINAL";
    case SweepStatus::Infeasible: return "INFEASIBLE";
  }
  return "UNKNOWN";
}

struct SweepRecord {
  double param = 0.0;
  SweepStatus status = SweepStatus::Infeasible;
  int terminal = 0;  // 1-based, set for FacilityAtTerminal
  std::optional<Point> w1;
  std::optional<Point> w2;
  std::optional<double> cost;
  std::optional<DeltaSet> deltas;
};

struct ParamSelector {
  enum class Kind { Weight, BridgeWeight, TerminalPath };
  Kind kind = Kind::BridgeWeight;
  int index = 1;  // 1-based terminal index for Weight and TerminalPath
  Point start;    // TerminalPath: param 0 -> start, 1 -> end
  Point end;

  static ParamSelector weight(int j) { return {Kind::Weight, j, {}, {}}; }
  static ParamSelector bridge() { return {Kind::BridgeWeight, 1, {}, {}}; }
  static ParamSelector path(int j, Point from, Point to) { return {Kind::TerminalPath, j, from, to}; }

  void validate() const {
    if (kind != Kind::BridgeWeight && (index < 1 || index > 4)) {
      throw Error(ErrorCode::MalformedInput, "selector index must be in 1..4");
    }
  }

  QuadConfig apply(QuadConfig cfg, double value) const {
    switch (kind) {
      case Kind::Weight: cfg.terminals[index - 1].weight = value; break;
      case Kind::BridgeWeight: cfg.bridge_weight = value; break;
      case Kind::TerminalPath: cfg.terminals[index - 1].point = start + value * (end - start); break;
    }
    return cfg;
  }
};

/// DELTA selects the bridge delta; DELTA_J(j) selects delta_j (1-based).
struct DeltaSelector {
  enum class Kind { Bridge, Terminal };
  Kind kind = Kind::Bridge;
  int index = 0;

  static DeltaSelector bridge() { return {Kind::Bridge, 0}; }
  static DeltaSelector terminal(int j) { return {Kind::Terminal, j}; }

  double pick(const DeltaSet& d) const { return kind == Kind::Bridge ? d.delta_bridge : d.delta[index - 1]; }
};

namespace detail {

inline bool config_usable(const QuadConfig& cfg) {
  for (const auto& t : cfg.terminals) {
    if (!(t.weight > 0.0) || !std::isfinite(t.weight) || !t.point.finite()) return false;
  }
  return cfg.bridge_weight > 0.0 && std::isfinite(cfg.bridge_weight) && is_ccw_convex_quad(cfg.points());
}

inline SweepRecord classify(const QuadConfig& cfg, double param) {
  SweepRecord rec;
  rec.param = param;
  if (!config_usable(cfg)) return rec;
  const auto a = assumption2(cfg);
  if (!(a.k12 > 0.0 && a.k34 > 0.0)) return rec;
  const FormalSolution f = formal_solution(cfg);
  rec.deltas = f.deltas;
  if (!(f.deltas.delta_bridge > 0.0)) {
    rec.status = SweepStatus::FacilitiesCollided;
    return rec;
  }
  for (int j = 0; j < 4; ++j) {
    if (!(f.deltas.delta[j] > 0.0)) {
      rec.status = SweepStatus::FacilityAtTerminal;
      rec.terminal = j + 1;
      return rec;
    }
  }
  if (!a.holds) return rec;
  rec.status = SweepStatus::Bifacility;
  rec.w1 = f.w1;
  rec.w2 = f.w2;
  rec.cost = f.cost;
  return rec;
}

// Delta function of the parameter; empty where the weight triangles or the
// convex quadrilateral do not exist.
inline std::optional<double> delta_at(const QuadConfig& cfg, const ParamSelector& sel, DeltaSelector which,
                                      double value) {
  const QuadConfig c = sel.apply(cfg, value);
  if (!config_usable(c)) return std::nullopt;
  const double m = c.bridge_weight;
  if (!(weight_triangle_k(m, c.weight(0), c.weight(1)) > 0.0) ||
      !(weight_triangle_k(m, c.weight(2), c.weight(3)) > 0.0)) {
    return std::nullopt;
  }
  const double v = which.pick(formal_solution(c).deltas);
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace detail

/// One record per grid value, in grid order. Points are evaluated in
/// parallel; each evaluation is independent.
inline std::vector<SweepRecord> sweep(const QuadConfig& cfg, const ParamSelector& sel, const std::vector<double>& grid) {
  sel.validate();
  std::vector<SweepRecord> out(grid.size());
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(1, grid.size() / 64));
  auto run = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < grid.size(); i += stride) out[i] = detail::classify(sel.apply(cfg, grid[i]), grid[i]);
  };
  if (workers == 1) {
    run(0, 1);
    return out;
  }
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) jobs.push_back(std::async(std::launch::async, run, w, workers));
  for (auto& j : jobs) j.get();
  return out;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

/// Root of the selected delta function in [lo, hi] by bisection to 1e-8 on
/// the parameter. If the endpoints do not bracket a sign change (or one is
/// undefined), the first defined sign change on a 512-cell scan from lo is
/// used instead.
inline double find_bifurcation(const QuadConfig& cfg, const ParamSelector& sel, DeltaSelector which, double lo,
                               double hi) {
  sel.validate();
  if (!(lo < hi)) throw Error(ErrorCode::MalformedInput, "bracket must satisfy lo < hi");
  auto f = [&](double v) { return detail::delta_at(cfg, sel, which, v); };

  double a = lo, b = hi;
  auto fa = f(a), fb = f(b);
  if (!(fa && fb && (*fa > 0.0) != (*fb > 0.0))) {
    constexpr int cells = 512;
    bool found = false;
    auto prev = f(lo);
    double prev_x = lo;
    for (int i = 1; i <= cells && !found; ++i) {
      const double x = lo + (hi - lo) * i / cells;
      const auto cur = f(x);
      if (prev && cur && (*prev > 0.0) != (*cur > 0.0)) {
        a = prev_x;
        b = x;
        fa = prev;
        found = true;
      }
      prev = cur;
      prev_x = x;
    }
    if (!found) throw Error(ErrorCode::NoSignChange, "selected delta has no sign change in the bracket");
  }

  const bool neg_at_a = !(*fa > 0.0);
  while (b - a > 1e-8) {
    const double mid = 0.5 * (a + b);
    const auto fm = f(mid);
    if (!fm) throw Error(ErrorCode::NoSignChange, "delta undefined inside the bracket");
    if (!(*fm > 0.0) == neg_at_a) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

/// Quartic curve carrying W2 as m3 varies (W1 stays on the circle through
/// P1, P2, Q1). Normalized by max(m, m4)^2 L^6.
inline LocusResidual locus_residual_w2(const QuadConfig& cfg, Point probe) {
  const auto p = cfg.points();
  const double m = cfg.bridge_weight, m4 = cfg.weight(3);
  const Point q1 = q_point(p[0], p[1], cfg.weight(0), cfg.weight(1), m);
  const double s_q = signed_area3(probe, q1, p[2]);
  const double s_4 = signed_area3(probe, p[2], p[3]);
  const Point d4 = probe - p[3];
  const Point dq = probe - q1;
  LocusResidual r;
  r.raw = m * m * s_q * s_q * dot(d4, d4) - m4 * m4 * s_4 * s_4 * dot(dq, dq);
  const std::array<Point, 5> pts{p[0], p[1], p[2], p[3], q1};
  const double l = length_scale(pts);
  const double w = std::max(m, m4);
  r.normalized = r.raw / (w * w * std::pow(l, 6));
  return r;
}

struct DerivativeReport {
  // Order: m1, m2, m3, m4, m (bridge).
  std::array<double, 5> finite_difference{};
  std::array<double, 5> identity{};
  std::array<double, 5> relative_error{};
};

/// Central differences of cost^2 against the closed-form partial
/// derivatives d(E^2)/dm_j = m_j delta_j / (m^2 sqrt(k)) and
/// d(E^2)/dm = delta / (2 m^3).
inline DerivativeReport cost_derivative_check(const QuadConfig& cfg) {
  const BiSolution base = solve_bifacility(cfg);
  if (!base.feasible) throw Error(ErrorCode::PerturbationInfeasible, "base configuration is infeasible");
  auto cost_sq = [](const QuadConfig& c) {
    const BiSolution s = solve_bifacility(c);
    if (!s.feasible) throw Error(ErrorCode::PerturbationInfeasible, "perturbed configuration is infeasible");
    return *s.cost * *s.cost;
  };
  const double m = cfg.bridge_weight;
  const auto& ds = *base.deltas;
  const auto& sys = *base.system;
  DerivativeReport rep;
  for (int j = 0; j < 5; ++j) {
    const double v = j < 4 ? cfg.weight(j) : m;
    const double h = 1e-6 * v;
    QuadConfig up = cfg, dn = cfg;
    if (j < 4) {
      up.terminals[j].weight += h;
      dn.terminals[j].weight -= h;
    } else {
      up.bridge_weight += h;
      dn.bridge_weight -= h;
    }
    rep.finite_difference[j] = (cost_sq(up) - cost_sq(dn)) / (2.0 * h);
    if (j < 4) {
      const double k = j < 2 ? sys.k12 : sys.k34;
      rep.identity[j] = v * ds.delta[j] / (m * m * std::sqrt(k));
    } else {
      rep.identity[j] = ds.delta_bridge / (2.0 * m * m * m);
    }
    rep.relative_error[j] =
        std::abs(rep.finite_difference[j] - rep.identity[j]) / std::max(std::abs(rep.identity[j]), 1e-300);
  }
  return rep;
}

/// Moves P_j along the ray from its adjacent facility by factor t and checks
/// that both facilities stay put (to 1e-7 of the length scale).
inline bool ray_invariance_check(const QuadConfig& cfg, int terminal_index, double t) {
  if (terminal_index < 1 || terminal_index > 4 || !(t > 0.0)) {
    throw Error(ErrorCode::MalformedInput, "ray_invariance_check: index in 1..4 and t > 0 required");
  }
  const BiSolution base = solve_bifacility(cfg);
  if (!base.feasible) throw Error(ErrorCode::InfeasibleBase, "base configuration is infeasible");
  const Point w = terminal_index <= 2 ? *base.w1 : *base.w2;
  QuadConfig moved = cfg;
  Point& pj = moved.terminals[terminal_index - 1].point;
  pj = w + t * (pj - w);
  // The moved terminal may leave the quadrilateral non-convex; the radical
  // formulas do not need convexity, only positive deltas.
  const FormalSolution again = formal_solution(moved);
  for (double d : again.deltas.delta) {
    if (!(d > 0.0)) return false;
  }
  if (!(again.deltas.delta_bridge > 0.0)) return false;
  const double tol = 1e-7 * length_scale(cfg.points());
  return dist(again.w1, *base.w1) <= tol && dist(again.w2, *base.w2) <= tol;
}

}  // namespace weber
