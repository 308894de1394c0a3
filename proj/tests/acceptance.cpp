// Acceptance runner: one line per criterion. Exit status is nonzero only when a
// gating check fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "test_support.hpp"

using namespace weber;
using weber::testing::base_quad;
using weber::testing::base_tri;
using weber::testing::make_rng;
using weber::testing::outside_quad;
using weber::testing::random_feasible_five_three;
using weber::testing::random_feasible_quad;
using weber::testing::random_feasible_tri;
using weber::testing::random_unit_quad;
using weber::testing::rel_err;
using weber::testing::unit_square;

namespace {

int gating_failures = 0;

std::string fmt(const char* f, auto... v) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, v...);
  return buf;
}

void report(int id, bool pass, const std::string& detail, bool gating = true) {
  std::printf("[%s] %2d %s%s\n", pass ? "PASS" : "FAIL", id, detail.c_str(), gating ? "" : " (non-gating)");
  if (!pass && gating) ++gating_failures;
}

// Runs a check body; an exception counts as a failure with its message.
void guarded(int id, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, std::string("exception: ") + e.what());
  }
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }
bool near(Point a, Point b, double tol) { return near(a.x, b.x, tol) && near(a.y, b.y, tol); }

// |a - b| against the larger of |a|, |b| and a natural magnitude.
double scaled_err(double a, double b, double mag) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), mag, 1e-300});
}

void criterion1() {
  const BiSolution s = solve_bifacility(base_quad());
  const double r15 = std::sqrt(15.0), r33 = std::sqrt(33.0), r55 = std::sqrt(55.0);
  const double exact = std::sqrt(44098 + 4170 * r15 + 5118 * r55 + 1890 * r33) / 8.0;
  const bool ok = s.feasible && near(*s.w1, {3.701271, 4.430843}, 1e-5) && near(*s.w2, {4.761622, 4.756175}, 1e-5) &&
                  near(*s.cost, 41.280608, 1e-5) && rel_err(*s.cost, exact) <= 1e-12;
  report(1, ok,
         s.feasible ? fmt("reference quad: W1 (%.6f, %.6f) W2 (%.6f, %.6f) cost %.6f, radical rel err %.1e", s.w1->x,
                          s.w1->y, s.w2->x, s.w2->y, *s.cost, rel_err(*s.cost, exact))
                    : std::string("reference quad reported infeasible"));
}

void criterion2() {
  const BiSolution s = solve_bifacility(outside_quad());
  const PickScaffold sc = pick_scaffold(outside_quad());
  const bool ok = !s.feasible && near(sc.q1, {0.42263, 4.10912}, 1e-4) && near(sc.q2, {6.26863, 5.9437}, 1e-4);
  report(2, ok,
         fmt("outside quad feasible=%d, Q1 (%.5f, %.5f) Q2 (%.5f, %.5f)", s.feasible, sc.q1.x, sc.q1.y, sc.q2.x, sc.q2.y));
}

void criterion3() {
  const PickScaffold s = pick_scaffold(base_quad());
  const std::array<Point, 4> expect{{{14.46457, 2.16301}, {11.16956, 19.49165}, {-1.67471, 12.68140}, {1.01331, -2.03540}}};
  double worst = 0.0;
  for (int j = 0; j < 4; ++j) {
    worst = std::max({worst, std::abs(s.qtilde[j].x - expect[j].x), std::abs(s.qtilde[j].y - expect[j].y)});
  }
  report(3, worst <= 1e-4, fmt("cross phantom table, max coordinate error %.1e", worst));
}

void criterion4() {
  struct Root {
    const char* label;
    QuadConfig cfg;
    ParamSelector sel;
    DeltaSelector which;
    double lo, hi, expect;
    bool gating;
  };
  const QuadConfig light = base_quad(3, 3.5, 4);
  const std::vector<Root> roots{
      {"bridge delta", base_quad(), ParamSelector::bridge(), DeltaSelector::bridge(), 4.0, 4.8, 4.326092, true},
      {"bridge delta1", base_quad(), ParamSelector::bridge(), DeltaSelector::terminal(1), 3.0, 3.3, 3.145546, false},
      {"m3 delta (m4=3.5)", light, ParamSelector::weight(3), DeltaSelector::bridge(), 1.1, 2.0, 1.394215, true},
      {"m3 delta3", base_quad(), ParamSelector::weight(3), DeltaSelector::terminal(3), 3.0, 7.0, 6.607846, true},
      {"m3 delta2", base_quad(), ParamSelector::weight(3), DeltaSelector::terminal(2), 7.5, 7.9, 7.784831, false},
  };
  bool all = true, gating_ok = true;
  std::string detail = "bifurcation roots:";
  for (const auto& r : roots) {
    bool ok = false;
    try {
      const double v = find_bifurcation(r.cfg, r.sel, r.which, r.lo, r.hi);
      ok = near(v, r.expect, 1e-4);
      detail += fmt(" %s %.6f (want %.6f)%s;", r.label, v, r.expect, ok ? "" : " MISS");
    } catch (const Error& e) {
      detail += fmt(" %s none in [%g, %g] (want %.6f, %s);", r.label, r.lo, r.hi, r.expect, to_string(e.code()));
    }
    all = all && ok;
    if (r.gating) gating_ok = gating_ok && ok;
  }
  if (!all && gating_ok) detail += " misses are spurious roots of the squared system, exempt from exit status";
  std::printf("[%s] %2d %s\n", all ? "PASS" : "FAIL", 4, detail.c_str());
  if (!gating_ok) ++gating_failures;
}

void criterion5() {
  const TriConfig c{{{{{1, 5}, 3}, {{2, 1}, 2}, {{6, 7}, 4}}}};
  const Point w = solve3(c).w;
  report(5, near(w, {2.865254, 5.081732}, 1e-5), fmt("limit point (%.6f, %.6f)", w.x, w.y));
}

void criterion6() {
  const QuadConfig c = base_quad(3, 4, 4.326092);
  const auto it = weiszfeld(c.terminals);
  const double dual_cost = formal_solution(dual_quad(c)).cost;
  const PickScaffold s = pick_scaffold(c);
  const std::array<Point, 4> expect{{{14.72146, 3.3164645}, {14.02292, 17.89537}, {-2.57199, 11.97446}, {0.66019, -1.88749}}};
  double worst = 0.0;
  for (int j = 0; j < 4; ++j) {
    worst = std::max({worst, std::abs(s.qtilde[j].x - expect[j].x), std::abs(s.qtilde[j].y - expect[j].y)});
  }
  const double rel = rel_err(dual_cost, 3.0 * it.cost);
  const bool ok = near(it.point, {4.537574, 4.565962}, 1e-4) && near(it.cost, 41.473087, 1e-3) && rel <= 1e-4 &&
                  worst <= 1e-3;
  report(6, ok,
         fmt("W* (%.6f, %.6f) cost %.6f, dual cost / 3 rel err %.1e, dual table max err %.1e", it.point.x, it.point.y,
             it.cost, rel, worst));
}

void criterion7() {
  auto rng = make_rng(900);
  constexpr int n = 1000;
  double worst = 0.0, worst_line = 0.0;
  for (int it = 0; it < n; ++it) {
    const QuadConfig c = random_feasible_quad(rng);
    const auto p = c.points();
    const double m = c.bridge_weight, mm = m * m;
    const std::array<double, 4> mw{c.weight(0), c.weight(1), c.weight(2), c.weight(3)};
    const double m1 = mw[0], m2 = mw[1], m3 = mw[2], m4 = mw[3];
    const BiSolution sol = solve_bifacility(c);
    const TauEtaSystem sys = tau_eta(c);
    const DeltaSet ds = deltas(c, sys);
    const auto& t = sys.tau;
    const auto& e = sys.eta;
    const double s12 = std::sqrt(sys.k12), s34 = std::sqrt(sys.k34);
    const double D = sys.delta_cap, sD = std::sqrt(D);
    const double T = t[0] + t[1], H = e[0] + e[1];
    const double tmag = std::abs(t[0]) + std::abs(t[1]) + std::abs(t[2]) + std::abs(t[3]);
    const double emag = std::abs(e[0]) + std::abs(e[1]) + std::abs(e[2]) + std::abs(e[3]);
    const double L = length_scale(p), dmag = sD * L;
    auto chk = [&](double a, double b, double mag) { worst = std::max(worst, scaled_err(a, b, mag)); };

    chk(t[0], (s12 * H + (mm + m1 * m1 - m2 * m2) * T) / (2 * mm), tmag);
    chk(t[1], (-s12 * H + (mm - m1 * m1 + m2 * m2) * T) / (2 * mm), tmag);
    chk(t[2], (-s34 * H - (mm + m3 * m3 - m4 * m4) * T) / (2 * mm), tmag);
    chk(t[3], (s34 * H - (mm - m3 * m3 + m4 * m4) * T) / (2 * mm), tmag);
    chk(t[0] + t[1] + t[2] + t[3], 0.0, tmag);
    chk(e[0] + e[1] + e[2] + e[3], 0.0, emag);
    double sxy = 0.0, sxy_mag = 0.0;
    for (int j = 0; j < 4; ++j) {
      sxy += p[j].x * t[j] + p[j].y * e[j];
      sxy_mag += std::abs(p[j].x * t[j]) + std::abs(p[j].y * e[j]);
    }
    chk(sxy, D / (4 * mm * mm), sxy_mag);
    for (int j = 0; j < 4; ++j) chk(t[j] * t[j] + e[j] * e[j], mw[j] * mw[j] / mm * D, D);
    chk(t[0] * e[1] - t[1] * e[0], s12 / (2 * mm) * D, D);
    chk(t[1] * e[2] - t[2] * e[1],
        s12 * s34 / (4 * mm * mm) * ((mm - m1 * m1 + m2 * m2) / s12 + (mm - m4 * m4 + m3 * m3) / s34) * D, D);

    const double d1 = ds.delta[0], d2 = ds.delta[1], d3 = ds.delta[2], d4 = ds.delta[3], d = ds.delta_bridge;
    chk(d1 + d3, (p[0].x - p[2].x) * H - (p[0].y - p[2].y) * T, dmag);
    chk(2 * d2 * m2 * m2, (mm - m1 * m1 - m2 * m2) * d1 - s12 * ((p[0].y - p[1].y) * e[1] + (p[0].x - p[1].x) * t[1]),
        dmag * mm);
    chk(2 * d4 * m4 * m4, (mm - m3 * m3 - m4 * m4) * d3 - s34 * ((p[2].y - p[3].y) * e[3] + (p[2].x - p[3].x) * t[3]),
        dmag * mm);

    const Point w1 = *sol.w1, w2 = *sol.w2;
    chk(dist(w1, p[0]), 2 * m * m1 / s12 * d1 / sD, 0.0);
    chk(dist(w1, p[1]), 2 * m * m2 / s12 * d2 / sD, 0.0);
    chk(dist(w2, p[2]), 2 * m * m3 / s34 * d3 / sD, 0.0);
    chk(dist(w2, p[3]), 2 * m * m4 / s34 * d4 / sD, 0.0);
    chk(dist(w1, w2), d / sD, 0.0);
    chk(signed_area3(p[0], p[1], w1), 2 * d1 * d2 * mm / (s12 * D), L * L);
    chk(signed_area3(p[1], w2, w1), d * d2 / D, L * L);

    const PickScaffold sc = pick_scaffold(c);
    worst_line = std::max({worst_line, distance_to_line(w1, sc.q1, sc.q2) / L, distance_to_line(w2, sc.q1, sc.q2) / L});
    chk(*sol.cost, m * dist(sc.q1, sc.q2), 0.0);
    for (int j = 0; j < 4; ++j) chk(*sol.cost, mw[j] * dist(sc.qtilde[j], p[j]), 0.0);
    chk(*sol.cost, sD / (4 * mm * m), 0.0);
    chk(*sol.cost, bifacility_cost(c, w1, w2), 0.0);
  }
  report(7, worst <= 1e-9 && worst_line <= 1e-9,
         fmt("identity suite on %d instances, worst rel err %.1e, collinearity %.1e x scale", n, worst, worst_line));
}

void criterion8() {
  auto rng = make_rng(901);
  double worst_quad = 0.0, worst_tri = 0.0;
  for (int it = 0; it < 100; ++it) {
    const QuadConfig c = random_feasible_quad(rng);
    const MultiTopology top = to_topology(c);
    worst_quad = std::max(worst_quad, rel_err(numeric_min(top, default_init(top)).cost, *solve_bifacility(c).cost));
  }
  for (int it = 0; it < 500; ++it) {
    const TriConfig c = random_feasible_tri(rng);
    worst_tri = std::max(worst_tri, rel_err(weiszfeld(c.terminals).cost, solve3(c).cost));
  }
  report(8, worst_quad <= 1e-6 && worst_tri <= 1e-6,
         fmt("oracle rel err: 100 quads %.1e, 500 triangles %.1e", worst_quad, worst_tri));
}

void criterion9() {
  const double r3 = std::sqrt(3.0);
  const BiSolution s = solve_bifacility(unit_square());
  const bool square = s.feasible && near(*s.cost, 1 + r3, 1e-9) && near(*s.w1, {0.5, r3 / 6}, 1e-9) &&
                      near(*s.w2, {0.5, 1 - r3 / 6}, 1e-9);
  auto rng = make_rng(902);
  double worst = 0.0;
  for (int it = 0; it < 100; ++it) {
    const QuadConfig c = random_unit_quad(rng);
    const SteinerResult st = steiner_case(c.points());
    const double L = length_scale(c.points());
    worst = std::max(worst, scaled_err(st.delta_439, deltas(c, tau_eta(c)).delta_bridge, L * L));
  }
  auto quad = [](double psi) {
    const Point v{std::cos(psi), std::sin(psi)};
    return std::array<Point, 4>{Point{-1, 0}, -1.0 * v, Point{1, 0}, v};
  };
  const double crit = 2.0 * std::numbers::pi / 3.0;
  const bool flip = steiner_case(quad(crit - 0.01)).full_tree && !steiner_case(quad(crit + 0.01)).full_tree;
  report(9, square && worst <= 1e-9 && flip,
         fmt("unit square %s, special vs general delta worst %.1e on 100 quads, full-tree flip at 2pi/3 %s",
             square ? "ok" : "wrong", worst, flip ? "ok" : "missing"));
}

void criterion10() {
  auto rng = make_rng(903);
  int cheaper = 0;
  double worst = 0.0;
  constexpr int n = 100;
  for (int it = 0; it < n; ++it) {
    const QuadConfig c = random_feasible_quad(rng);
    cheaper += *solve_bifacility(c).cost < weiszfeld(c.terminals).cost ? 1 : 0;
    const DerivativeReport rep = cost_derivative_check(c);
    for (double e : rep.relative_error) worst = std::max(worst, e);
  }
  report(10, cheaper == n && worst <= 1e-5,
         fmt("bifacility cheaper on %d of %d, derivative worst rel err %.1e", cheaper, n, worst));
}

void criterion11() {
  auto rng = make_rng(904);
  int agree = 0;
  constexpr int n = 100;
  for (int it = 0; it < n; ++it) {
    const QuadConfig c = random_feasible_quad(rng);
    const FormalSolution f = formal_solution(c);
    const FormalSolution g = formal_solution(dual_quad(c));
    agree += rel_err(g.cost, 3.0 * f.cost) <= 1e-6 && rel_err(g.deltas.delta_bridge, -3.0 * f.deltas.delta_bridge) <= 1e-6;
  }
  report(11, agree == n, fmt("dual relations held on %d of %d instances", agree, n), false);
}

void criterion12() {
  double worst = 0.0;
  int probes = 0;
  for (double m3 = 1.3; m3 < 4.74; m3 += 0.02, ++probes) {
    const TriConfig c = base_tri(m3);
    worst = std::max(worst, std::abs(locus_residual_3(c, solve3(c).w).normalized));
  }
  for (double m3 = 0.8; m3 <= 1.8; m3 += 0.05) {
    QuadConfig c = base_quad(m3, 3.5, 4);
    const auto it = weiszfeld(c.terminals);
    if (it.terminal) continue;
    worst = std::max(worst, std::abs(locus_residual_4(c.terminals, it.point).normalized));
    ++probes;
  }
  for (const auto& r : sweep(base_quad(3, 3.5, 4), ParamSelector::weight(3), linspace(1.4, 6.2, 97))) {
    if (r.status != SweepStatus::Bifacility) continue;
    worst = std::max(worst, std::abs(locus_residual_w2(base_quad(r.param, 3.5, 4), *r.w2).normalized));
    ++probes;
  }
  const TriConfig tri = base_tri();
  const QuadConfig q = base_quad(2.0, 3.5, 4);
  const auto p = q.points();
  const Point q1 = q_point(p[0], p[1], q.weight(0), q.weight(1), q.bridge_weight);
  const double trivial = std::max({std::abs(locus_residual_3(tri, tri.terminals[0].point).normalized),
                                   std::abs(locus_residual_w2(q, p[2]).normalized),
                                   std::abs(locus_residual_w2(q, p[3]).normalized),
                                   std::abs(locus_residual_w2(q, q1).normalized)});
  report(12, worst <= 1e-6 && trivial <= 1e-12,
         fmt("curve residuals worst %.1e over %d solutions, forced zeros %.1e", worst, probes, trivial));
}

void criterion13() {
  FiveThreeConfig mirror;
  mirror.terminals = {{{{-1, 1}, 1}, {{-1, -1}, 1}, {{1, -1}, 1}, {{1, 1}, 1}, {{0, -3}, 0.8}}};
  mirror.mt13 = mirror.mt23 = 1.0;
  const FiveThreeSolution ms = solve_5t3f(mirror);
  const double sym = std::max({std::abs(ms.w1.x + ms.w2.x), std::abs(ms.w1.y - ms.w2.y), std::abs(ms.w3.x)});
  auto rng = make_rng(905);
  double stat = multi_stationarity(to_topology(mirror), std::vector<Point>{ms.w1, ms.w2, ms.w3});
  double oracle = 0.0;
  std::vector<FiveThreeConfig> cases{mirror};
  for (int it = 0; it < 50; ++it) cases.push_back(random_feasible_five_three(rng));
  for (const auto& c : cases) {
    const FiveThreeSolution s = solve_5t3f(c);
    const MultiTopology top = to_topology(c);
    stat = std::max(stat, multi_stationarity(top, std::vector<Point>{s.w1, s.w2, s.w3}));
    oracle = std::max(oracle, rel_err(numeric_min(top, default_init(top)).cost, s.cost));
  }
  report(13, stat <= 1e-7 && oracle <= 1e-6 && sym <= 1e-9,
         fmt("5t3f on %zu instances: stationarity %.1e, oracle rel err %.1e, mirror asymmetry %.1e", cases.size(), stat,
             oracle, sym));
}

void criterion14() {
  auto rng = make_rng(906);
  int checks = 0, failures = 0;
  double worst_tri = 0.0;
  for (int it = 0; it < 100; ++it) {
    const QuadConfig c = random_feasible_quad(rng);
    for (int j = 1; j <= 4; ++j) {
      for (double t : {0.5, 2.0, 5.0}) {
        ++checks;
        failures += ray_invariance_check(c, j, t) ? 0 : 1;
      }
    }
  }
  for (int it = 0; it < 100; ++it) {
    const TriConfig c = random_feasible_tri(rng);
    const Point w = solve3(c).w;
    const double L = length_scale(c.points());
    for (int j = 0; j < 3; ++j) {
      for (double t : {0.5, 2.0, 5.0}) {
        TriConfig moved = c;
        moved.terminals[j].point = w + t * (c.terminals[j].point - w);
        const double d = dist(solve3(moved).w, w) / L;
        worst_tri = std::max(worst_tri, d);
        ++checks;
        failures += d <= 1e-7 ? 0 : 1;
      }
    }
  }
  report(14, failures == 0,
         fmt("ray invariance: %d of %d moves failed, worst triangle displacement %.1e x scale", failures, checks,
             worst_tri));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{criterion1, criterion2,  criterion3,  criterion4,  criterion5,
                                                    criterion6, criterion7,  criterion8,  criterion9,  criterion10,
                                                    criterion11, criterion12, criterion13, criterion14};
  for (std::size_t i = 0; i < criteria.size(); ++i) guarded(static_cast<int>(i + 1), criteria[i]);
  std::printf("%s: %d gating failure(s)\n", gating_failures ? "FAILED" : "OK", gating_failures);
  return gating_failures ? 1 : 0;
}
