#pragma once

// General multifacility networks: a numeric minimizer for the weighted
// terminal/facility network cost, and the phantom-terminal reduction of the
// five-terminal, three-facility chain to three 3-terminal problems.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "weber/bifacility.hpp"
#include "weber/error.hpp"
#include "weber/geometry.hpp"
#include "weber/unifacility.hpp"

namespace weber {

struct MultiTopology {
  std::vector<WeightedTerminal> terminals;  // terminal weights are unused here
  std::size_t facility_count = 0;
  std::vector<std::vector<double>> ft_weights;  // facility_count x n
  std::vector<std::vector<double>> ff_weights;  // facility_count x facility_count, symmetric

  std::size_t n() const { return terminals.size(); }

  void validate() const {
    const std::size_t l = facility_count;
    if (terminals.empty() || l == 0) throw Error(ErrorCode::InvalidTopology, "need at least one terminal and facility");
    if (ft_weights.size() != l || ff_weights.size() != l) throw Error(ErrorCode::InvalidTopology, "weight matrix shape");
    for (const auto& t : terminals) {
      if (!t.point.finite()) throw Error(ErrorCode::InvalidTopology, "non-finite terminal");
    }
    for (std::size_t i = 0; i < l; ++i) {
      if (ft_weights[i].size() != n() || ff_weights[i].size() != l) {
        throw Error(ErrorCode::InvalidTopology, "weight matrix shape");
      }
      for (double w : ft_weights[i]) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorCode::InvalidTopology, "ft weights must be >= 0");
      }
      for (std::size_t k = 0; k < l; ++k) {
        const double w = ff_weights[i][k];
        if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorCode::InvalidTopology, "ff weights must be >= 0");
        if (w != ff_weights[k][i]) throw Error(ErrorCode::InvalidTopology, "ff weights must be symmetric");
        if (i == k && w != 0.0) throw Error(ErrorCode::InvalidTopology, "ff diagonal must be zero");
      }
    }
    // Union-find over terminals [0, n) and facilities [n, n + l).
    std::vector<std::size_t> parent(n() + l);
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    auto join = [&](std::size_t a, std::size_t b) { parent[find(a)] = find(b); };
    for (std::size_t i = 0; i < l; ++i) {
      for (std::size_t j = 0; j < n(); ++j) {
        if (ft_weights[i][j] > 0.0) join(n() + i, j);
      }
      for (std::size_t k = 0; k < l; ++k) {
        if (ff_weights[i][k] > 0.0) join(n() + i, n() + k);
      }
    }
    for (std::size_t i = 1; i < parent.size(); ++i) {
      if (find(i) != find(0)) throw Error(ErrorCode::InvalidTopology, "network graph is not connected");
    }
  }
};

inline double multi_cost(const MultiTopology& top, std::span<const Point> w) {
  double c = 0.0;
  for (std::size_t i = 0; i < top.facility_count; ++i) {
    for (std::size_t j = 0; j < top.n(); ++j) c += top.ft_weights[i][j] * dist(w[i], top.terminals[j].point);
    for (std::size_t k = i + 1; k < top.facility_count; ++k) c += top.ff_weights[i][k] * dist(w[i], w[k]);
  }
  return c;
}

/// Per-facility gradient norm divided by the facility's total edge weight,
/// maximized over facilities. Zero-length edges are skipped.
inline double multi_stationarity(const MultiTopology& top, std::span<const Point> w) {
  double worst = 0.0;
  for (std::size_t i = 0; i < top.facility_count; ++i) {
    Point g{};
    double total = 0.0;
    auto add = [&](Point other, double m) {
      if (m <= 0.0) return;
      total += m;
      const double d = dist(w[i], other);
      if (d > 0.0) g = g + (m / d) * (w[i] - other);
    };
    for (std::size_t j = 0; j < top.n(); ++j) add(top.terminals[j].point, top.ft_weights[i][j]);
    for (std::size_t k = 0; k < top.facility_count; ++k) {
      if (k != i) add(w[k], top.ff_weights[i][k]);
    }
    worst = std::max(worst, norm(g) / total);
  }
  return worst;
}

/// Weighted centroid of each facility's terminal neighbours (all terminals
/// for a facility with none).
inline std::vector<Point> default_init(const MultiTopology& top) {
  std::vector<Point> init(top.facility_count);
  for (std::size_t i = 0; i < top.facility_count; ++i) {
    Point c{};
    double s = 0.0;
    for (std::size_t j = 0; j < top.n(); ++j) {
      c = c + top.ft_weights[i][j] * top.terminals[j].point;
      s += top.ft_weights[i][j];
    }
    if (s == 0.0) {
      for (const auto& t : top.terminals) c = c + t.point;
      s = static_cast<double>(top.n());
    }
    init[i] = c / s;
  }
  return init;
}

/// One Gauss-Seidel sweep: each facility moved to its Weber point with the
/// other facilities frozen as terminals.
inline std::vector<Point> block_coordinate_pass(const MultiTopology& top, std::vector<Point> w,
                                                double tolerance = 1e-12) {
  WeiszfeldSettings s;
  s.tolerance = tolerance;
  std::vector<WeightedTerminal> local;
  for (std::size_t i = 0; i < top.facility_count; ++i) {
    local.clear();
    for (std::size_t j = 0; j < top.n(); ++j) {
      if (top.ft_weights[i][j] > 0.0) local.push_back({top.terminals[j].point, top.ft_weights[i][j]});
    }
    for (std::size_t k = 0; k < top.facility_count; ++k) {
      if (k != i && top.ff_weights[i][k] > 0.0) local.push_back({w[k], top.ff_weights[i][k]});
    }
    if (!local.empty()) w[i] = weiszfeld(local, w[i], s).point;
  }
  return w;
}

struct MultiResult {
  std::vector<Point> facilities;
  double cost = 0.0;
  int passes = 0;
  bool converged = false;
};

namespace detail {

// Newton on sum w sqrt(d^2 + mu^2) with backtracking; returns the final iterate.
inline std::vector<Point> smoothed_newton(const MultiTopology& top, std::vector<Point> w, double mu, double scale) {
  const Eigen::Index dim = static_cast<Eigen::Index>(2 * top.facility_count);
  auto objective = [&](const std::vector<Point>& z) {
    double c = 0.0;
    for (std::size_t i = 0; i < top.facility_count; ++i) {
      for (std::size_t j = 0; j < top.n(); ++j) {
        const double m = top.ft_weights[i][j];
        if (m > 0.0) {
          const Point v = z[i] - top.terminals[j].point;
          c += m * std::sqrt(dot(v, v) + mu * mu);
        }
      }
      for (std::size_t k = i + 1; k < top.facility_count; ++k) {
        const double m = top.ff_weights[i][k];
        if (m > 0.0) {
          const Point v = z[i] - z[k];
          c += m * std::sqrt(dot(v, v) + mu * mu);
        }
      }
    }
    return c;
  };

  for (int it = 0; it < 100; ++it) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    auto edge = [&](Point v, double m, Eigen::Index a, std::optional<Eigen::Index> b) {
      const double phi = std::sqrt(dot(v, v) + mu * mu);
      const double c = m / (phi * phi * phi);
      Eigen::Matrix2d blk;
      blk << c * (phi * phi - v.x * v.x), -c * v.x * v.y, -c * v.x * v.y, c * (phi * phi - v.y * v.y);
      const Eigen::Vector2d gv(m * v.x / phi, m * v.y / phi);
      g.segment<2>(2 * a) += gv;
      h.block<2, 2>(2 * a, 2 * a) += blk;
      if (b) {
        g.segment<2>(2 * *b) -= gv;
        h.block<2, 2>(2 * *b, 2 * *b) += blk;
        h.block<2, 2>(2 * a, 2 * *b) -= blk;
        h.block<2, 2>(2 * *b, 2 * a) -= blk;
      }
    };
    for (std::size_t i = 0; i < top.facility_count; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      for (std::size_t j = 0; j < top.n(); ++j) {
        if (top.ft_weights[i][j] > 0.0) edge(w[i] - top.terminals[j].point, top.ft_weights[i][j], ii, std::nullopt);
      }
      for (std::size_t k = i + 1; k < top.facility_count; ++k) {
        if (top.ff_weights[i][k] > 0.0) edge(w[i] - w[k], top.ff_weights[i][k], ii, static_cast<Eigen::Index>(k));
      }
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    Eigen::VectorXd step = ldlt.solve(-g);
    if (ldlt.info() != Eigen::Success || !step.allFinite() || step.dot(g) >= 0.0) step = -g;

    const double f0 = objective(w);
    double t = 1.0;
    std::vector<Point> trial(w.size());
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < w.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(2 * i);
        trial[i] = {w[i].x + t * step(ii), w[i].y + t * step(ii + 1)};
      }
      if (objective(trial) <= f0 + 1e-4 * t * step.dot(g)) {
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
    w = trial;
    if (t * step.norm() <= 1e-15 * scale) break;
  }
  return w;
}

}  // namespace detail

/// Block-coordinate descent with Weiszfeld blocks, followed by a smoothed
/// Newton continuation that escapes collision stagnation. Returns the best
/// point found; converged reports whether descent met the tolerance.
inline MultiResult numeric_min(const MultiTopology& top, std::vector<Point> init, double tolerance = 1e-12,
                               int max_passes = 200) {
  top.validate();
  if (init.empty()) init = default_init(top);
  if (init.size() != top.facility_count) throw Error(ErrorCode::MalformedInput, "numeric_min: init size mismatch");
  for (const auto& p : init) {
    if (!p.finite()) throw Error(ErrorCode::MalformedInput, "numeric_min: non-finite init");
  }
  const auto pts = points_of(top.terminals);
  const double scale = length_scale(pts);

  MultiResult res;
  auto descend = [&](std::vector<Point> w) {
    for (int pass = 0; pass < max_passes; ++pass) {
      auto next = block_coordinate_pass(top, w, tolerance);
      double moved = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) moved += dist(w[i], next[i]);
      w = std::move(next);
      ++res.passes;
      if (moved <= tolerance * scale) {
        res.converged = true;
        break;
      }
    }
    return w;
  };

  std::vector<Point> best = descend(init);
  double best_cost = multi_cost(top, best);
  if (top.facility_count > 1) {
    std::vector<Point> z = best;
    for (double mu = 1e-3 * scale; mu >= 1e-10 * scale * 0.999; mu *= 0.1) z = detail::smoothed_newton(top, z, mu, scale);
    z = descend(z);
    const double c = multi_cost(top, z);
    if (c < best_cost) {
      best = z;
      best_cost = c;
    }
  }
  res.facilities = best;
  res.cost = best_cost;
  return res;
}

inline MultiTopology to_topology(const QuadConfig& cfg) {
  MultiTopology top;
  top.terminals.assign(cfg.terminals.begin(), cfg.terminals.end());
  top.facility_count = 2;
  top.ft_weights = {{cfg.weight(0), cfg.weight(1), 0.0, 0.0}, {0.0, 0.0, cfg.weight(2), cfg.weight(3)}};
  top.ff_weights = {{0.0, cfg.bridge_weight}, {cfg.bridge_weight, 0.0}};
  return top;
}

/// Single facility serving every terminal with its own weight.
inline MultiTopology unifacility_topology(std::span<const WeightedTerminal> t) {
  MultiTopology top;
  top.terminals.assign(t.begin(), t.end());
  top.facility_count = 1;
  top.ft_weights.assign(1, {});
  for (const auto& x : t) top.ft_weights[0].push_back(x.weight);
  top.ff_weights = {{0.0}};
  return top;
}

struct FiveThreeConfig {
  // W1 serves P1, P2; W2 serves P3, P4; W3 serves P5 and both W1, W2.
  std::array<WeightedTerminal, 5> terminals;
  double mt13 = 0.0;  // bridge W1-W3
  double mt23 = 0.0;  // bridge W2-W3
};

struct FiveThreeSolution {
  Point w1;
  Point w2;
  Point w3;
  double cost = 0.0;
  Point q_a;  // phantom for (P1, P2)
  Point q_b;  // phantom for (P3, P4)
};

inline MultiTopology to_topology(const FiveThreeConfig& cfg) {
  MultiTopology top;
  top.terminals.assign(cfg.terminals.begin(), cfg.terminals.end());
  top.facility_count = 3;
  const auto m = [&](int j) { return cfg.terminals[j].weight; };
  top.ft_weights = {{m(0), m(1), 0, 0, 0}, {0, 0, m(2), m(3), 0}, {0, 0, 0, 0, m(4)}};
  top.ff_weights = {{0, 0, cfg.mt13}, {0, 0, cfg.mt23}, {cfg.mt13, cfg.mt23, 0}};
  return top;
}

inline double fivethree_cost(const FiveThreeConfig& cfg, Point w1, Point w2, Point w3) {
  const auto& t = cfg.terminals;
  return t[0].weight * dist(w1, t[0].point) + t[1].weight * dist(w1, t[1].point) +
         t[2].weight * dist(w2, t[2].point) + t[3].weight * dist(w2, t[3].point) +
         t[4].weight * dist(w3, t[4].point) + cfg.mt13 * dist(w1, w3) + cfg.mt23 * dist(w2, w3);
}

namespace detail {

// Phantom for the pair (a, b) on the side of line ab away from `away`.
inline Point phantom_away_from(Point a, Point b, double ma, double mb, double m, Point away) {
  const Point q = q_point(a, b, ma, mb, m);
  const double side_q = signed_area3(a, b, q);
  const double side_far = signed_area3(a, b, away);
  return side_q * side_far < 0.0 ? q : q_point(b, a, mb, ma, m);
}

inline UniSolution3 stage_solve(const char* stage, const TriConfig& tri) {
  try {
    return solve3(tri);
  } catch (const Error& e) {
    throw Error(ErrorCode::ReductionInfeasible, std::string(stage) + ": " + e.what());
  }
}

}  // namespace detail

/// Closed-form solution of the 5-terminal, 3-facility chain. Each pair
/// served by W1 or W2 is replaced by its phantom point, W3 is the Weber
/// point of the phantoms and P5, then W1 and W2 are recovered from the
/// original pairs and W3.
inline FiveThreeSolution solve_5t3f(const FiveThreeConfig& cfg) {
  const auto& t = cfg.terminals;
  for (const auto& x : t) {
    if (!(x.weight > 0.0) || !std::isfinite(x.weight) || !x.point.finite()) {
      throw Error(ErrorCode::MalformedInput, "5t3f: weights must be positive and coordinates finite");
    }
  }
  if (!(cfg.mt13 > 0.0) || !(cfg.mt23 > 0.0)) throw Error(ErrorCode::MalformedInput, "5t3f: bridge weights must be positive");

  FiveThreeSolution sol;
  const Point rest_a = (t[2].point + t[3].point + t[4].point) / 3.0;
  const Point rest_b = (t[0].point + t[1].point + t[4].point) / 3.0;
  try {
    sol.q_a = detail::phantom_away_from(t[0].point, t[1].point, t[0].weight, t[1].weight, cfg.mt13, rest_a);
    sol.q_b = detail::phantom_away_from(t[2].point, t[3].point, t[2].weight, t[3].weight, cfg.mt23, rest_b);
  } catch (const Error& e) {
    throw Error(ErrorCode::ReductionInfeasible, std::string("stage I: ") + e.what());
  }

  sol.w3 = detail::stage_solve("stage II", TriConfig{{{{sol.q_a, cfg.mt13}, {sol.q_b, cfg.mt23}, t[4]}}}).w;
  // The phantom principle needs W3 across the pair's line from its phantom.
  if (signed_area3(t[0].point, t[1].point, sol.w3) * signed_area3(t[0].point, t[1].point, sol.q_a) >= 0.0 ||
      signed_area3(t[2].point, t[3].point, sol.w3) * signed_area3(t[2].point, t[3].point, sol.q_b) >= 0.0) {
    throw Error(ErrorCode::ReductionInfeasible, "stage II: W3 lies on the phantom side of a terminal pair");
  }
  sol.w1 = detail::stage_solve("stage III (W1)", TriConfig{{{t[0], t[1], {sol.w3, cfg.mt13}}}}).w;
  sol.w2 = detail::stage_solve("stage III (W2)", TriConfig{{{t[2], t[3], {sol.w3, cfg.mt23}}}}).w;
  sol.cost = fivethree_cost(cfg, sol.w1, sol.w2, sol.w3);
  return sol;
}

}  // namespace weber
