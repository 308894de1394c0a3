// Solves the weighted four-terminal network in closed form, checks it
// against the numeric minimizer and prints the Pick construction points.

#include <cstdio>

#include "weber/weber.hpp"

int main() {
  using namespace weber;
  const QuadConfig cfg{{{{{1, 5}, 3}, {{2, 1}, 2}, {{7, 2}, 3}, {{6, 7}, 4}}}, 4};

  const BiSolution sol = solve_bifacility(cfg);
  if (!sol.feasible) {
    for (const auto& f : sol.failed) std::printf("failed: %s\n", f.c_str());
    return 2;
  }
  std::printf("W1 = (%.6f, %.6f)\nW2 = (%.6f, %.6f)\ncost = %.6f\n", sol.w1->x, sol.w1->y, sol.w2->x, sol.w2->y,
              *sol.cost);

  const MultiResult num = numeric_min(to_topology(cfg), {});
  std::printf("numeric cost = %.6f after %d passes\n", num.cost, num.passes);

  const PickScaffold sc = pick_scaffold(cfg);
  std::printf("Q1 = (%.5f, %.5f)  Q2 = (%.5f, %.5f)\n", sc.q1.x, sc.q1.y, sc.q2.x, sc.q2.y);
  for (int j = 0; j < 4; ++j) std::printf("dual terminal %d = (%.5f, %.5f)\n", j + 1, sc.qtilde[j].x, sc.qtilde[j].y);

  const double r = find_bifurcation(cfg, ParamSelector::bridge(), DeltaSelector::bridge(), 4.0, 4.8);
  std::printf("facilities collide at bridge weight %.6f\n", r);
}
