#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "motm/global_planner.hpp"

namespace motm::testing {

// Term-by-term RTR sum over a point sequence with optional end headings.
double rtr_oracle(const std::vector<Vec2>& pts, std::optional<double> h0, std::optional<double> h1,
                  const RtrLimits& lim) {
  double total = 0.0;
  std::optional<double> heading = h0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec2 d = pts[i + 1] - pts[i];
    if (d.norm() == 0.0) continue;
    const double dir = std::atan2(d.y, d.x);
    if (heading) total += std::abs(angle_diff(dir, *heading)) / lim.omega_max;
    total += d.norm() / lim.v_max;
    heading = dir;
  }
  if (h1 && heading) total += std::abs(angle_diff(*h1, *heading)) / lim.omega_max;
  return total;
}

struct OracleResult {
  double cost = kInfinity;
  std::vector<Vec2> points;
};

// Exhaustive enumeration of simple paths start -> graph nodes -> goal,
// pruned only by a straight-line lower bound.
OracleResult brute_force(const VisGraph& g, Vec2 start, std::optional<double> h0, Vec2 goal,
                         std::optional<double> h1, const RtrLimits& lim) {
  OracleResult best;
  if (g.in_collision(goal)) return best;
  const auto& nodes = g.nodes();
  const int n = static_cast<int>(nodes.size());
  std::vector<char> used(n, 0);
  std::vector<Vec2> pts{start};
  auto partial = [&](const std::vector<Vec2>& p) { return rtr_oracle(p, h0, std::nullopt, lim); };
  std::function<void(int)> dfs = [&](int at) {
    const Vec2 here = at < 0 ? start : nodes[at];
    const double so_far = partial(pts);
    if (so_far + distance(here, goal) / lim.v_max >= best.cost) return;
    const bool sees = at < 0 ? g.visible(start, goal) : g.visible(goal, here);
    if (sees) {
      pts.push_back(goal);
      const double c = rtr_oracle(pts, h0, h1, lim);
      if (c < best.cost) best = {c, pts};
      pts.pop_back();
    }
    for (int v = 0; v < n; ++v) {
      if (used[v]) continue;
      const bool edge = at < 0 ? g.visible(start, nodes[v])
                               : std::any_of(g.neighbors(at).begin(), g.neighbors(at).end(),
                                             [&](const VisGraph::Edge& e) { return e.to == v; });
      if (!edge) continue;
      used[v] = 1;
      pts.push_back(nodes[v]);
      dfs(v);
      pts.pop_back();
      used[v] = 0;
    }
  };
  dfs(-1);
  return best;
}

}  // namespace motm::testing
