#include "motm/global_planner.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>

namespace motm {

VisGraph::VisGraph(std::vector<ConvexPolygon> collision_polygons, std::vector<Vec2> nodes)
    : obstacles_(std::move(collision_polygons)), nodes_(std::move(nodes)) {
  const int n = static_cast<int>(nodes_.size());
  adjacency_.assign(n, {});
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (visible(nodes_[i], nodes_[j])) {
        const double len = distance(nodes_[i], nodes_[j]);
        adjacency_[i].push_back({j, len});
        adjacency_[j].push_back({i, len});
      }
    }
  }
  for (auto& adj : adjacency_) {
    std::sort(adj.begin(), adj.end(), [](const Edge& a, const Edge& b) { return a.to < b.to; });
  }
}

std::size_t VisGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& adj : adjacency_) total += adj.size();
  return total / 2;
}

bool VisGraph::visible(Vec2 a, Vec2 b) const {
  for (const auto& poly : obstacles_) {
    if (poly.strictly_contains(a)) continue;
    if (segment_intersects_polygon(a, b, poly)) return false;
  }
  return true;
}

bool VisGraph::in_collision(Vec2 p) const {
  return std::any_of(obstacles_.begin(), obstacles_.end(),
                     [&](const ConvexPolygon& poly) { return poly.strictly_contains(p); });
}

std::vector<int> VisGraph::visible_nodes(Vec2 p) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
    if (visible(p, nodes_[i])) out.push_back(i);
  }
  return out;
}

VisGraph build_graph(const WorldModel& world, double inflation, double node_margin) {
  auto collision = world.inflated_polygons(inflation);
  std::vector<Vec2> nodes;
  for (const auto& poly : world.inflated_polygons(inflation + node_margin)) {
    for (const auto& v : poly.vertices()) {
      const bool blocked = std::any_of(collision.begin(), collision.end(),
                                       [&](const ConvexPolygon& c) { return c.contains(v); });
      if (!blocked) nodes.push_back(v);
    }
  }
  return VisGraph(std::move(collision), std::move(nodes));
}

double path_rtr_time(std::span<const Pose2D> waypoints, double v_max, double omega_max) {
  if (waypoints.size() < 2) return 0.0;
  double heading = waypoints.front().theta();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const Vec2 d = waypoints[i + 1].position() - waypoints[i].position();
    const double len = d.norm();
    if (len <= 0.0) continue;
    const double dir = d.angle();
    total += std::abs(angle_diff(dir, heading)) / omega_max;
    total += len / v_max;
    heading = dir;
  }
  total += std::abs(angle_diff(waypoints.back().theta(), heading)) / omega_max;
  return total;
}

namespace {

// Search over (node, predecessor) states. Node indices [0, n) are graph
// nodes, n is the query source; predecessor n + 1 marks the root state whose
// heading is the source heading.
class EdgeStateSearch {
 public:
  EdgeStateSearch(const VisGraph& graph, Vec2 source, std::optional<double> source_heading,
                  const RtrLimits& limits)
      : graph_(graph),
        source_(source),
        source_heading_(source_heading),
        limits_(limits),
        n_(static_cast<int>(graph.nodes().size())),
        stride_(n_ + 2),
        dist_(static_cast<std::size_t>(n_ + 1) * stride_, kInfinity),
        parent_(dist_.size(), -1) {
    source_links_ = graph.visible_nodes(source);
  }

  int root() const { return state(n_, n_ + 1); }
  int state(int node, int pred) const { return node * stride_ + pred; }
  int node_of(int s) const { return s / stride_; }
  int pred_of(int s) const { return s % stride_; }
  double dist(int s) const { return dist_[s]; }
  int parent(int s) const { return parent_[s]; }
  int node_count() const { return n_; }
  int stride() const { return stride_; }

  Vec2 position(int node) const { return node == n_ ? source_ : graph_.nodes()[node]; }

  std::optional<double> heading(int s) const {
    const int p = pred_of(s);
    if (p == n_ + 1) return source_heading_;
    return (position(node_of(s)) - position(p)).angle();
  }

  double rotation(std::optional<double> from, double to) const {
    if (!from) return 0.0;
    return std::abs(angle_diff(to, *from)) / limits_.omega_max;
  }

  /// Cost of leaving state s along the segment to point q.
  double hop(int s, Vec2 q) const {
    const Vec2 d = q - position(node_of(s));
    const double len = d.norm();
    if (len <= 0.0) return 0.0;
    return rotation(heading(s), d.angle()) + len / limits_.v_max;
  }

  /// Runs best-first search. With a heuristic and a goal callback the search
  /// stops once no open state can beat `bound()`.
  template <typename Heuristic, typename OnSettle, typename Bound>
  void run(Heuristic&& h, OnSettle&& on_settle, Bound&& bound) {
    using Entry = std::tuple<double, double, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    dist_[root()] = 0.0;
    open.push({h(n_), 0.0, root()});
    while (!open.empty()) {
      const auto [f, g_popped, s] = open.top();
      open.pop();
      if (f >= bound()) break;
      if (g_popped > dist_[s]) continue;
      const int u = node_of(s);
      on_settle(s);
      auto relax = [&](int v, double len) {
        const Vec2 d = position(v) - position(u);
        const double g = dist_[s] + rotation(heading(s), d.angle()) + len / limits_.v_max;
        const int t = state(v, u);
        if (g < dist_[t]) {
          dist_[t] = g;
          parent_[t] = s;
          open.push({g + h(v), g, t});
        }
      };
      if (u == n_) {
        for (int v : source_links_) relax(v, distance(source_, position(v)));
      } else {
        for (const auto& e : graph_.neighbors(u)) relax(e.to, e.length);
      }
    }
  }

 private:
  const VisGraph& graph_;
  Vec2 source_;
  std::optional<double> source_heading_;
  RtrLimits limits_;
  int n_;
  int stride_;
  std::vector<double> dist_;
  std::vector<int> parent_;
  std::vector<int> source_links_;
};

GlobalPath trivial_path(Vec2 start, std::optional<double> start_heading, Vec2 goal,
                        std::optional<double> goal_heading, const RtrLimits& limits) {
  const double th_start = start_heading.value_or(goal_heading.value_or(0.0));
  const double th_goal = goal_heading.value_or(th_start);
  GlobalPath path;
  path.waypoints = {Pose2D(start, th_start), Pose2D(goal, th_goal)};
  path.total_time = path_rtr_time(path.waypoints, limits.v_max, limits.omega_max);
  path.total_length = distance(start, goal);
  return path;
}

}  // namespace

GlobalPath plan(const VisGraph& graph, Vec2 start, std::optional<double> start_heading, Vec2 goal,
                std::optional<double> goal_heading, const RtrLimits& limits) {
  if (graph.in_collision(goal)) return {};
  if (distance(start, goal) <= 1e-12) return trivial_path(start, start_heading, goal, goal_heading, limits);

  EdgeStateSearch search(graph, start, start_heading, limits);
  const int n = search.node_count();
  std::vector<char> sees_goal(n + 1, 0);
  for (int i = 0; i < n; ++i) sees_goal[i] = graph.visible(goal, graph.nodes()[i]) ? 1 : 0;
  sees_goal[n] = graph.visible(start, goal) ? 1 : 0;

  double best = kInfinity;
  int best_state = -1;
  auto h = [&](int node) { return distance(search.position(node), goal) / limits.v_max; };
  auto on_settle = [&](int s) {
    const int u = search.node_of(s);
    if (!sees_goal[u]) return;
    const Vec2 d = goal - search.position(u);
    double c = search.dist(s) + search.hop(s, goal);
    if (goal_heading) c += search.rotation(d.angle(), *goal_heading);
    if (c < best) {
      best = c;
      best_state = s;
    }
  };
  search.run(h, on_settle, [&] { return best; });
  if (best_state < 0) return {};

  std::vector<int> chain;
  for (int s = best_state; s >= 0; s = search.parent(s)) chain.push_back(search.node_of(s));
  std::reverse(chain.begin(), chain.end());

  GlobalPath path;
  std::vector<Vec2> points;
  for (int node : chain) points.push_back(search.position(node));
  points.push_back(goal);
  for (std::size_t i = 0; i < points.size(); ++i) {
    double th;
    if (i == 0) {
      th = start_heading.value_or((points[1] - points[0]).angle());
    } else if (i + 1 == points.size() && goal_heading) {
      th = *goal_heading;
    } else {
      th = (points[i] - points[i - 1]).angle();
    }
    path.waypoints.emplace_back(points[i], th);
  }
  path.total_time = path_rtr_time(path.waypoints, limits.v_max, limits.omega_max);
  path.total_length = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) path.total_length += distance(points[i], points[i + 1]);
  return path;
}

std::vector<double> one_to_many_costs(const VisGraph& graph, Vec2 source,
                                      std::optional<double> source_heading,
                                      std::span<const Pose2D> targets, bool terminal_headings,
                                      const RtrLimits& limits) {
  EdgeStateSearch search(graph, source, source_heading, limits);
  search.run([](int) { return 0.0; }, [](int) {}, [] { return kInfinity; });

  const int n = search.node_count();
  std::vector<double> out;
  out.reserve(targets.size());
  for (const auto& target : targets) {
    const Vec2 t = target.position();
    const std::optional<double> goal_heading =
        terminal_headings ? std::optional<double>(target.theta()) : std::nullopt;
    if (graph.in_collision(t)) {
      out.push_back(kInfinity);
      continue;
    }
    if (distance(source, t) <= 1e-12) {
      out.push_back(trivial_path(source, source_heading, t, goal_heading, limits).total_time);
      continue;
    }
    double best = kInfinity;
    auto consider = [&](int s) {
      if (!std::isfinite(search.dist(s))) return;
      double c = search.dist(s) + search.hop(s, t);
      if (goal_heading) c += search.rotation((t - search.position(search.node_of(s))).angle(), *goal_heading);
      best = std::min(best, c);
    };
    if (graph.visible(source, t)) consider(search.root());
    for (int u = 0; u < n; ++u) {
      if (!graph.visible(t, graph.nodes()[u])) continue;
      for (int p = 0; p <= n; ++p) consider(search.state(u, p));
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace motm
