#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "motm/geometry.hpp"
#include "motm/world.hpp"

namespace motm {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Speed limits that the rotate-translate-rotate time metric is based on.
struct RtrLimits {
  double v_max = 1.0;
  double omega_max = 1.5;
};

/// Visibility graph over the vertices of the inflated obstacles.
///
/// Nodes sit on polygons inflated by an extra `node_margin` so that edges
/// hugging an obstacle do not graze the collision polygon itself. Edges are
/// validated against the collision polygons (inflation only).
class VisGraph {
 public:
  struct Edge {
    int to;
    double length;
  };

  VisGraph() = default;
  VisGraph(std::vector<ConvexPolygon> collision_polygons, std::vector<Vec2> nodes);

  const std::vector<ConvexPolygon>& obstacles() const { return obstacles_; }
  const std::vector<Vec2>& nodes() const { return nodes_; }
  const std::vector<Edge>& neighbors(int node) const { return adjacency_[node]; }
  std::size_t edge_count() const;

  /// Segment test against every collision polygon. Polygons that strictly
  /// contain `a` are ignored so that a query point which drifted slightly
  /// inside an inflated obstacle can still escape it.
  bool visible(Vec2 a, Vec2 b) const;
  bool in_collision(Vec2 p) const;

  /// Indices of graph nodes visible from p.
  std::vector<int> visible_nodes(Vec2 p) const;

 private:
  std::vector<ConvexPolygon> obstacles_;
  std::vector<Vec2> nodes_;
  std::vector<std::vector<Edge>> adjacency_;
};

inline constexpr double kNodeMargin = 0.02;

VisGraph build_graph(const WorldModel& world, double inflation, double node_margin = kNodeMargin);

struct GlobalPath {
  std::vector<Pose2D> waypoints;
  double total_time = kInfinity;
  double total_length = kInfinity;

  bool found() const { return !waypoints.empty(); }
};

/// Rotate-translate-rotate traversal time: per segment, the in-place rotation
/// needed to face it plus its length at v_max, then a final rotation onto the
/// goal heading. Zero-length segments add no rotation.
double path_rtr_time(std::span<const Pose2D> waypoints, double v_max, double omega_max);

/// Minimum-RTR-time path. A missing start heading means the robot may leave
/// in any direction for free; a missing goal heading drops the terminal
/// rotation term. Returns an unfound path (infinite cost) when the goal is
/// in collision or unreachable.
GlobalPath plan(const VisGraph& graph, Vec2 start, std::optional<double> start_heading, Vec2 goal,
                std::optional<double> goal_heading, const RtrLimits& limits = {});

inline GlobalPath plan(const VisGraph& graph, const Pose2D& start, const Pose2D& goal,
                       const RtrLimits& limits = {}) {
  return plan(graph, start.position(), start.theta(), goal.position(), goal.theta(), limits);
}

/// Batch form of plan(): the cost from one source to every target, each equal
/// to what plan() returns for that pair. One search over the graph, with the
/// target-specific final hop and terminal rotation evaluated afterwards.
std::vector<double> one_to_many_costs(const VisGraph& graph, Vec2 source,
                                      std::optional<double> source_heading,
                                      std::span<const Pose2D> targets, bool terminal_headings,
                                      const RtrLimits& limits = {});

}  // namespace motm
