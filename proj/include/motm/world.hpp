#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "motm/geometry.hpp"

namespace motm {

struct DiscObstacle {
  Vec2 center;
  double radius = 0.0;
  bool operator==(const DiscObstacle&) const = default;
};

struct RectObstacle {
  Vec2 center;
  double width = 0.0;
  double height = 0.0;
  bool operator==(const RectObstacle&) const = default;
};

using Obstacle = std::variant<DiscObstacle, RectObstacle>;

/// Discs become circumscribed 16-gons.
ConvexPolygon obstacle_polygon(const Obstacle& obstacle);

struct Bounds {
  Vec2 min;
  Vec2 max;

  bool contains(Vec2 p) const { return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y; }
  bool operator==(const Bounds&) const = default;
};

struct WorldModel {
  std::vector<Obstacle> obstacles;
  Vec2 object_position;
  Vec2 drop_position;
  Bounds bounds;

  std::vector<ConvexPolygon> polygons() const;
  std::vector<ConvexPolygon> inflated_polygons(double inflation) const;
  bool operator==(const WorldModel&) const = default;
};

struct Scenario {
  std::string name;
  Pose2D start_pose;
  WorldModel world;

  bool operator==(const Scenario&) const = default;
};

/// Margin added around the content bounding box when a scenario is built.
inline constexpr double kContentMargin = 1.0;
inline constexpr double kRobotRadius = 0.25;
inline constexpr double kGridResolution = 0.1;
inline constexpr double kInfluenceDistance = 0.8;
inline constexpr double kGridPadding = 1.0;

/// Assembles a scenario and derives bounds from its content.
Scenario make_scenario(std::string name, Pose2D start, Vec2 object, Vec2 drop,
                       std::vector<Obstacle> obstacles);

/// Line, turn and obstructed-turn benchmark layouts.
std::vector<Scenario> builtin_scenarios();

/// Throws std::out_of_range for unknown names.
Scenario builtin_scenario(const std::string& name);

// Inflated occupancy grid with a per-cell clearance field.
class ProximityGrid {
 public:
  ProximityGrid(const WorldModel& world, double inflation, double resolution,
                double influence = kInfluenceDistance);

  double resolution() const { return resolution_; }
  Vec2 origin() const { return origin_; }
  int width() const { return width_; }
  int height() const { return height_; }
  double influence() const { return influence_; }

  bool in_extent(Vec2 p) const;
  Vec2 cell_center(int ix, int iy) const;
  bool occupied(int ix, int iy) const { return occupied_[index(ix, iy)] != 0; }
  double clearance(int ix, int iy) const { return clearance_[index(ix, iy)]; }

  /// Occupancy of the cell containing p; points outside the grid are occupied.
  bool occupied_at(Vec2 p) const;
  /// Bilinearly interpolated clearance.
  double clearance_at(Vec2 p) const;
  /// max(0, 1 - clearance / influence), 1.0 on occupied cells and outside.
  double proximity_cost(Vec2 p) const;

 private:
  std::size_t index(int ix, int iy) const { return static_cast<std::size_t>(iy) * width_ + ix; }

  double resolution_;
  double influence_;
  Vec2 origin_;
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> occupied_;
  std::vector<double> clearance_;
};

ProximityGrid build_grid(const WorldModel& world, double inflation, double resolution);

double proximity_cost(const ProximityGrid& grid, Vec2 p);

bool is_pose_free(const ProximityGrid& grid, const Pose2D& pose);

}  // namespace motm
