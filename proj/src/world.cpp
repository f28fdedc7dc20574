#include "motm/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace motm {

ConvexPolygon obstacle_polygon(const Obstacle& obstacle) {
  if (const auto* d = std::get_if<DiscObstacle>(&obstacle)) {
    return ConvexPolygon::disc(d->center, d->radius, 16);
  }
  const auto& r = std::get<RectObstacle>(obstacle);
  return ConvexPolygon::rectangle(r.center, r.width, r.height);
}

std::vector<ConvexPolygon> WorldModel::polygons() const {
  std::vector<ConvexPolygon> out;
  out.reserve(obstacles.size());
  for (const auto& o : obstacles) out.push_back(obstacle_polygon(o));
  return out;
}

std::vector<ConvexPolygon> WorldModel::inflated_polygons(double inflation) const {
  std::vector<ConvexPolygon> out;
  out.reserve(obstacles.size());
  for (const auto& o : obstacles) out.push_back(inflate_polygon(obstacle_polygon(o), inflation));
  return out;
}

Scenario make_scenario(std::string name, Pose2D start, Vec2 object, Vec2 drop,
                       std::vector<Obstacle> obstacles) {
  Scenario s;
  s.name = std::move(name);
  s.start_pose = start;
  s.world.object_position = object;
  s.world.drop_position = drop;
  s.world.obstacles = std::move(obstacles);

  Vec2 lo{std::min({start.x(), object.x, drop.x}), std::min({start.y(), object.y, drop.y})};
  Vec2 hi{std::max({start.x(), object.x, drop.x}), std::max({start.y(), object.y, drop.y})};
  for (const auto& poly : s.world.polygons()) {
    for (const auto& v : poly.vertices()) {
      lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
      hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
    }
  }
  s.world.bounds = {{lo.x - kContentMargin, lo.y - kContentMargin},
                    {hi.x + kContentMargin, hi.y + kContentMargin}};
  return s;
}

std::vector<Scenario> builtin_scenarios() {
  const Vec2 object{4.0, 0.0};
  const DiscObstacle table{object, 0.30};
  std::vector<Scenario> out;
  out.push_back(make_scenario("line", Pose2D(0, 0, 0), object, {8.0, 0.0}, {table}));
  out.push_back(make_scenario("turn", Pose2D(0, 0, 0), object, {0.0, 1.0}, {table}));
  // A wall separates the outbound lane from the return lane and meets the
  // table, so the only route to the drop point wraps around the object. The
  // post east of the table keeps that detour close to it.
  out.push_back(make_scenario("obstructed_turn", Pose2D(0, 0, 0), object, {0.0, 1.5},
                              {table, RectObstacle{{0.25, 0.6}, 6.5, 0.3},
                               RectObstacle{{5.4, 0.0}, 0.4, 3.0}}));
  return out;
}

Scenario builtin_scenario(const std::string& name) {
  for (auto& s : builtin_scenarios()) {
    if (s.name == name) return s;
  }
  throw std::out_of_range("unknown scenario: " + name);
}

ProximityGrid::ProximityGrid(const WorldModel& world, double inflation, double resolution,
                             double influence)
    : resolution_(resolution), influence_(influence) {
  if (!(resolution > 0.0)) throw std::invalid_argument("build_grid: resolution must be positive");
  if (inflation < 0.0) throw std::invalid_argument("build_grid: negative inflation");
  const Bounds& b = world.bounds;
  if (!(b.max.x > b.min.x && b.max.y > b.min.y)) {
    throw std::invalid_argument("build_grid: degenerate bounds");
  }
  // Snap the origin to a multiple of the resolution so cell layout does not
  // depend on the exact extent of the content.
  origin_ = {std::floor((b.min.x - kGridPadding) / resolution) * resolution,
             std::floor((b.min.y - kGridPadding) / resolution) * resolution};
  width_ = static_cast<int>(std::ceil((b.max.x + kGridPadding - origin_.x) / resolution));
  height_ = static_cast<int>(std::ceil((b.max.y + kGridPadding - origin_.y) / resolution));

  const auto inflated = world.inflated_polygons(inflation);
  occupied_.assign(static_cast<std::size_t>(width_) * height_, 0);
  clearance_.assign(occupied_.size(), 0.0);
  for (int iy = 0; iy < height_; ++iy) {
    for (int ix = 0; ix < width_; ++ix) {
      const Vec2 c = cell_center(ix, iy);
      bool occ = false;
      double clear = std::numeric_limits<double>::infinity();
      for (const auto& poly : inflated) {
        if (poly.contains(c)) {
          occ = true;
          break;
        }
        clear = std::min(clear, poly.boundary_distance(c));
      }
      occupied_[index(ix, iy)] = occ ? 1 : 0;
      // An obstacle-free world has no boundary; cap at a large finite value.
      clearance_[index(ix, iy)] = occ ? 0.0 : std::min(clear, 1e6);
    }
  }
}

bool ProximityGrid::in_extent(Vec2 p) const {
  return p.x >= origin_.x && p.y >= origin_.y && p.x < origin_.x + width_ * resolution_ &&
         p.y < origin_.y + height_ * resolution_;
}

Vec2 ProximityGrid::cell_center(int ix, int iy) const {
  return {origin_.x + (ix + 0.5) * resolution_, origin_.y + (iy + 0.5) * resolution_};
}

bool ProximityGrid::occupied_at(Vec2 p) const {
  if (!in_extent(p)) return true;
  const int ix = std::min(static_cast<int>((p.x - origin_.x) / resolution_), width_ - 1);
  const int iy = std::min(static_cast<int>((p.y - origin_.y) / resolution_), height_ - 1);
  return occupied(ix, iy);
}

double ProximityGrid::clearance_at(Vec2 p) const {
  const double gx = std::clamp((p.x - origin_.x) / resolution_ - 0.5, 0.0, width_ - 1.0);
  const double gy = std::clamp((p.y - origin_.y) / resolution_ - 0.5, 0.0, height_ - 1.0);
  const int x0 = std::min(static_cast<int>(gx), width_ - 2 < 0 ? 0 : width_ - 2);
  const int y0 = std::min(static_cast<int>(gy), height_ - 2 < 0 ? 0 : height_ - 2);
  const int x1 = std::min(x0 + 1, width_ - 1);
  const int y1 = std::min(y0 + 1, height_ - 1);
  const double fx = gx - x0;
  const double fy = gy - y0;
  const double c00 = clearance(x0, y0), c10 = clearance(x1, y0);
  const double c01 = clearance(x0, y1), c11 = clearance(x1, y1);
  return (1 - fy) * ((1 - fx) * c00 + fx * c10) + fy * ((1 - fx) * c01 + fx * c11);
}

double ProximityGrid::proximity_cost(Vec2 p) const {
  if (occupied_at(p)) return 1.0;
  return std::max(0.0, 1.0 - clearance_at(p) / influence_);
}

ProximityGrid build_grid(const WorldModel& world, double inflation, double resolution) {
  return ProximityGrid(world, inflation, resolution);
}

double proximity_cost(const ProximityGrid& grid, Vec2 p) { return grid.proximity_cost(p); }

bool is_pose_free(const ProximityGrid& grid, const Pose2D& pose) {
  return !grid.occupied_at(pose.position());
}

}  // namespace motm
