#include "motm/base_placement.hpp"

#include <cmath>
#include <stdexcept>

namespace motm {

void PlacementConfig::validate() const {
  if (!(ring_radius > 0 && angular_step_deg > 0 && hysteresis >= 0 && tie_tolerance >= 0)) {
    throw std::invalid_argument("PlacementConfig: ring radius and angular step must be positive");
  }
  const double steps = 360.0 / angular_step_deg;
  if (std::abs(steps - std::round(steps)) > 1e-9) {
    throw std::invalid_argument("PlacementConfig: 360 must be divisible by the angular step");
  }
  if (headings_per_position != 1 && headings_per_position != 2) {
    throw std::invalid_argument("PlacementConfig: headings_per_position must be 1 or 2");
  }
}

std::vector<Candidate> generate_candidates(Vec2 object, const PlacementConfig& cfg) {
  cfg.validate();
  const int positions = static_cast<int>(std::lround(360.0 / cfg.angular_step_deg));
  std::vector<Candidate> out;
  out.reserve(static_cast<std::size_t>(positions) * cfg.headings_per_position);
  for (int i = 0; i < positions; ++i) {
    const double deg = i * cfg.angular_step_deg;
    const double th = deg2rad(deg);
    const Vec2 p{object.x + cfg.ring_radius * std::cos(th), object.y + cfg.ring_radius * std::sin(th)};
    for (int h = 0; h < cfg.headings_per_position; ++h) {
      Candidate c;
      c.angle_deg = deg;
      c.counter_clockwise = h == 0;
      c.pose = Pose2D(p, c.counter_clockwise ? th + kPi / 2 : th - kPi / 2);
      out.push_back(c);
    }
  }
  return out;
}

std::vector<double> depart_costs(std::span<const Candidate> candidates, Vec2 drop, const VisGraph& graph,
                                 const RtrLimits& limits) {
  // Searching backwards from the drop point: leaving a candidate along its
  // heading is arriving there facing the opposite way.
  std::vector<Pose2D> reversed;
  reversed.reserve(candidates.size());
  for (const auto& c : candidates) reversed.emplace_back(c.pose.position(), c.pose.theta() + kPi);
  return one_to_many_costs(graph, drop, std::nullopt, reversed, true, limits);
}

void score_candidates(std::vector<Candidate>& candidates, const Pose2D& robot,
                      std::span<const double> depart, const VisGraph& graph, const ProximityGrid& grid,
                      const RtrLimits& limits) {
  if (depart.size() != candidates.size()) throw std::invalid_argument("score_candidates: size mismatch");
  std::vector<Pose2D> targets;
  std::vector<std::size_t> feasible_index;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto& c = candidates[i];
    c.approach_cost = c.depart_cost = c.total = kInfinity;
    c.feasible = false;
    if (!is_pose_free(grid, c.pose)) continue;
    targets.push_back(c.pose);
    feasible_index.push_back(i);
  }
  const auto approach =
      one_to_many_costs(graph, robot.position(), robot.theta(), targets, true, limits);
  for (std::size_t j = 0; j < feasible_index.size(); ++j) {
    auto& c = candidates[feasible_index[j]];
    c.approach_cost = approach[j];
    c.depart_cost = depart[feasible_index[j]];
    if (std::isfinite(c.approach_cost) && std::isfinite(c.depart_cost)) {
      c.total = c.approach_cost + c.depart_cost;
      c.feasible = true;
    }
  }
}

void score_candidates(std::vector<Candidate>& candidates, const Pose2D& robot, Vec2 drop,
                      const VisGraph& graph, const ProximityGrid& grid, const RtrLimits& limits) {
  const auto depart = depart_costs(candidates, drop, graph, limits);
  score_candidates(candidates, robot, depart, graph, grid, limits);
}

std::optional<std::size_t> select_placement(std::span<const Candidate> scored,
                                            std::optional<std::size_t> previous,
                                            const PlacementConfig& cfg) {
  std::optional<std::size_t> lowest;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    if (!scored[i].feasible) continue;
    if (!lowest || scored[i].total < scored[*lowest].total) lowest = i;
  }
  if (!lowest) return std::nullopt;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    if (!scored[i].feasible || scored[i].total > scored[*lowest].total + cfg.tie_tolerance) continue;
    if (!best || scored[i].depart_cost < scored[*best].depart_cost) best = i;
  }
  if (previous && *previous < scored.size() && scored[*previous].feasible &&
      scored[*best].total >= scored[*previous].total - cfg.hysteresis) {
    return previous;
  }
  return best;
}

void write_candidates_csv(std::ostream& out, std::span<const Candidate> scored,
                          std::optional<std::size_t> selected) {
  out << "angle_deg,heading_deg,approach_cost,depart_cost,total,selected\n";
  for (std::size_t i = 0; i < scored.size(); ++i) {
    const auto& c = scored[i];
    out << c.angle_deg << ',' << rad2deg(c.pose.theta()) << ',' << c.approach_cost << ','
        << c.depart_cost << ',' << c.total << ',' << (selected && *selected == i ? 1 : 0) << '\n';
  }
}

}  // namespace motm
