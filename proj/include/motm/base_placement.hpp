#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "motm/geometry.hpp"
#include "motm/global_planner.hpp"
#include "motm/world.hpp"

namespace motm {

struct PlacementConfig {
  double ring_radius = 0.6;       // m
  double angular_step_deg = 10.0;
  int headings_per_position = 2;  // tangential CCW, then CW
  double hysteresis = 0.1;        // s
  // Totals this close to the minimum count as tied; ties go to the candidate
  // closest to the drop point (lowest depart cost).
  double tie_tolerance = 0.05;  // s

  void validate() const;
};

struct Candidate {
  Pose2D pose;
  double angle_deg = 0.0;  // position angle around the object
  bool counter_clockwise = true;
  double approach_cost = kInfinity;
  double depart_cost = kInfinity;
  double total = kInfinity;
  bool feasible = false;
};

/// Ring of base poses around the object, angle-major, counter-clockwise
/// heading first at each angle.
std::vector<Candidate> generate_candidates(Vec2 object, const PlacementConfig& cfg);

/// Fills approach (robot -> candidate) and depart (candidate -> drop, free
/// final heading) costs. Candidates on occupied cells are marked infeasible
/// without querying the planner.
void score_candidates(std::vector<Candidate>& candidates, const Pose2D& robot, Vec2 drop,
                      const VisGraph& graph, const ProximityGrid& grid, const RtrLimits& limits = {});

/// Depart costs only; they do not depend on the robot and can be reused
/// across control steps.
std::vector<double> depart_costs(std::span<const Candidate> candidates, Vec2 drop, const VisGraph& graph,
                                 const RtrLimits& limits = {});

/// Same as score_candidates but with precomputed depart costs.
void score_candidates(std::vector<Candidate>& candidates, const Pose2D& robot,
                      std::span<const double> depart, const VisGraph& graph, const ProximityGrid& grid,
                      const RtrLimits& limits = {});

/// Index of the lowest-total candidate, where totals within tie_tolerance of
/// the minimum are tied and resolved by lower depart cost, then list order.
/// A previous selection is kept unless the new best improves on its current
/// total by at least the hysteresis. Returns nullopt when no candidate is
/// feasible.
std::optional<std::size_t> select_placement(std::span<const Candidate> scored,
                                            std::optional<std::size_t> previous,
                                            const PlacementConfig& cfg);

/// CSV rows: angle_deg,heading_deg,approach_cost,depart_cost,total,selected
void write_candidates_csv(std::ostream& out, std::span<const Candidate> scored,
                          std::optional<std::size_t> selected);

}  // namespace motm
