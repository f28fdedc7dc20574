#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "motm/geometry.hpp"
#include "motm/global_planner.hpp"
#include "motm/kinematics.hpp"
#include "motm/world.hpp"

namespace motm {

struct ControllerConfig {
  double dt = 0.05;                  // control period, s
  double budget_ms = 25.0;           // wall-clock abort
  double primitive_duration = 0.25;  // s
  int horizon = 8;                   // primitives per rollout
  double goal_pos_tol = 0.15;        // m
  double goal_heading_tol = 0.35;    // rad
  double w_prox = 2.0;
  double local_window = 2.0;  // half-extent, m
  double stop_speed = 0.05;   // |v| below this counts as stopped
  double reverse_penalty = 1.5;
  // Deterministic mode replaces the wall-clock abort by an expansion cap.
  bool deterministic = false;
  int max_expansions = 2000;
  // Set false to pin the proximity weight scale k to 1.
  bool proximity_scaling = true;
  KinematicLimits limits;

  /// Throws std::invalid_argument if a field is out of range.
  void validate() const;
  int substeps() const;
};

enum class GoalMode { stop_at, pass_through };

std::string_view to_string(GoalMode mode);

struct GoalSpec {
  Pose2D pose;
  GoalMode mode = GoalMode::stop_at;
};

struct IntermediateTarget {
  GoalSpec goal;
  double progress = 0.0;  // arc length of the path point closest to the robot
};

/// Local goal on the global path: starting from the path point nearest the
/// robot (at or after `progress_hint` along the path), follow the path until
/// it leaves the square window of half-extent `window` around the robot. The
/// exit point becomes a pass-through target; if the path ends inside the
/// window its final waypoint is used with `final_mode`. When the nearest
/// path point is itself outside the window, that point is returned.
/// With `los` given, the walk also stops at the last path point in line of
/// sight of the robot.
IntermediateTarget intermediate_target(const GlobalPath& path, const Pose2D& robot, double window,
                                       GoalMode final_mode, double progress_hint = 0.0,
                                       const VisGraph* los = nullptr);

/// max(0.1, min(t_h / 3, 1))
double proximity_penalty_scale(double t_h);

/// Time-to-goal estimate: rotate to face the goal, translate under the
/// acceleration and speed limits (ending at rest for stop_at goals), and for
/// stop_at goals rotate onto the goal heading. Reverse driving is considered
/// for stop_at goals with the translation time inflated by reverse_penalty.
double time_to_goal(const RobotState& state, const GoalSpec& goal, const ControllerConfig& cfg);

struct SearchNode {
  RobotState state;
  double elapsed = 0.0;
  double proximity = 0.0;     // integral of proximity cost over the rollout, s
  double accrued_cost = 0.0;  // elapsed + w_prox * k * proximity
  int parent = -1;
  int depth = 0;
  Twist first_action;
};

/// accrued_cost + time_to_goal, or infinity when `collided`.
double node_cost(const SearchNode& node, const GoalSpec& goal, const ControllerConfig& cfg,
                 bool collided = false);

enum class SearchOutcome {
  at_goal,           // root already satisfies the goal
  goal_reached,      // a node satisfied the goal tolerances
  edge_pass,         // a rollout segment swept through a pass-through goal
  horizon_complete,  // best horizon-length rollout found
  budget_expired,
  exhausted,
  emergency_stop,
};

std::string_view to_string(SearchOutcome outcome);

struct SearchResult {
  Twist command;
  SearchOutcome outcome = SearchOutcome::exhausted;
  int expansions = 0;
  double wall_ms = 0.0;
  double k = 1.0;
};

using WallClock = std::function<std::chrono::steady_clock::time_point()>;

/// Short-horizon anytime search. Holds scratch buffers, so one instance per
/// simulated robot.
class LocalController {
 public:
  explicit LocalController(ControllerConfig cfg, WallClock clock = {});

  const ControllerConfig& config() const { return cfg_; }

  SearchResult search(const RobotState& robot, const GoalSpec& goal, const ProximityGrid& grid);

 private:
  bool satisfies_goal(const RobotState& s, const GoalSpec& goal) const;
  std::uint64_t state_key(const RobotState& s) const;
  bool can_stop(RobotState s, const ProximityGrid& grid, double step) const;

  ControllerConfig cfg_;
  WallClock clock_;
  std::deque<SearchNode> nodes_;
  std::unordered_map<std::uint64_t, double> seen_;
};

}  // namespace motm
