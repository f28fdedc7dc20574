#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "motm/base_placement.hpp"
#include "motm/geometry.hpp"
#include "motm/global_planner.hpp"
#include "motm/kinematics.hpp"
#include "motm/local_controller.hpp"
#include "motm/world.hpp"

namespace motm {

enum class Method { proposed, reactive, planned };

std::string_view to_string(Method method);
/// Throws std::invalid_argument for unknown names.
Method parse_method(std::string_view name);

// Grasp state machine: not_held -> held -> dropped.
struct GraspPhase {
  enum class Kind { not_held, held, dropped };

  Kind kind = Kind::not_held;
  std::optional<double> first_attempt_time;
  std::optional<double> grasp_time;
  std::optional<double> drop_time;

  bool operator==(const GraspPhase&) const = default;
};

std::string_view to_string(GraspPhase::Kind kind);

struct TrialConfig {
  Scenario scenario;
  Method method = Method::proposed;
  double failure_delay = 0.0;  // s
  double timeout = 60.0;       // s
  double dt = 0.05;            // s, must equal controller.dt
  double reach_radius = 0.9;   // m
  bool deterministic_search = true;
  ControllerConfig controller;
  PlacementConfig placement;
  // Debug: write the scored candidate ring at this control step (-1 = off).
  int dump_candidates_step = -1;

  void validate() const;
};

/// Starts the failure-delay clock on the first in-reach step and completes
/// the grasp on the first in-reach step once the delay has elapsed. Leaving
/// reach does not reset the clock.
GraspPhase grasp_update(const GraspPhase& phase, Vec2 robot, Vec2 object, double t,
                        const TrialConfig& cfg);

/// Releases a held object as soon as the robot is within reach of the drop
/// point.
GraspPhase drop_update(const GraspPhase& phase, Vec2 robot, Vec2 drop, double t,
                       const TrialConfig& cfg);

/// Free pose on the ring around `center` closest to the robot, facing the
/// center. The exact projection is tried first, then 1 degree steps
/// alternating to either side.
std::optional<Pose2D> reactive_ring_pose(const Pose2D& robot, Vec2 center, const ProximityGrid& grid,
                                         double ring_radius);

struct TrajectoryRow {
  double t = 0.0;
  Pose2D pose;
  Twist twist;
  GraspPhase::Kind phase = GraspPhase::Kind::not_held;
  Pose2D goal;
  SearchOutcome outcome = SearchOutcome::exhausted;
  int expansions = 0;
};

struct TrialResult {
  bool success = false;
  std::optional<double> exec_time;
  std::optional<double> first_attempt_time;
  std::optional<double> grasp_time;
  std::optional<double> drop_time;
  std::vector<TrajectoryRow> trajectory;

  int control_steps = 0;
  int not_held_steps = 0;
  int scoring_calls = 0;
  int emergency_stops = 0;
  double max_search_ms = 0.0;
  std::string failure_reason;
  std::string candidate_dump;  // CSV, when requested
  GlobalPath initial_path;     // global path used on the first control step
};

/// Rejects scenarios whose start pose is occupied or whose object or drop
/// point has no free pose on its ring. Throws std::invalid_argument.
void check_scenario_feasible(const Scenario& scenario, const ProximityGrid& grid,
                             const PlacementConfig& placement, double reach_radius);

TrialResult run_trial(const TrialConfig& cfg);

/// Header: t,x,y,theta,v,omega,phase,goal_x,goal_y,goal_theta
void write_trajectory_csv(std::ostream& out, const TrialResult& result);

}  // namespace motm
