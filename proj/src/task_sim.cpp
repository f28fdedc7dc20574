#include "motm/task_sim.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace motm {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::proposed: return "proposed";
    case Method::reactive: return "reactive";
    case Method::planned: return "planned";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "proposed") return Method::proposed;
  if (name == "reactive") return Method::reactive;
  if (name == "planned") return Method::planned;
  throw std::invalid_argument("unknown method: " + std::string(name));
}

std::string_view to_string(GraspPhase::Kind kind) {
  switch (kind) {
    case GraspPhase::Kind::not_held: return "not_held";
    case GraspPhase::Kind::held: return "held";
    case GraspPhase::Kind::dropped: return "dropped";
  }
  return "unknown";
}

void TrialConfig::validate() const {
  if (failure_delay < 0.0) throw std::invalid_argument("TrialConfig: failure_delay must be >= 0");
  if (!(timeout > 0.0 && dt > 0.0 && reach_radius > 0.0)) {
    throw std::invalid_argument("TrialConfig: timeout, dt and reach_radius must be positive");
  }
  if (std::abs(dt - controller.dt) > 1e-12) {
    throw std::invalid_argument("TrialConfig: dt must match the controller period");
  }
  controller.validate();
  placement.validate();
}

GraspPhase grasp_update(const GraspPhase& phase, Vec2 robot, Vec2 object, double t,
                        const TrialConfig& cfg) {
  if (phase.kind != GraspPhase::Kind::not_held) return phase;
  const bool in_reach = distance(robot, object) <= cfg.reach_radius;
  if (!in_reach) return phase;
  GraspPhase next = phase;
  if (!next.first_attempt_time) next.first_attempt_time = t;
  // Time is a multiple of dt; the tolerance absorbs rounding of the sum.
  if (t >= *next.first_attempt_time + cfg.failure_delay - 1e-9) {
    next.kind = GraspPhase::Kind::held;
    next.grasp_time = t;
  }
  return next;
}

GraspPhase drop_update(const GraspPhase& phase, Vec2 robot, Vec2 drop, double t,
                       const TrialConfig& cfg) {
  if (phase.kind != GraspPhase::Kind::held) return phase;
  if (distance(robot, drop) > cfg.reach_radius) return phase;
  GraspPhase next = phase;
  next.kind = GraspPhase::Kind::dropped;
  next.drop_time = t;
  return next;
}

std::optional<Pose2D> reactive_ring_pose(const Pose2D& robot, Vec2 center, const ProximityGrid& grid,
                                         double ring_radius) {
  const Vec2 offset = robot.position() - center;
  const double base = offset.norm() > 1e-12 ? offset.angle() : 0.0;
  for (int step = 0; step <= 180; ++step) {
    for (int sign : {1, -1}) {
      if (step == 0 && sign < 0) continue;
      if (step == 180 && sign < 0) continue;
      const double a = base + sign * deg2rad(step);
      const Vec2 p{center.x + ring_radius * std::cos(a), center.y + ring_radius * std::sin(a)};
      if (!grid.occupied_at(p)) return Pose2D(p, a + kPi);
    }
  }
  return std::nullopt;
}

void check_scenario_feasible(const Scenario& scenario, const ProximityGrid& grid,
                             const PlacementConfig& placement, double reach_radius) {
  const auto& w = scenario.world;
  if (!w.bounds.contains(w.object_position) || !w.bounds.contains(w.drop_position)) {
    throw std::invalid_argument("scenario " + scenario.name + ": object or drop outside bounds");
  }
  if (!is_pose_free(grid, scenario.start_pose)) {
    throw std::invalid_argument("scenario " + scenario.name + ": start pose in collision");
  }
  if (placement.ring_radius > reach_radius) {
    throw std::invalid_argument("scenario " + scenario.name + ": candidate ring outside reach");
  }
  const Pose2D probe(w.object_position.x - 1.0, w.object_position.y, 0.0);
  if (!reactive_ring_pose(probe, w.object_position, grid, placement.ring_radius)) {
    throw std::invalid_argument("scenario " + scenario.name + ": no free pose around the object");
  }
  if (!reactive_ring_pose(probe, w.drop_position, grid, placement.ring_radius)) {
    throw std::invalid_argument("scenario " + scenario.name + ": no free pose around the drop point");
  }
}

namespace {

GlobalPath straight_path(const Pose2D& from, const Pose2D& to) {
  GlobalPath p;
  p.waypoints = {from, to};
  p.total_length = distance(from.position(), to.position());
  p.total_time = p.total_length;
  return p;
}

}  // namespace

TrialResult run_trial(const TrialConfig& cfg) {
  cfg.validate();
  const WorldModel& world = cfg.scenario.world;
  const ProximityGrid grid = build_grid(world, kRobotRadius, kGridResolution);
  const VisGraph graph = build_graph(world, kRobotRadius);
  check_scenario_feasible(cfg.scenario, grid, cfg.placement, cfg.reach_radius);

  ControllerConfig ccfg = cfg.controller;
  ccfg.deterministic = cfg.deterministic_search;
  LocalController controller(ccfg);
  const RtrLimits rtr{ccfg.limits.v_max, ccfg.limits.omega_max};
  const Vec2 object = world.object_position;
  const Vec2 drop = world.drop_position;

  std::vector<Candidate> candidates = generate_candidates(object, cfg.placement);
  const std::vector<double> depart = depart_costs(candidates, drop, graph, rtr);
  std::optional<std::size_t> selected;

  TrialResult result;
  RobotState state{cfg.scenario.start_pose, {}, 0.0};
  GraspPhase phase;

  // Planned: two fixed legs, start -> candidate and candidate -> drop.
  GlobalPath planned_legs[2];
  int planned_leg = 0;
  double planned_progress = 0.0;
  bool planned_done = false;
  if (cfg.method == Method::planned) {
    score_candidates(candidates, state.pose, depart, graph, grid, rtr);
    ++result.scoring_calls;
    const auto sel = select_placement(candidates, std::nullopt, cfg.placement);
    if (!sel) throw std::invalid_argument("no feasible base placement");
    const Pose2D& c = candidates[*sel].pose;
    planned_legs[0] = plan(graph, state.pose, c, rtr);
    planned_legs[1] = plan(graph, c.position(), c.theta(), drop, std::nullopt, rtr);
    if (!planned_legs[0].found() || !planned_legs[1].found()) {
      throw std::invalid_argument("planned route not found");
    }
  }
  // Reactive: the grasp is attempted only once the base has stopped at its
  // ring pose.
  bool reactive_arrived = cfg.method != Method::reactive;

  const long steps = std::lround(cfg.timeout / cfg.dt);
  for (long step = 0; step < steps; ++step) {
    const bool not_held = phase.kind == GraspPhase::Kind::not_held;
    if (not_held) ++result.not_held_steps;

    GoalSpec final_goal;
    GlobalPath path;
    double hint = 0.0;
    switch (cfg.method) {
      case Method::proposed:
        if (not_held) {
          score_candidates(candidates, state.pose, depart, graph, grid, rtr);
          ++result.scoring_calls;
          const auto sel = select_placement(candidates, selected, cfg.placement);
          if (static_cast<int>(step) == cfg.dump_candidates_step) {
            std::ostringstream os;
            write_candidates_csv(os, candidates, sel);
            result.candidate_dump = os.str();
          }
          if (sel) {
            selected = sel;
            final_goal = {candidates[*sel].pose, GoalMode::stop_at};
          } else {
            const auto ring = reactive_ring_pose(state.pose, object, grid, cfg.placement.ring_radius);
            if (!ring) {
              result.failure_reason = "no reachable pose around the object";
              break;
            }
            final_goal = {*ring, GoalMode::stop_at};
          }
          path = plan(graph, state.pose, final_goal.pose, rtr);
        } else {
          path = plan(graph, state.pose.position(), state.pose.theta(), drop, std::nullopt, rtr);
          final_goal = {path.found() ? path.waypoints.back() : Pose2D(drop, 0.0), GoalMode::pass_through};
        }
        break;
      case Method::reactive: {
        const Vec2 center = not_held ? object : drop;
        const auto ring = reactive_ring_pose(state.pose, center, grid, cfg.placement.ring_radius);
        if (!ring) {
          result.failure_reason = "no reachable pose around the target";
          break;
        }
        final_goal = {*ring, GoalMode::stop_at};
        path = plan(graph, state.pose, final_goal.pose, rtr);
        break;
      }
      case Method::planned:
        path = planned_legs[planned_leg];
        hint = planned_progress;
        final_goal = {path.waypoints.back(),
                      planned_done ? GoalMode::stop_at : GoalMode::pass_through};
        break;
    }
    if (!result.failure_reason.empty()) break;
    if (!path.found()) path = straight_path(state.pose, final_goal.pose);
    if (step == 0) result.initial_path = path;

    const IntermediateTarget target =
        intermediate_target(path, state.pose, ccfg.local_window, final_goal.mode, hint, &graph);
    const SearchResult sr = controller.search(state, target.goal, grid);
    if (sr.outcome == SearchOutcome::emergency_stop) ++result.emergency_stops;
    result.max_search_ms = std::max(result.max_search_ms, sr.wall_ms);

    state = kinematic_step(state, sr.command, cfg.dt, ccfg.limits);
    state.time = static_cast<double>(step + 1) * cfg.dt;
    ++result.control_steps;

    if (cfg.method == Method::planned) {
      planned_progress = std::max(planned_progress, target.progress);
      const GlobalPath& leg = planned_legs[planned_leg];
      // The fixed plan assumes the grasp happens as soon as the object is in
      // reach and moves on to the drop leg without waiting for it.
      const bool leg_end = planned_leg == 0
                               ? distance(state.pose.position(), object) <= cfg.reach_radius
                               : planned_progress >= leg.total_length - ccfg.goal_pos_tol;
      if (leg_end && planned_leg == 0) {
        planned_leg = 1;
        planned_progress = 0.0;
      } else if (leg_end) {
        planned_done = true;
      }
    }
    if (!reactive_arrived && sr.outcome == SearchOutcome::at_goal && state.twist.v == 0.0 &&
        state.twist.omega == 0.0) {
      reactive_arrived = true;
    }

    if (reactive_arrived) phase = grasp_update(phase, state.pose.position(), object, state.time, cfg);
    phase = drop_update(phase, state.pose.position(), drop, state.time, cfg);
    result.trajectory.push_back(
        {state.time, state.pose, state.twist, phase.kind, final_goal.pose, sr.outcome, sr.expansions});

    if (phase.kind == GraspPhase::Kind::dropped) break;
  }

  result.first_attempt_time = phase.first_attempt_time;
  result.grasp_time = phase.grasp_time;
  result.drop_time = phase.drop_time;
  result.success = phase.kind == GraspPhase::Kind::dropped;
  if (result.success) {
    result.exec_time = phase.drop_time;
  } else if (result.failure_reason.empty()) {
    result.failure_reason = phase.kind == GraspPhase::Kind::not_held ? "timeout before grasp"
                                                                      : "timeout before drop";
  }
  return result;
}

void write_trajectory_csv(std::ostream& out, const TrialResult& result) {
  out << "t,x,y,theta,v,omega,phase,goal_x,goal_y,goal_theta\n";
  char buf[256];
  for (const auto& r : result.trajectory) {
    std::snprintf(buf, sizeof buf, "%.2f,%.6f,%.6f,%.6f,%.6f,%.6f,%s,%.6f,%.6f,%.6f\n", r.t, r.pose.x(),
                  r.pose.y(), r.pose.theta(), r.twist.v, r.twist.omega, to_string(r.phase).data(),
                  r.goal.x(), r.goal.y(), r.goal.theta());
    out << buf;
  }
}

}  // namespace motm
