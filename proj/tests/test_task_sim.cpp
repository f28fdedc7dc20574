#include <doctest.h>

#include <sstream>
#include <stdexcept>

#include "motm/task_sim.hpp"

using namespace motm;
using Kind = GraspPhase::Kind;

namespace {

TrialConfig trial(const std::string& scenario, Method m, double delay) {
  TrialConfig c;
  c.scenario = builtin_scenario(scenario);
  c.method = m;
  c.failure_delay = delay;
  return c;
}

RobotState rest_at(double x, double y, double th, double v = 0, double w = 0) {
  RobotState s;
  s.pose = Pose2D(x, y, th);
  s.twist = {v, w};
  return s;
}

bool same_rows(const std::vector<TrajectoryRow>& a, const std::vector<TrajectoryRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].t != b[i].t || !(a[i].pose == b[i].pose) || !(a[i].twist == b[i].twist) ||
        a[i].phase != b[i].phase || !(a[i].goal == b[i].goal) || a[i].expansions != b[i].expansions)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("kinematic_step examples") {
  auto s = kinematic_step(rest_at(0, 0, 0, 1, 0), {1, 0}, 1.0);
  CHECK(s.pose.x() == doctest::Approx(1.0));
  CHECK(s.pose.y() == doctest::Approx(0.0));
  CHECK(s.time == doctest::Approx(1.0));
  s = kinematic_step(rest_at(0, 0, 0, 0, 1.5), {0, 1.5}, 1.0);
  CHECK(s.pose.x() == doctest::Approx(0.0));
  CHECK(s.pose.theta() == doctest::Approx(1.5));
  s = kinematic_step(rest_at(0, 0, 0, 1, 1), {1, 1}, kPi / 2);
  CHECK(s.pose.x() == doctest::Approx(1.0));
  CHECK(s.pose.y() == doctest::Approx(1.0));
  CHECK(s.pose.theta() == doctest::Approx(kPi / 2));
  // From rest over one control period the limits bind.
  s = kinematic_step(rest_at(0, 0, 0), {5, 5}, 0.05);
  CHECK(s.twist.v == doctest::Approx(0.05));
  CHECK(s.twist.omega == doctest::Approx(0.15));
  // Velocity clamps.
  s = kinematic_step(rest_at(0, 0, 0, 0.99, -1.45), {3, -3}, 0.05);
  CHECK(s.twist.v == 1.0);
  CHECK(s.twist.omega == -1.5);
}

TEST_CASE("grasp_update timer semantics") {
  TrialConfig cfg;
  const Vec2 obj{0, 0}, near{0.5, 0}, far{3, 0};

  cfg.failure_delay = 0;
  auto p = grasp_update({}, far, obj, 1.0, cfg);
  CHECK(p.kind == Kind::not_held);
  CHECK_FALSE(p.first_attempt_time);
  p = grasp_update(p, near, obj, 1.05, cfg);
  CHECK(p.kind == Kind::held);
  CHECK(*p.grasp_time == doctest::Approx(1.05));

  cfg.failure_delay = 6;
  GraspPhase q;
  int step = 100;  // t = 5.0
  for (; q.kind == Kind::not_held; ++step) q = grasp_update(q, near, obj, step * 0.05, cfg);
  CHECK(*q.first_attempt_time == doctest::Approx(5.0));
  CHECK(*q.grasp_time == doctest::Approx(11.0));

  cfg.failure_delay = 2;
  GraspPhase r = grasp_update({}, near, obj, 5.0, cfg);
  for (int i = 101; i <= 120; ++i) r = grasp_update(r, near, obj, i * 0.05, cfg);  // to 6.0
  for (int i = 121; i <= 180; ++i) r = grasp_update(r, far, obj, i * 0.05, cfg);   // to 9.0
  CHECK(r.kind == Kind::not_held);
  r = grasp_update(r, near, obj, 181 * 0.05, cfg);
  CHECK(r.kind == Kind::held);
  CHECK(*r.grasp_time == doctest::Approx(9.05));
  CHECK(*r.first_attempt_time == doctest::Approx(5.0));
}

TEST_CASE("drop_update") {
  TrialConfig cfg;
  GraspPhase held;
  held.kind = Kind::held;
  CHECK(drop_update(held, {0.5, 0}, {0, 0}, 3.0, cfg).kind == Kind::dropped);
  CHECK(*drop_update(held, {0.5, 0}, {0, 0}, 3.0, cfg).drop_time == 3.0);
  CHECK(drop_update(held, {2, 0}, {0, 0}, 3.0, cfg).kind == Kind::held);
  GraspPhase done = drop_update(held, {0.5, 0}, {0, 0}, 3.0, cfg);
  CHECK(drop_update(done, {0.1, 0}, {0, 0}, 4.0, cfg) == done);
  // Not holding anything: nothing to drop.
  CHECK(drop_update(GraspPhase{}, {0, 0}, {0, 0}, 1.0, cfg).kind == Kind::not_held);
}

TEST_CASE("reactive_ring_pose") {
  // Small table so that the due-west ring point is clear of the inflated disc.
  const Vec2 obj = builtin_scenario("line").world.object_position;
  const Scenario small = make_scenario("small", Pose2D(0, 0, 0), obj, {8, 0}, {DiscObstacle{obj, 0.2}});
  const auto grid = build_grid(small.world, kRobotRadius, kGridResolution);

  auto p = reactive_ring_pose(Pose2D(0, 0, 0), obj, grid, 0.6);
  REQUIRE(p);
  CHECK(p->x() == doctest::Approx(3.4));
  CHECK(p->y() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p->theta() == doctest::Approx(0.0));

  // Robot already on the ring.
  const Pose2D on(obj.x + 0.6 * std::cos(1.0), obj.y + 0.6 * std::sin(1.0), 0.3);
  p = reactive_ring_pose(on, obj, grid, 0.6);
  REQUIRE(p);
  CHECK(p->x() == doctest::Approx(on.x()));
  CHECK(p->y() == doctest::Approx(on.y()));

  // A bench west of the table blocks the near arc.
  const Scenario blocked = make_scenario("bench", Pose2D(0, 0, 0), obj, {8, 0},
                                         {DiscObstacle{obj, 0.3}, RectObstacle{{3.2, 0.0}, 0.3, 1.0}});
  const auto g2 = build_grid(blocked.world, kRobotRadius, kGridResolution);
  const Pose2D robot(1.0, 0.2, 0);
  p = reactive_ring_pose(robot, obj, g2, 0.6);
  REQUIRE(p);
  // Oracle: every free ring point at 1 degree resolution, nearest to the robot.
  double best = 1e9;
  for (int a = 0; a < 360; ++a) {
    const Vec2 q = obj + Vec2{std::cos(deg2rad(a)), std::sin(deg2rad(a))} * 0.6;
    if (!g2.occupied_at(q)) best = std::min(best, distance(q, robot.position()));
  }
  CHECK(is_pose_free(g2, *p));
  CHECK(distance(p->position(), robot.position()) <= best + 0.6 * deg2rad(1.0));
  CHECK(distance(p->position(), obj) == doctest::Approx(0.6));
  const Vec2 facing{std::cos(p->theta()), std::sin(p->theta())};
  CHECK(facing.dot(obj - p->position()) == doctest::Approx(0.6));

  // Fully blocked ring.
  const Scenario buried = make_scenario("buried", Pose2D(0, 0, 0), obj, {8, 0}, {DiscObstacle{obj, 1.0}});
  const auto g3 = build_grid(buried.world, kRobotRadius, kGridResolution);
  CHECK_FALSE(reactive_ring_pose(robot, obj, g3, 0.6));
}

TEST_CASE("TrialConfig validation and feasibility") {
  TrialConfig c = trial("line", Method::proposed, 0);
  CHECK_NOTHROW(c.validate());
  c.dt = 0.1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = trial("line", Method::proposed, -1);
  CHECK_THROWS_AS(run_trial(c), std::invalid_argument);
  c = trial("line", Method::proposed, 0);
  c.scenario.start_pose = Pose2D(4, 0, 0);
  CHECK_THROWS_AS(run_trial(c), std::invalid_argument);
  CHECK(parse_method("planned") == Method::planned);
  CHECK_THROWS_AS(parse_method("teleport"), std::invalid_argument);
}

TEST_CASE("trial invariants") {
  for (const char* name : {"line", "turn", "obstructed_turn"}) {
    for (Method m : {Method::proposed, Method::reactive, Method::planned}) {
      const double delay = 2.0;
      const TrialConfig cfg = trial(name, m, delay);
      const TrialResult r = run_trial(cfg);
      CAPTURE(name);
      CAPTURE(to_string(m));
      const auto grid = build_grid(cfg.scenario.world, kRobotRadius, kGridResolution);
      Kind last = Kind::not_held;
      double prev_t = 0;
      for (const auto& row : r.trajectory) {
        CHECK(is_pose_free(grid, row.pose));
        CHECK(static_cast<int>(row.phase) >= static_cast<int>(last));
        if (row.phase != Kind::not_held) {
          REQUIRE(r.first_attempt_time);
          CHECK(row.t >= *r.first_attempt_time + delay - 1e-9);
        }
        CHECK(row.t > prev_t);
        CHECK(std::abs(row.twist.v) <= 1.0);
        CHECK(std::abs(row.twist.omega) <= 1.5);
        prev_t = row.t;
        last = row.phase;
      }
      CHECK(r.control_steps == static_cast<int>(r.trajectory.size()));
      if (m == Method::proposed) CHECK(r.scoring_calls == r.not_held_steps);
      if (m == Method::planned) CHECK(r.scoring_calls == 1);
      if (r.success) {
        REQUIRE(r.exec_time);
        CHECK(*r.exec_time == *r.drop_time);
        CHECK(*r.drop_time <= cfg.timeout);
        CHECK(*r.grasp_time >= *r.first_attempt_time + delay - 1e-9);
      } else {
        CHECK_FALSE(r.exec_time);
        CHECK_FALSE(r.failure_reason.empty());
      }
      if (m != Method::planned) CHECK(r.success);
    }
  }
}

TEST_CASE("deterministic trials are identical") {
  const TrialConfig cfg = trial("turn", Method::proposed, 3.0);
  const auto a = run_trial(cfg);
  const auto b = run_trial(cfg);
  CHECK(same_rows(a.trajectory, b.trajectory));
  CHECK(a.exec_time == b.exec_time);
  std::ostringstream sa, sb;
  write_trajectory_csv(sa, a);
  write_trajectory_csv(sb, b);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("method outcomes on the line") {
  const auto planned_late = run_trial(trial("line", Method::planned, 10.0));
  CHECK_FALSE(planned_late.success);
  const auto planned_now = run_trial(trial("line", Method::planned, 0.0));
  CHECK(planned_now.success);

  const auto r0 = run_trial(trial("line", Method::reactive, 0.0));
  const auto r3 = run_trial(trial("line", Method::reactive, 3.0));
  REQUIRE(r0.success);
  REQUIRE(r3.success);
  CHECK(std::abs((*r3.exec_time - *r0.exec_time) - 3.0) <= 0.2);

  const auto p3 = run_trial(trial("line", Method::proposed, 3.0));
  REQUIRE(p3.success);
  CHECK(*p3.exec_time <= *r3.exec_time + 0.5);
}

TEST_CASE("trajectory CSV") {
  TrialResult r;
  r.trajectory.push_back({0.05, Pose2D(1, 2, 0.5), {0.1, 0.2}, Kind::held, Pose2D(3, 4, 0), {}, 0});
  std::ostringstream out;
  write_trajectory_csv(out, r);
  CHECK(out.str() ==
        "t,x,y,theta,v,omega,phase,goal_x,goal_y,goal_theta\n"
        "0.05,1.000000,2.000000,0.500000,0.100000,0.200000,held,3.000000,4.000000,0.000000\n");
}

TEST_CASE("candidate dump at a requested step") {
  TrialConfig cfg = trial("obstructed_turn", Method::proposed, 0.0);
  cfg.dump_candidates_step = 0;
  cfg.timeout = 0.1;
  const auto r = run_trial(cfg);
  CHECK(std::count(r.candidate_dump.begin(), r.candidate_dump.end(), '\n') == 73);
  REQUIRE(r.initial_path.found());
  CHECK(r.initial_path.waypoints.front() == cfg.scenario.start_pose);
}
