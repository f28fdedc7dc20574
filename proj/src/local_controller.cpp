#include "motm/local_controller.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace motm {

void ControllerConfig::validate() const {
  if (!(dt > 0 && budget_ms > 0 && primitive_duration > 0 && horizon > 0 && goal_pos_tol > 0 &&
        goal_heading_tol > 0 && w_prox > 0 && local_window > 0 && max_expansions > 0)) {
    throw std::invalid_argument("ControllerConfig: all parameters must be strictly positive");
  }
  if (budget_ms >= dt * 1000.0) {
    throw std::invalid_argument("ControllerConfig: search budget must be shorter than the control period");
  }
  if (!(limits.v_max > 0 && limits.omega_max > 0 && limits.a_max > 0 && limits.alpha_max > 0)) {
    throw std::invalid_argument("KinematicLimits: all limits must be strictly positive");
  }
}

int ControllerConfig::substeps() const {
  return std::max(1, static_cast<int>(std::lround(primitive_duration / dt)));
}

std::string_view to_string(GoalMode mode) {
  return mode == GoalMode::stop_at ? "stop_at" : "pass_through";
}

std::string_view to_string(SearchOutcome outcome) {
  switch (outcome) {
    case SearchOutcome::at_goal: return "at_goal";
    case SearchOutcome::goal_reached: return "goal_reached";
    case SearchOutcome::edge_pass: return "edge_pass";
    case SearchOutcome::horizon_complete: return "horizon_complete";
    case SearchOutcome::budget_expired: return "budget_expired";
    case SearchOutcome::exhausted: return "exhausted";
    case SearchOutcome::emergency_stop: return "emergency_stop";
  }
  return "unknown";
}

IntermediateTarget intermediate_target(const GlobalPath& path, const Pose2D& robot, double window,
                                       GoalMode final_mode, double progress_hint, const VisGraph* los) {
  constexpr double kLosStep = 0.05;
  const auto& w = path.waypoints;
  if (w.empty()) throw std::invalid_argument("intermediate_target: empty path");
  if (w.size() == 1) return {{w.front(), final_mode}, 0.0};

  std::vector<double> s(w.size(), 0.0);
  for (std::size_t i = 1; i < w.size(); ++i) s[i] = s[i - 1] + distance(w[i - 1].position(), w[i].position());

  const Vec2 r = robot.position();
  const double hint = std::clamp(progress_hint, 0.0, s.back());
  const double lookahead = hint + 2.0 * window;

  // Nearest path point at or after the hint.
  std::size_t seg = 0;
  double seg_t = 0.0;
  double best = kInfinity;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    if (s[i + 1] < hint) continue;
    if (s[i] > lookahead) break;
    const Vec2 a = w[i].position(), b = w[i + 1].position();
    const double len = s[i + 1] - s[i];
    double t = project_onto_segment(r, a, b);
    if (len > 0.0) t = std::max(t, (hint - s[i]) / len);
    t = std::clamp(t, 0.0, 1.0);
    const double d = distance(r, a + (b - a) * t);
    if (d < best - 1e-12) {
      best = d;
      seg = i;
      seg_t = t;
    }
  }

  auto inside = [&](Vec2 p) { return std::abs(p.x - r.x) <= window && std::abs(p.y - r.y) <= window; };
  auto seg_dir = [&](std::size_t i) { return (w[i + 1].position() - w[i].position()).angle(); };
  const Vec2 nearest = w[seg].position() + (w[seg + 1].position() - w[seg].position()) * seg_t;
  const double progress = s[seg] + (s[seg + 1] - s[seg]) * seg_t;

  if (!inside(nearest)) {
    if (seg + 2 == w.size() && seg_t >= 1.0) return {{w.back(), final_mode}, progress};
    return {{Pose2D(nearest, seg_dir(seg)), GoalMode::pass_through}, progress};
  }

  auto clear = [&](Vec2 p) { return los == nullptr || los->visible(r, p); };
  Vec2 a = nearest;
  Vec2 last = nearest;
  std::size_t last_seg = seg;
  for (std::size_t i = seg; i + 1 < w.size(); ++i) {
    const Vec2 b = w[i + 1].position();
    const Vec2 d = b - a;
    const bool exits = !inside(b);
    double u = 1.0;
    if (exits) {
      // Last parameter u in [0, 1] for which a + u (b - a) stays in the window.
      if (d.x > 0) u = std::min(u, (r.x + window - a.x) / d.x);
      if (d.x < 0) u = std::min(u, (r.x - window - a.x) / d.x);
      if (d.y > 0) u = std::min(u, (r.y + window - a.y) / d.y);
      if (d.y < 0) u = std::min(u, (r.y - window - a.y) / d.y);
      u = std::clamp(u, 0.0, 1.0);
    }
    if (los != nullptr) {
      const int n = std::max(1, static_cast<int>(std::ceil(d.norm() * u / kLosStep)));
      for (int k = 1; k <= n; ++k) {
        const Vec2 p = a + d * (u * k / n);
        if (!clear(p)) {
          double heading = seg_dir(last_seg);
          if (k == 1 && i > seg) {
            // Stopped on a corner: aim along its bisector.
            heading += 0.5 * angle_diff(seg_dir(i), seg_dir(last_seg));
          }
          return {{Pose2D(last, heading), GoalMode::pass_through}, progress};
        }
        last = p;
        last_seg = i;
      }
    }
    if (exits) return {{Pose2D(a + d * u, seg_dir(i)), GoalMode::pass_through}, progress};
    a = b;
  }
  return {{w.back(), final_mode}, progress};
}

double proximity_penalty_scale(double t_h) { return std::max(0.1, std::min(t_h / 3.0, 1.0)); }

namespace {

// Minimum time to cover `dist` from initial speed v0 >= 0 with bounded
// acceleration and speed, optionally ending at rest.
double translation_time(double dist, double v0, bool stop, const KinematicLimits& lim) {
  const double a = lim.a_max, vm = lim.v_max;
  v0 = std::clamp(v0, 0.0, vm);
  if (!stop) {
    const double d_acc = (vm * vm - v0 * v0) / (2 * a);
    if (dist <= d_acc) return (-v0 + std::sqrt(v0 * v0 + 2 * a * dist)) / a;
    return (vm - v0) / a + (dist - d_acc) / vm;
  }
  const double d_stop = v0 * v0 / (2 * a);
  if (d_stop > dist) {
    // Overshoot, stop, then come back from rest.
    return v0 / a + translation_time(d_stop - dist, 0.0, true, lim);
  }
  const double vp2 = (2 * a * dist + v0 * v0) / 2;
  if (vp2 <= vm * vm) {
    const double vp = std::sqrt(vp2);
    return (vp - v0) / a + vp / a;
  }
  const double d_ramp = (vm * vm - v0 * v0) / (2 * a) + vm * vm / (2 * a);
  return (vm - v0) / a + vm / a + (dist - d_ramp) / vm;
}

}  // namespace

double time_to_goal(const RobotState& state, const GoalSpec& goal, const ControllerConfig& cfg) {
  const auto& lim = cfg.limits;
  const bool stop = goal.mode == GoalMode::stop_at;
  const Vec2 d = goal.pose.position() - state.pose.position();
  const double dist = d.norm();
  const double v = state.twist.v;

  if (dist <= cfg.goal_pos_tol) {
    if (!stop) return 0.0;
    return std::abs(angle_diff(goal.pose.theta(), state.pose.theta())) / lim.omega_max +
           std::abs(v) / lim.a_max;
  }

  auto estimate = [&](double facing, double speed_along, double scale) {
    const double err = angle_diff(facing, state.pose.theta());
    double t = std::abs(err) / lim.omega_max;
    double v0 = speed_along * std::cos(err);
    double extra = 0.0;
    if (v0 < 0.0) {
      // Moving away: brake first, then cover the extra distance.
      t += -v0 / lim.a_max;
      extra = v0 * v0 / (2 * lim.a_max);
      v0 = 0.0;
    }
    t += scale * translation_time(dist + extra, v0, stop, lim);
    if (stop) t += std::abs(angle_diff(goal.pose.theta(), facing)) / lim.omega_max;
    return t;
  };

  const double bearing = d.angle();
  double best = estimate(bearing, v, 1.0);
  if (stop) best = std::min(best, estimate(bearing + kPi, -v, cfg.reverse_penalty));
  return best;
}

double node_cost(const SearchNode& node, const GoalSpec& goal, const ControllerConfig& cfg,
                 bool collided) {
  if (collided) return kInfinity;
  return node.accrued_cost + time_to_goal(node.state, goal, cfg);
}

LocalController::LocalController(ControllerConfig cfg, WallClock clock)
    : cfg_(cfg), clock_(std::move(clock)) {
  cfg_.validate();
  if (!clock_) clock_ = [] { return std::chrono::steady_clock::now(); };
  // Sized up front so that no single expansion pays for a rehash.
  seen_.reserve(1 << 17);
}

bool LocalController::satisfies_goal(const RobotState& s, const GoalSpec& goal) const {
  if (distance(s.pose.position(), goal.pose.position()) > cfg_.goal_pos_tol) return false;
  if (std::abs(angle_diff(s.pose.theta(), goal.pose.theta())) >= cfg_.goal_heading_tol) return false;
  return goal.mode == GoalMode::pass_through || std::abs(s.twist.v) < cfg_.stop_speed;
}

bool LocalController::can_stop(RobotState s, const ProximityGrid& grid, double step) const {
  const double dv = cfg_.limits.a_max * step;
  const double dw = cfg_.limits.alpha_max * step;
  while (s.twist.v != 0.0 || s.twist.omega != 0.0) {
    const Twist cmd{s.twist.v - std::copysign(std::min(std::abs(s.twist.v), dv), s.twist.v),
                    s.twist.omega - std::copysign(std::min(std::abs(s.twist.omega), dw), s.twist.omega)};
    s = kinematic_step(s, cmd, step, cfg_.limits);
    if (grid.occupied_at(s.pose.position())) return false;
  }
  return true;
}

std::uint64_t LocalController::state_key(const RobotState& s) const {
  auto q = [](double value, double step) {
    return static_cast<std::uint64_t>(static_cast<std::int64_t>(std::floor(value / step)) & 0xFFFF);
  };
  const double dv = cfg_.limits.a_max * cfg_.primitive_duration * 0.5;
  const double dw = cfg_.limits.alpha_max * cfg_.primitive_duration * 0.5;
  return q(s.pose.x(), 0.05) | (q(s.pose.y(), 0.05) << 16) | (q(s.pose.theta(), kPi / 36) << 32) |
         (q(s.twist.v, dv) << 44) | (q(s.twist.omega, dw) << 54);
}

SearchResult LocalController::search(const RobotState& robot, const GoalSpec& goal,
                                      const ProximityGrid& grid) {
  const auto t_start = clock_();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(clock_() - t_start).count();
  };

  SearchResult result;
  const double h_root = time_to_goal(robot, goal, cfg_);
  const double k = cfg_.proximity_scaling ? proximity_penalty_scale(h_root) : 1.0;
  result.k = k;

  if (satisfies_goal(robot, goal)) {
    result.outcome = SearchOutcome::at_goal;
    result.command = goal.mode == GoalMode::stop_at ? Twist{} : robot.twist;
    result.wall_ms = elapsed_ms();
    return result;
  }

  nodes_.clear();
  seen_.clear();
  SearchNode root;
  root.state = robot;
  root.state.time = 0.0;
  nodes_.push_back(root);

  struct Entry {
    double f;
    int depth;
    int index;
    bool operator>(const Entry& o) const {
      if (f != o.f) return f > o.f;
      if (depth != o.depth) return depth < o.depth;
      return index > o.index;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  open.push({h_root, 0, 0});

  const int substeps = cfg_.substeps();
  const double sub_dt = cfg_.primitive_duration / substeps;
  const double accels[3] = {-cfg_.limits.a_max, 0.0, cfg_.limits.a_max};
  const double alphas[3] = {-cfg_.limits.alpha_max, 0.0, cfg_.limits.alpha_max};
  const Vec2 goal_pos = goal.pose.position();

  int chosen = -1;
  int best_generated = -1;
  double best_generated_f = kInfinity;
  bool any_depth_one = false;

  while (!open.empty()) {
    if (result.expansions > 0) {
      const bool out_of_budget = cfg_.deterministic ? result.expansions >= cfg_.max_expansions
                                                    : elapsed_ms() >= cfg_.budget_ms;
      if (out_of_budget) {
        result.outcome = SearchOutcome::budget_expired;
        chosen = open.top().index;
        break;
      }
    }
    const Entry top = open.top();
    open.pop();
    if (top.depth >= cfg_.horizon) {
      result.outcome = SearchOutcome::horizon_complete;
      chosen = top.index;
      break;
    }
    ++result.expansions;
    const SearchNode parent = nodes_[top.index];

    for (double a : accels) {
      for (double alpha : alphas) {
        SearchNode child;
        child.parent = top.index;
        child.depth = parent.depth + 1;
        child.proximity = parent.proximity;
        RobotState s = parent.state;
        bool collided = false;
        bool terminal = false;
        bool edge_pass = false;
        for (int i = 0; i < substeps; ++i) {
          const Twist cmd{s.twist.v + a * sub_dt, s.twist.omega + alpha * sub_dt};
          const RobotState next = kinematic_step(s, cmd, sub_dt, cfg_.limits);
          if (grid.occupied_at(next.pose.position())) {
            collided = true;
            break;
          }
          if (i == 0 && parent.depth == 0) child.first_action = next.twist;
          child.proximity += grid.proximity_cost(next.pose.position()) * sub_dt;
          if (satisfies_goal(next, goal)) {
            terminal = true;
          } else if (goal.mode == GoalMode::pass_through) {
            const Vec2 p0 = s.pose.position(), p1 = next.pose.position();
            const double t = project_onto_segment(goal_pos, p0, p1);
            if (distance(goal_pos, p0 + (p1 - p0) * t) <= cfg_.goal_pos_tol) {
              const double th = s.pose.theta() + t * angle_diff(next.pose.theta(), s.pose.theta());
              if (std::abs(angle_diff(th, goal.pose.theta())) < cfg_.goal_heading_tol) {
                terminal = true;
                edge_pass = true;
              }
            }
          }
          s = next;
          if (terminal) break;
        }
        // A first primitive must leave room to brake to a standstill.
        if (!collided && parent.depth == 0) collided = !can_stop(s, grid, sub_dt);
        if (collided) continue;
        if (parent.depth > 0) child.first_action = parent.first_action;
        child.state = s;
        child.elapsed = child.depth * cfg_.primitive_duration;
        child.accrued_cost = child.elapsed + cfg_.w_prox * k * child.proximity;
        if (child.depth == 1) any_depth_one = true;

        const int index = static_cast<int>(nodes_.size());
        nodes_.push_back(child);
        if (terminal) {
          result.outcome = edge_pass ? SearchOutcome::edge_pass : SearchOutcome::goal_reached;
          chosen = index;
          break;
        }
        const double f = node_cost(child, goal, cfg_);
        if (f < best_generated_f) {
          best_generated_f = f;
          best_generated = index;
        }
        const std::uint64_t key = state_key(s);
        auto [it, inserted] = seen_.try_emplace(key, f);
        if (!inserted) {
          if (it->second <= f) continue;
          it->second = f;
        }
        open.push({f, child.depth, index});
      }
      if (chosen >= 0) break;
    }
    if (chosen >= 0) break;
    if (!any_depth_one) break;
  }

  if (!any_depth_one && chosen < 0) {
    // Every first primitive collides: brake as hard as allowed.
    const double dv = std::min(std::abs(robot.twist.v), cfg_.limits.a_max * cfg_.dt);
    const double dw = std::min(std::abs(robot.twist.omega), cfg_.limits.alpha_max * cfg_.dt);
    result.command = {robot.twist.v - std::copysign(dv, robot.twist.v),
                      robot.twist.omega - std::copysign(dw, robot.twist.omega)};
    result.outcome = SearchOutcome::emergency_stop;
    result.wall_ms = elapsed_ms();
    return result;
  }
  if (chosen < 0) {
    result.outcome = SearchOutcome::exhausted;
    chosen = best_generated;
  }
  result.command = nodes_[chosen].first_action;
  result.wall_ms = elapsed_ms();
  return result;
}

}  // namespace motm
