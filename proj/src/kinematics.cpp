#include "motm/kinematics.hpp"

#include <algorithm>
#include <cmath>

namespace motm {

RobotState kinematic_step(const RobotState& state, const Twist& cmd, double dt,
                          const KinematicLimits& limits) {
  const double v_target = std::clamp(cmd.v, -limits.v_max, limits.v_max);
  const double w_target = std::clamp(cmd.omega, -limits.omega_max, limits.omega_max);
  const double dv = std::clamp(v_target - state.twist.v, -limits.a_max * dt, limits.a_max * dt);
  const double dw =
      std::clamp(w_target - state.twist.omega, -limits.alpha_max * dt, limits.alpha_max * dt);
  const double v = std::clamp(state.twist.v + dv, -limits.v_max, limits.v_max);
  const double w = std::clamp(state.twist.omega + dw, -limits.omega_max, limits.omega_max);

  const double th = state.pose.theta();
  double x = state.pose.x();
  double y = state.pose.y();
  if (std::abs(w) < 1e-6) {
    x += v * dt * std::cos(th);
    y += v * dt * std::sin(th);
  } else {
    const double r = v / w;
    const double th1 = th + w * dt;
    x += r * (std::sin(th1) - std::sin(th));
    y -= r * (std::cos(th1) - std::cos(th));
  }

  RobotState next;
  next.pose = Pose2D(x, y, th + w * dt);
  next.twist = {v, w};
  next.time = state.time + dt;
  return next;
}

}  // namespace motm
