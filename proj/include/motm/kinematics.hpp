#pragma once

#include "motm/geometry.hpp"

namespace motm {

struct KinematicLimits {
  double v_max = 1.0;      // m/s
  double omega_max = 1.5;  // rad/s
  double a_max = 1.0;      // m/s^2
  double alpha_max = 3.0;  // rad/s^2
};

struct RobotState {
  Pose2D pose;
  Twist twist;
  double time = 0.0;

  bool operator==(const RobotState&) const = default;
};

/// Unicycle update. The command is reached subject to the acceleration
/// limits, velocities are clamped, and the pose follows the exact arc driven
/// by the resulting twist over dt.
RobotState kinematic_step(const RobotState& state, const Twist& cmd, double dt,
                          const KinematicLimits& limits = {});

}  // namespace motm
