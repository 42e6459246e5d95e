#pragma once
// Visual-servo control law: error pair (lambda - lambda0, phi) -> (v, w).

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "povnav/geometry.hpp"

namespace povnav {

struct ServoGains {
  double k_v = 0.02;   // (m/s) per pixel of clearance above lambda_stop
  double k_w = 1.5;    // (rad/s) per radian of path deviation
  double v_max = 1.0;
  double w_max = 1.0;
  double lambda_stop = 60.0;  // pixels; at or below this, no forward motion
  double lambda0 = 150.0;     // pixels; the proximity setpoint

  void validate() const {
    if (k_v <= 0 || k_w <= 0 || v_max <= 0 || w_max <= 0 || lambda_stop <= 0 ||
        lambda0 <= 0)
      throw std::invalid_argument("servo gains must be positive");
    if (lambda_stop >= lambda0)
      throw std::invalid_argument("lambda_stop must be < lambda0");
  }
};

enum class DriveStatus { running, stopped_blocked, goal_reached };

struct ControlCommand {
  double v = 0.0;
  double w = 0.0;
  DriveStatus status = DriveStatus::running;
};

// Proportional law with saturation; forward speed additionally scaled by
// cos(phi) so hard turns happen mostly in place.
inline ControlCommand servo(const std::array<double, 2>& e,
                            const ServoGains& g) {
  const double lambda = e[0] + g.lambda0;
  const double phi = e[1];
  ControlCommand cmd;
  cmd.w = std::clamp(-g.k_w * phi, -g.w_max, g.w_max);
  const double v_raw =
      std::clamp(g.k_v * std::max(0.0, lambda - g.lambda_stop), 0.0, g.v_max);
  cmd.v = v_raw * std::max(0.0, std::cos(phi));
  cmd.status = DriveStatus::running;
  return cmd;
}

// Recovery when the planner reports blocked: rotate in place toward the POG
// side at half the rate limit.
inline ControlCommand servo_blocked(const ServoGains& g, double pog_bearing) {
  ControlCommand cmd;
  cmd.v = 0.0;
  cmd.w = (pog_bearing >= 0 ? 1.0 : -1.0) * g.w_max / 2.0;
  cmd.status = DriveStatus::stopped_blocked;
  return cmd;
}

// Camera-frame to body-frame command transfer.  Identity for the default
// centered mount.  A camera offset d_lateral meters along body +y moves at
// forward speed v_c = v_body - w * d_lateral under body twist (v, w), so the
// body command realizing a camera-frame (v_c, w) is v = v_c + w * d_lateral.
inline ControlCommand camera_to_body(const ControlCommand& cmd,
                                     double d_lateral = 0.0) {
  ControlCommand out = cmd;
  out.v = std::max(0.0, cmd.v + cmd.w * d_lateral);
  return out;
}

inline bool goal_check(const RobotPose& pose, const GoalSpec& goal) {
  const double dx = goal.x - pose.x, dy = goal.y - pose.y;
  return dx * dx + dy * dy <= goal.reach_radius * goal.reach_radius;
}

}  // namespace povnav
