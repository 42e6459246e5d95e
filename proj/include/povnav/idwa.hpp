#pragma once
// Image-projected Dynamic Window Approach baseline.  Shares the navigability
// image with the main planner and uses rendered depth to place candidate
// arcs in the image; obstacles beyond the depth range or outside the field
// of view are invisible to it by construction.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "povnav/control.hpp"
#include "povnav/geometry.hpp"
#include "povnav/navigability.hpp"
#include "povnav/sim.hpp"

namespace povnav {

struct DwaConfig {
  int v_samples = 15;
  int w_samples = 41;
  double accel_v = 1.0;   // m/s^2
  double accel_w = 2.5;   // rad/s^2
  double horizon = 2.5;   // rollout seconds
  double dt = 0.05;       // rollout step
  double control_dt = 0.1;
  double v_min = 0.0, v_max = 1.0;
  double w_max = 1.0;
  double w_heading = 0.8, w_clearance = 0.1, w_velocity = 0.1;
  double clearance_max = 3.0;  // clearance saturates here
  double stop_buffer = 0.2;    // meters added to the braking distance
  double depth_tol = 0.15;     // meters; obstacle must be at/into the point

  void validate() const {
    if (v_samples < 2 || w_samples < 2)
      throw std::invalid_argument("window sample counts must be >= 2");
    if (!(horizon > dt && dt > 0))
      throw std::invalid_argument("need horizon > dt > 0");
  }
};

struct CandidateTrajectory {
  double v = 0, w = 0;
  std::vector<RobotPose> arc;          // relative poses over [0, horizon]
  std::vector<RasterIndex> pixels;     // projected trace (visible points)
  double clearance = 0;                // planar meters to the first block
  bool admissible = false;
};

inline std::vector<std::pair<double, double>> dynamic_window(
    double v, double w, const DwaConfig& cfg) {
  cfg.validate();
  const double v_lo = std::max(cfg.v_min, v - cfg.accel_v * cfg.control_dt);
  const double v_hi = std::min(cfg.v_max, v + cfg.accel_v * cfg.control_dt);
  const double w_lo = std::max(-cfg.w_max, w - cfg.accel_w * cfg.control_dt);
  const double w_hi = std::min(cfg.w_max, w + cfg.accel_w * cfg.control_dt);
  std::vector<std::pair<double, double>> out;
  out.reserve(size_t(cfg.v_samples) * cfg.w_samples);
  for (int i = 0; i < cfg.v_samples; ++i) {
    const double vv =
        v_lo + (v_hi - v_lo) * i / double(cfg.v_samples - 1);
    for (int j = 0; j < cfg.w_samples; ++j) {
      const double ww =
          w_lo + (w_hi - w_lo) * j / double(cfg.w_samples - 1);
      out.emplace_back(vv, ww);
    }
  }
  return out;
}

namespace detail {

// Roll the arc forward and return the planar distance to the first blocked
// footprint sample, or +inf if the whole rollout stays clear.  A projected
// point is blocked when its pixel is non-navigable and the depth there
// confirms an obstacle at or in front of the point.
inline double arc_clearance(double v, double w, const NavigabilityImage& nav,
                            const DepthImage& depth, const CameraModel& cam,
                            const DwaConfig& cfg, double robot_width) {
  double x = 0, y = 0, th = 0;
  const int steps = int(std::ceil(cfg.horizon / cfg.dt));
  const double half_w = robot_width / 2.0;
  for (int k = 1; k <= steps; ++k) {
    if (std::fabs(w) < 1e-12) {
      x += v * cfg.dt * std::cos(th);
      y += v * cfg.dt * std::sin(th);
    } else {
      const double R = v / w;
      x += R * (std::sin(th + w * cfg.dt) - std::sin(th));
      y += R * (-std::cos(th + w * cfg.dt) + std::cos(th));
      th += w * cfg.dt;
    }
    const double range = std::hypot(x, y);
    if (range < 1e-6) continue;
    const auto center = project_ground_point(cam, x, y);
    if (!center) continue;  // outside the camera's view: unknown, assume free
    const int span = int(std::ceil(cam.fx * half_w / std::max(range, 0.2)));
    for (int dc = -span; dc <= span; ++dc) {
      const int col = center->col + dc;
      if (col < 0 || col >= nav.w()) continue;
      if (nav.bin.bits(center->row, col) == 0) continue;
      const float d = depth.range(center->row, col);
      if (std::isfinite(d) && d <= range + cfg.depth_tol)
        return range;  // confirmed obstacle at this arc point
    }
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace detail

struct IdwaDecision {
  ControlCommand cmd;
  double best_score = 0;
  int admissible = 0;
  double clearance = 0;
};

// Score every candidate sequentially and return the argmax admissible one.
// Ties go to the smaller |w|, then smaller v.  With no admissible arc the
// command is a stop-and-rotate toward the goal.
inline IdwaDecision evaluate(const std::vector<std::pair<double, double>>& cands,
                             const NavigabilityImage& nav,
                             const DepthImage& depth, const CameraModel& cam,
                             double goal_bearing, const DwaConfig& cfg,
                             double robot_width) {
  if (nav.w() != depth.w() || nav.h() != depth.h())
    throw std::invalid_argument("nav and depth image dimensions differ");
  IdwaDecision out;
  bool found = false;
  double best_score = -std::numeric_limits<double>::infinity();
  double best_abs_w = 0, best_v = 0;
  for (const auto& [v, w] : cands) {
    const double clear =
        detail::arc_clearance(v, w, nav, depth, cam, cfg, robot_width);
    const double brake = v * v / (2.0 * cfg.accel_v) + cfg.stop_buffer;
    if (clear <= brake) continue;  // inadmissible: cannot stop in time
    const double head = normalize_angle(goal_bearing - w * cfg.horizon);
    const double s_head = 1.0 - std::fabs(head) / kPi;
    const double s_clear = std::min(clear, cfg.clearance_max) / cfg.clearance_max;
    const double s_vel = cfg.v_max > 0 ? v / cfg.v_max : 0.0;
    const double score = cfg.w_heading * s_head + cfg.w_clearance * s_clear +
                         cfg.w_velocity * s_vel;
    ++out.admissible;
    const bool better =
        !found || score > best_score ||
        (score == best_score &&
         (std::fabs(w) < best_abs_w ||
          (std::fabs(w) == best_abs_w && v < best_v)));
    if (better) {
      found = true;
      best_score = score;
      best_abs_w = std::fabs(w);
      best_v = v;
      out.cmd.v = v;
      out.cmd.w = w;
      out.cmd.status = DriveStatus::running;
      out.best_score = score;
      out.clearance = std::min(clear, cfg.clearance_max);
    }
  }
  if (!found) {
    out.cmd.v = 0.0;
    out.cmd.w = (goal_bearing >= 0 ? 1.0 : -1.0) * cfg.w_max / 2.0;
    out.cmd.status = DriveStatus::stopped_blocked;
    out.best_score = 0;
    out.clearance = 0;
  }
  return out;
}

// Full candidate record for inspection and tests.
inline CandidateTrajectory make_candidate(double v, double w,
                                          const NavigabilityImage& nav,
                                          const DepthImage& depth,
                                          const CameraModel& cam,
                                          const DwaConfig& cfg,
                                          double robot_width) {
  CandidateTrajectory t;
  t.v = v;
  t.w = w;
  RobotPose p{0, 0, 0};
  const int steps = int(std::ceil(cfg.horizon / cfg.dt));
  for (int k = 0; k <= steps; ++k) {
    t.arc.push_back(p);
    if (auto pix = project_ground_point(cam, p.x, p.y)) t.pixels.push_back(*pix);
    ControlCommand c;
    c.v = v;
    c.w = w;
    p = step(p, c, cfg.dt);
  }
  const double clear =
      detail::arc_clearance(v, w, nav, depth, cam, cfg, robot_width);
  t.clearance = std::min(clear, cfg.clearance_max);
  t.admissible = clear > v * v / (2.0 * cfg.accel_v) + cfg.stop_buffer;
  return t;
}

}  // namespace povnav
