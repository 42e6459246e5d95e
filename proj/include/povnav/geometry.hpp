#pragma once
// Image frames and pinhole ground geometry.
//
// Raster indices are (row, col), row 0 at the top.  Frame B is anchored at
// p^s, the bottom-center pixel: x = h-1-row grows upward, y = col - floor(w/2)
// grows with column index.  A point left of the robot in the world projects to
// a smaller column, hence negative y.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace povnav {

inline constexpr double kPi = std::numbers::pi;

// Wrap into (-pi, pi].
inline double normalize_angle(double a) {
  double r = std::remainder(a, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

struct RasterIndex {
  int row = 0;
  int col = 0;
  friend bool operator==(const RasterIndex&, const RasterIndex&) = default;
};

struct FrameBPoint {
  int x = 0;  // up from the bottom row
  int y = 0;  // signed column offset from the center column
  friend bool operator==(const FrameBPoint&, const FrameBPoint&) = default;
};

namespace detail {
inline void check_dims(int w, int h) {
  if (w <= 0 || h <= 0)
    throw std::invalid_argument("image dims must be positive, got " +
                                std::to_string(w) + "x" + std::to_string(h));
}
}  // namespace detail

inline FrameBPoint raster_to_frameb(RasterIndex idx, int w, int h) {
  detail::check_dims(w, h);
  if (idx.row < 0 || idx.row >= h || idx.col < 0 || idx.col >= w)
    throw std::out_of_range("raster index (" + std::to_string(idx.row) + "," +
                            std::to_string(idx.col) + ") outside " +
                            std::to_string(w) + "x" + std::to_string(h));
  return {h - 1 - idx.row, idx.col - w / 2};
}

inline RasterIndex frameb_to_raster(FrameBPoint p, int w, int h) {
  detail::check_dims(w, h);
  const int row = h - 1 - p.x;
  const int col = p.y + w / 2;
  if (row < 0 || row >= h || col < 0 || col >= w)
    throw std::out_of_range("frame-B point (" + std::to_string(p.x) + "," +
                            std::to_string(p.y) + ") outside " +
                            std::to_string(w) + "x" + std::to_string(h));
  return {row, col};
}

// Forward-pitched pinhole camera rigidly mounted above the ground plane.
// pitch > 0 tilts the optical axis down.
struct CameraModel {
  int width = 320;
  int height = 240;
  double fx = 160.0;
  double fy = 160.0;
  double cx = 159.5;
  double cy = 119.5;
  double mount_height = 0.5;  // meters above ground
  double pitch = 0.66;        // radians, down-positive

  void validate() const {
    detail::check_dims(width, height);
    if (fx <= 0 || fy <= 0)
      throw std::invalid_argument("focal lengths must be positive");
    if (mount_height <= 0)
      throw std::invalid_argument("camera mount_height must be positive");
    if (pitch < 0 || pitch >= kPi / 2)
      throw std::invalid_argument("camera pitch must lie in [0, pi/2)");
  }
};

// Planar ground distance seen by the center pixel of `row`, or nullopt when
// the row images at or above the horizon.
inline std::optional<double> ground_depth_at_row(const CameraModel& cam, int row) {
  if (row < 0 || row >= cam.height)
    throw std::out_of_range("row " + std::to_string(row) + " outside height " +
                            std::to_string(cam.height));
  const double t = (row - cam.cy) / cam.fy;
  const double sp = std::sin(cam.pitch);
  const double cp = std::cos(cam.pitch);
  const double denom = sp + t * cp;
  if (denom <= 1e-12) return std::nullopt;
  return cam.mount_height * (cp - t * sp) / denom;
}

// First raster row strictly below the ground horizon (0 when every row sees
// ground, `height` when none does).
inline int first_ground_row(const CameraModel& cam) {
  for (int r = 0; r < cam.height; ++r)
    if (ground_depth_at_row(cam, r)) return r;
  return cam.height;
}

// Pixel width of a `robot_width`-wide segment lying on the ground at the
// depth of `row`.
inline int footprint_pixel_width(const CameraModel& cam, int row, double robot_width) {
  if (robot_width < 0)
    throw std::invalid_argument("robot_width must be non-negative");
  const auto z = ground_depth_at_row(cam, row);
  if (!z)
    throw std::domain_error("row " + std::to_string(row) +
                            " is at or above the ground horizon");
  if (robot_width == 0) return 0;
  return static_cast<int>(std::ceil(cam.fx * robot_width / *z));
}

struct RobotPose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // radians, CCW from +x
};

struct GoalSpec {
  double x = 0.0;
  double y = 0.0;
  double reach_radius = 0.5;
};

// Bearing of the goal in the robot frame, (-pi, pi]; 0 if coincident.
inline double goal_bearing(const RobotPose& pose, const GoalSpec& goal) {
  const double dx = goal.x - pose.x;
  const double dy = goal.y - pose.y;
  if (dx == 0.0 && dy == 0.0) return 0.0;
  return normalize_angle(std::atan2(dy, dx) - pose.theta);
}

// Unnormalized ray direction of a pixel, in the robot frame (x forward,
// y left, z up).  Fractional row/col accepted.
struct RayDir {
  double x, y, z;
};

inline RayDir pixel_ray(const CameraModel& cam, double row, double col) {
  const double xi = (col - cam.cx) / cam.fx;
  const double yi = (row - cam.cy) / cam.fy;
  const double sp = std::sin(cam.pitch);
  const double cp = std::cos(cam.pitch);
  return {cp - yi * sp, -xi, -sp - yi * cp};
}

// Project a ground-plane point given in the robot frame (X forward, Y left)
// onto the image; nullopt if behind the camera or outside the frame.
inline std::optional<RasterIndex> project_ground_point(const CameraModel& cam,
                                                       double X, double Y) {
  const double sp = std::sin(cam.pitch);
  const double cp = std::cos(cam.pitch);
  const double zc = X * cp + cam.mount_height * sp;
  if (zc <= 1e-9) return std::nullopt;
  const double xc = -Y;
  const double yc = -X * sp + cam.mount_height * cp;
  const int col = static_cast<int>(std::lround(cam.cx + cam.fx * xc / zc));
  const int row = static_cast<int>(std::lround(cam.cy + cam.fy * yc / zc));
  if (row < 0 || row >= cam.height || col < 0 || col >= cam.width)
    return std::nullopt;
  return RasterIndex{row, col};
}

}  // namespace povnav
