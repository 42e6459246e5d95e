#pragma once
// Deterministic synthetic world: jittered obstacle grids (Env1..Env5),
// multi-class ground tiles, unicycle kinematics, and an analytic per-pixel
// ray-cast renderer emitting segmentation labels + planar-range depth.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "povnav/control.hpp"
#include "povnav/geometry.hpp"
#include "povnav/navigability.hpp"

namespace povnav {

struct Bounds {
  double xmin = 0, ymin = 0, xmax = 16, ymax = 16;
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double diagonal() const { return std::hypot(width(), height()); }
  bool contains(double x, double y, double pad = 0.0) const {
    return x >= xmin + pad && x <= xmax - pad && y >= ymin + pad && y <= ymax - pad;
  }
};

struct GroundTile {
  std::vector<std::array<double, 2>> polygon;  // CCW or CW, closed implicitly
  int class_id = 0;
  // cached bbox
  double bx0 = 0, by0 = 0, bx1 = 0, by1 = 0;

  void cache_bbox() {
    bx0 = by0 = std::numeric_limits<double>::infinity();
    bx1 = by1 = -std::numeric_limits<double>::infinity();
    for (const auto& p : polygon) {
      bx0 = std::min(bx0, p[0]);
      by0 = std::min(by0, p[1]);
      bx1 = std::max(bx1, p[0]);
      by1 = std::max(by1, p[1]);
    }
  }

  bool contains(double x, double y) const {
    if (x < bx0 || x > bx1 || y < by0 || y > by1) return false;
    bool in = false;
    const size_t n = polygon.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
      const double yi = polygon[i][1], yj = polygon[j][1];
      const double xi = polygon[i][0], xj = polygon[j][0];
      if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi)
        in = !in;
    }
    return in;
  }
};

struct Obstacle {
  enum class Shape { circle, box };
  Shape shape = Shape::circle;
  double x = 0, y = 0;
  double yaw = 0;               // box orientation
  double radius = 0.25;         // circle
  double hx = 0.5, hy = 0.5;    // box half extents
  int class_id = 1;
  double height = 1.6;
};

struct WorldModel {
  Bounds bounds;
  std::vector<GroundTile> tiles;  // first containing tile wins
  std::vector<Obstacle> obstacles;
  int default_ground_class = 0;
  int sky_class = 2;

  int ground_class_at(double x, double y) const {
    for (const auto& t : tiles)
      if (t.contains(x, y)) return t.class_id;
    return default_ground_class;
  }
};

struct EnvSpec {
  int level = 3;  // 1..5
  uint32_t seed = 1;
  double jitter = 0.15;        // uniform +- meters per axis
  double arena = 16.0;         // square side
  double border_margin = 1.2;  // obstacle-free strip inside the bounds
  double obstacle_radius = 0.25;
  double obstacle_height = 1.6;
  int obstacle_class = 1;

  // 3.0 m (level 1) down to 1.0 m (level 5), linear.
  double spacing() const { return 3.0 - 0.5 * (level - 1); }

  void validate() const {
    if (level < 1 || level > 5)
      throw std::invalid_argument("env level must be in [1,5]");
    if (arena <= 2 * border_margin)
      throw std::invalid_argument("arena too small for border margin");
  }
};

inline WorldModel make_env(const EnvSpec& spec) {
  spec.validate();
  WorldModel w;
  w.bounds = {0, 0, spec.arena, spec.arena};
  std::mt19937 rng(spec.seed);
  std::uniform_real_distribution<double> jit(-spec.jitter, spec.jitter);
  const double s = spec.spacing();
  const double lo = spec.border_margin;
  const double hi = spec.arena - spec.border_margin;
  for (double gx = lo; gx <= hi + 1e-9; gx += s)
    for (double gy = lo; gy <= hi + 1e-9; gy += s) {
      Obstacle ob;
      ob.shape = Obstacle::Shape::circle;
      ob.x = std::clamp(gx + jit(rng), lo, hi);
      ob.y = std::clamp(gy + jit(rng), lo, hi);
      ob.radius = spec.obstacle_radius;
      ob.height = spec.obstacle_height;
      ob.class_id = spec.obstacle_class;
      w.obstacles.push_back(ob);
    }
  return w;
}

struct DepthImage {
  Grid<float> range;  // planar meters; +inf = no return
  float max_range = 4.0f;
  int w() const { return range.w; }
  int h() const { return range.h; }
};

struct RenderOutput {
  SegmentedImage seg;
  DepthImage depth;
};

// Per-camera ray tables are pose-independent; build once, render many.
class Renderer {
 public:
  Renderer(const CameraModel& cam, double depth_max_range)
      : cam_(cam), max_range_(depth_max_range) {
    cam.validate();
    const int w = cam.width, h = cam.height;
    ux_.resize(size_t(w) * h);
    uy_.resize(size_t(w) * h);
    mu_.resize(size_t(w) * h);
    az_.resize(size_t(w) * h);
    rground_.resize(size_t(w) * h);
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        const RayDir d = pixel_ray(cam, r, c);
        const double n = std::hypot(d.x, d.y);
        const size_t i = size_t(r) * w + c;
        ux_[i] = d.x / n;
        uy_[i] = d.y / n;
        mu_[i] = d.z / n;  // climb per unit planar distance
        az_[i] = std::atan2(d.y, d.x);
        rground_[i] = mu_[i] < -1e-12
                          ? -cam.mount_height / mu_[i]
                          : std::numeric_limits<double>::infinity();
      }
  }

  const CameraModel& camera() const { return cam_; }
  double max_range() const { return max_range_; }

  RenderOutput render(const WorldModel& world, const RobotPose& pose) const {
    const int w = cam_.width, h = cam_.height;
    RenderOutput out{SegmentedImage{Grid<uint8_t>(w, h, 0)},
                     DepthImage{Grid<float>(w, h, 0.0f),
                                float(max_range_)}};

    // Obstacles in the robot frame, plus an azimuth-bucket index.
    struct LocalOb {
      double x, y, yaw, radius, hx, hy, height;
      Obstacle::Shape shape;
      int class_id;
    };
    std::vector<LocalOb> obs;
    obs.reserve(world.obstacles.size());
    const double ct = std::cos(pose.theta), st = std::sin(pose.theta);
    constexpr int kBuckets = 256;
    std::vector<std::vector<int>> bucket(kBuckets);
    const auto bucket_of = [](double a) {
      int b = int((a + kPi) / (2 * kPi) * kBuckets);
      return std::clamp(b, 0, kBuckets - 1);
    };
    for (const auto& ob : world.obstacles) {
      const double dx = ob.x - pose.x, dy = ob.y - pose.y;
      LocalOb lo;
      lo.x = ct * dx + st * dy;
      lo.y = -st * dx + ct * dy;
      lo.yaw = ob.yaw - pose.theta;
      lo.radius = ob.radius;
      lo.hx = ob.hx;
      lo.hy = ob.hy;
      lo.height = ob.height;
      lo.shape = ob.shape;
      lo.class_id = ob.class_id;
      const double reach = lo.shape == Obstacle::Shape::circle
                               ? lo.radius
                               : std::hypot(lo.hx, lo.hy);
      const double D = std::hypot(lo.x, lo.y);
      if (D - reach > 80.0) continue;  // far beyond any rendered ground
      const int idx = int(obs.size());
      obs.push_back(lo);
      if (D <= reach + 1e-9) {
        for (auto& b : bucket) b.push_back(idx);
        continue;
      }
      const double beta = std::atan2(lo.y, lo.x);
      const double half =
          std::asin(std::clamp(reach / D, 0.0, 1.0)) + 2.0 / kBuckets * kPi;
      const int b0 = bucket_of(normalize_angle(beta - half));
      const int b1 = bucket_of(normalize_angle(beta + half));
      if (b0 <= b1 && (half < kPi / 2)) {
        for (int b = b0; b <= b1; ++b) bucket[b].push_back(idx);
      } else {  // wraps
        for (int b = b0; b < kBuckets; ++b) bucket[b].push_back(idx);
        for (int b = 0; b <= b1; ++b) bucket[b].push_back(idx);
      }
    }

    const double H = cam_.mount_height;
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        const size_t i = size_t(r) * w + c;
        const double ux = ux_[i], uy = uy_[i], mu = mu_[i];
        double r_hit = std::numeric_limits<double>::infinity();
        int cls = -1;
        for (int oi : bucket[bucket_of(az_[i])]) {
          const auto& ob = obs[oi];
          double rin, rout;
          if (ob.shape == Obstacle::Shape::circle) {
            const double proj = ob.x * ux + ob.y * uy;
            const double d2 =
                ob.x * ob.x + ob.y * ob.y - proj * proj;
            const double rr = ob.radius * ob.radius;
            if (d2 > rr) continue;
            const double side = std::sqrt(rr - d2);
            rin = proj - side;
            rout = proj + side;
          } else {
            // slab test in the box frame
            const double cy2 = std::cos(ob.yaw), sy2 = std::sin(ob.yaw);
            const double ox = cy2 * (0 - ob.x) + sy2 * (0 - ob.y);
            const double oy = -sy2 * (0 - ob.x) + cy2 * (0 - ob.y);
            const double dx2 = cy2 * ux + sy2 * uy;
            const double dy2 = -sy2 * ux + cy2 * uy;
            rin = -std::numeric_limits<double>::infinity();
            rout = std::numeric_limits<double>::infinity();
            bool miss = false;
            const double o[2] = {ox, oy}, d[2] = {dx2, dy2},
                         e[2] = {ob.hx, ob.hy};
            for (int k = 0; k < 2 && !miss; ++k) {
              if (std::fabs(d[k]) < 1e-12) {
                if (std::fabs(o[k]) > e[k]) miss = true;
              } else {
                double t0 = (-e[k] - o[k]) / d[k];
                double t1 = (e[k] - o[k]) / d[k];
                if (t0 > t1) std::swap(t0, t1);
                rin = std::max(rin, t0);
                rout = std::min(rout, t1);
              }
            }
            if (miss || rin > rout) continue;
          }
          if (rout <= 0) continue;
          rin = std::max(rin, 0.0);
          const double z_in = H + rin * mu;
          double cand = -1;
          if (z_in >= 0 && z_in <= ob.height) {
            cand = rin;
          } else if (z_in > ob.height && mu < -1e-12) {
            const double r_top = (ob.height - H) / mu;
            if (r_top >= rin && r_top <= rout) cand = r_top;
          }
          if (cand >= 0 && cand < r_hit) {
            r_hit = cand;
            cls = ob.class_id;
          }
        }
        const double rg = rground_[i];
        double r_final;
        if (rg < r_hit) {
          r_final = rg;
          const double px = pose.x + (ct * ux - st * uy) * rg;
          const double py = pose.y + (st * ux + ct * uy) * rg;
          cls = world.ground_class_at(px, py);
        } else if (cls >= 0) {
          r_final = r_hit;
        } else {
          out.seg.labels(r, c) = uint8_t(world.sky_class);
          out.depth.range(r, c) = std::numeric_limits<float>::infinity();
          continue;
        }
        out.seg.labels(r, c) = uint8_t(cls);
        out.depth.range(r, c) = r_final <= max_range_
                                    ? float(r_final)
                                    : std::numeric_limits<float>::infinity();
      }
    return out;
  }

 private:
  CameraModel cam_;
  double max_range_;
  std::vector<double> ux_, uy_, mu_, az_, rground_;
};

inline RenderOutput render(const WorldModel& world, const RobotPose& pose,
                           const CameraModel& cam, double depth_max_range = 4.0) {
  return Renderer(cam, depth_max_range).render(world, pose);
}

// Exact unicycle step under constant (v, w).
inline RobotPose step(const RobotPose& pose, const ControlCommand& cmd,
                      double dt) {
  if (dt <= 0) throw std::invalid_argument("dt must be positive");
  RobotPose out = pose;
  if (std::fabs(cmd.w) < 1e-12) {
    out.x += cmd.v * dt * std::cos(pose.theta);
    out.y += cmd.v * dt * std::sin(pose.theta);
  } else {
    const double R = cmd.v / cmd.w;
    out.x += R * (std::sin(pose.theta + cmd.w * dt) - std::sin(pose.theta));
    out.y += R * (-std::cos(pose.theta + cmd.w * dt) + std::cos(pose.theta));
  }
  out.theta = normalize_angle(pose.theta + cmd.w * dt);
  return out;
}

// Robot disc vs obstacle footprints and arena bounds; contact is inclusive.
inline bool collision(const WorldModel& world, const RobotPose& pose,
                      double robot_radius) {
  if (!world.bounds.contains(pose.x, pose.y, robot_radius)) return true;
  for (const auto& ob : world.obstacles) {
    if (ob.shape == Obstacle::Shape::circle) {
      if (std::hypot(pose.x - ob.x, pose.y - ob.y) <= ob.radius + robot_radius)
        return true;
    } else {
      const double cy = std::cos(ob.yaw), sy = std::sin(ob.yaw);
      const double dx = pose.x - ob.x, dy = pose.y - ob.y;
      const double lx = cy * dx + sy * dy;
      const double ly = -sy * dx + cy * dy;
      const double qx = std::clamp(lx, -ob.hx, ob.hx);
      const double qy = std::clamp(ly, -ob.hy, ob.hy);
      if (std::hypot(lx - qx, ly - qy) <= robot_radius) return true;
    }
  }
  return false;
}

// Per-pixel label flip with probability p, drawing replacements uniformly
// from the class map.  Deterministic in (seed).
inline void apply_label_noise(SegmentedImage& seg, const ClassMap& omega,
                              double p, uint32_t seed) {
  if (p <= 0) return;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<size_t> pick(0, omega.entries.size() - 1);
  for (auto& v : seg.labels.data) {
    if (coin(rng) < p) v = uint8_t(omega.entries[pick(rng)].id);
  }
}

}  // namespace povnav
