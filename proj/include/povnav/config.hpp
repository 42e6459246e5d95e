#pragma once
// Experiment configuration: one structured file covering every tunable, with
// in-code defaults.  File values overlay the defaults; CLI key=value
// overrides overlay the file.  Unknown keys warn (stderr) instead of failing.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "povnav/control.hpp"
#include "povnav/geometry.hpp"
#include "povnav/idwa.hpp"
#include "povnav/navigability.hpp"
#include "povnav/sim.hpp"

namespace povnav {

using json = nlohmann::json;

inline ClassMap default_class_map() {
  return ClassMap{{
      {0, true, "ground"},
      {1, false, "obstacle"},
      {2, false, "sky"},
      {3, true, "road"},
      {4, true, "snow"},
  }};
}

struct ExperimentConfig {
  std::string planner = "povnav";  // povnav | idwa
  double dt = 0.1;                 // control period, seconds

  CameraModel cam{};  // defaults in CameraModel
  double camera_lateral_offset = 0.0;

  double robot_width = 0.30;
  double robot_radius = 0.15;
  double safety_margin = 0.05;

  // servo
  double k_v = 0.02, k_w = 1.5, v_max = 1.0, w_max = 1.0;
  // meters; maps to lambda_stop pixels.  Must clear the footprint envelope
  // (radius + margin); 0.3 leaves a 0.1 m brake buffer while keeping sub
  // half-meter gaps traversable, which a 0.4 m floor forbids outright.
  double stop_distance = 0.3;
  double safe_distance = 1.0;  // meters; maps to lambda0 pixels

  // subgoal
  double w1 = 0.5, w2 = 0.5;
  bool normalize_objectives = true;
  // closed loop only: keep the previous sub-goal while its front member stays
  // within this score margin of the per-frame optimum (0 disables)
  double subgoal_hysteresis = 0.05;

  // pathplan
  double lookahead_frac = 0.25;  // of image height
  // 0 = auto: the bottom-row footprint inflation halfwidth plus a pad, so the
  // snap can always step across a single inflated obstacle belt; a fixed
  // radius smaller than the belt reports "blocked" with most of the view free
  int start_snap_radius = 0;

  ClassMap classes = default_class_map();

  EnvSpec env{};
  double depth_max_range = 4.0;
  double label_noise = 0.0;
  uint32_t noise_seed = 99;

  DwaConfig dwa{};

  // episode / experiment
  double goal_radius = 0.5;
  double timeout_factor = 4.0;
  int blocked_limit = 80;  // consecutive blocked frames before giving up
  uint32_t sample_seed = 2024;
  int trials = 20;
  double min_separation_frac = 0.5;  // of the arena diagonal
  // extra clearance when placing start/goal; kept above stop_distance so a
  // trial never begins inside the visual servo's stop range (the sampler
  // relaxes this automatically when an arena is too dense to satisfy it)
  double sample_clearance = 0.45;
  std::vector<int> bench_levels{1, 2, 3, 4, 5};
  std::vector<std::string> bench_planners{"povnav", "idwa"};
  int overlay_every = 0;        // run subcommand: dump overlay every N frames
  bool trace_waypoints = false; // embed path waypoints in per-frame records

  double lookahead_px() const { return lookahead_frac * cam.height; }

  // Pixel distance from p^s at which flat ground reaches `meters` planar
  // range; capped at the farthest ground row.
  double pixels_at_range(double meters) const {
    int last_ground = -1;
    for (int r = cam.height - 1; r >= 0; --r) {
      const auto z = ground_depth_at_row(cam, r);
      if (!z) break;
      last_ground = r;
      if (*z >= meters) return cam.height - 1 - r;
    }
    if (last_ground < 0) return 0.0;
    return cam.height - 1 - last_ground;
  }

  // Start-snap search radius; mirrors the per-row dilation in inflate() at
  // the nearest visible ground row, the widest belt a single obstacle casts.
  int snap_radius_px() const {
    if (start_snap_radius > 0) return start_snap_radius;
    const double W = robot_width + 2.0 * safety_margin;
    for (int r = cam.height - 1; r >= 0; --r)
      if (const auto z = ground_depth_at_row(cam, r)) {
        const int wpx = int(std::ceil(cam.fx * W / *z));
        return (wpx + 1) / 2 + 4;
      }
    return 15;
  }

  ServoGains servo_gains() const {
    ServoGains g;
    g.k_v = k_v;
    g.k_w = k_w;
    g.v_max = v_max;
    g.w_max = w_max;
    g.lambda_stop = pixels_at_range(stop_distance);
    g.lambda0 = pixels_at_range(safe_distance);
    return g;
  }

  void validate() const {
    cam.validate();
    classes.validate();
    env.validate();
    dwa.validate();
    servo_gains().validate();
    if (planner != "povnav" && planner != "idwa")
      throw std::invalid_argument("unknown planner: " + planner);
    if (dt <= 0) throw std::invalid_argument("dt must be positive");
    if (robot_width <= 0 || robot_radius <= 0)
      throw std::invalid_argument("robot dimensions must be positive");
    if (trials < 0) throw std::invalid_argument("trials must be >= 0");
    for (int l : bench_levels)
      if (l < 1 || l > 5)
        throw std::invalid_argument("bench level out of range: " + std::to_string(l));
    for (const auto& p : bench_planners)
      if (p != "povnav" && p != "idwa")
        throw std::invalid_argument("unknown bench planner: " + p);
  }
};

inline void to_json(json& j, const CameraModel& c) {
  j = json{{"width", c.width},   {"height", c.height},
           {"fx", c.fx},         {"fy", c.fy},
           {"cx", c.cx},         {"cy", c.cy},
           {"mount_height", c.mount_height},
           {"pitch", c.pitch}};
}
inline void from_json(const json& j, CameraModel& c) {
  c.width = j.value("width", c.width);
  c.height = j.value("height", c.height);
  c.fx = j.value("fx", c.fx);
  c.fy = j.value("fy", c.fy);
  c.cx = j.value("cx", c.cx);
  c.cy = j.value("cy", c.cy);
  c.mount_height = j.value("mount_height", c.mount_height);
  c.pitch = j.value("pitch", c.pitch);
}

inline void to_json(json& j, const ClassEntry& e) {
  j = json{{"id", e.id}, {"navigable", e.navigable}, {"name", e.name}};
}
inline void from_json(const json& j, ClassEntry& e) {
  e.id = j.at("id").get<int>();
  e.navigable = j.at("navigable").get<bool>();
  e.name = j.value("name", std::string{});
}
inline void to_json(json& j, const ClassMap& m) { j = m.entries; }
inline void from_json(const json& j, ClassMap& m) {
  m.entries = j.get<std::vector<ClassEntry>>();
}

inline void to_json(json& j, const EnvSpec& e) {
  j = json{{"level", e.level},
           {"seed", e.seed},
           {"jitter", e.jitter},
           {"arena", e.arena},
           {"border_margin", e.border_margin},
           {"obstacle_radius", e.obstacle_radius},
           {"obstacle_height", e.obstacle_height},
           {"obstacle_class", e.obstacle_class}};
}
inline void from_json(const json& j, EnvSpec& e) {
  e.level = j.value("level", e.level);
  e.seed = j.value("seed", e.seed);
  e.jitter = j.value("jitter", e.jitter);
  e.arena = j.value("arena", e.arena);
  e.border_margin = j.value("border_margin", e.border_margin);
  e.obstacle_radius = j.value("obstacle_radius", e.obstacle_radius);
  e.obstacle_height = j.value("obstacle_height", e.obstacle_height);
  e.obstacle_class = j.value("obstacle_class", e.obstacle_class);
}

inline void to_json(json& j, const DwaConfig& d) {
  j = json{{"v_samples", d.v_samples},   {"w_samples", d.w_samples},
           {"accel_v", d.accel_v},       {"accel_w", d.accel_w},
           {"horizon", d.horizon},       {"dt", d.dt},
           {"control_dt", d.control_dt}, {"v_min", d.v_min},
           {"v_max", d.v_max},           {"w_max", d.w_max},
           {"w_heading", d.w_heading},   {"w_clearance", d.w_clearance},
           {"w_velocity", d.w_velocity}, {"clearance_max", d.clearance_max},
           {"stop_buffer", d.stop_buffer},
           {"depth_tol", d.depth_tol}};
}
inline void from_json(const json& j, DwaConfig& d) {
  d.v_samples = j.value("v_samples", d.v_samples);
  d.w_samples = j.value("w_samples", d.w_samples);
  d.accel_v = j.value("accel_v", d.accel_v);
  d.accel_w = j.value("accel_w", d.accel_w);
  d.horizon = j.value("horizon", d.horizon);
  d.dt = j.value("dt", d.dt);
  d.control_dt = j.value("control_dt", d.control_dt);
  d.v_min = j.value("v_min", d.v_min);
  d.v_max = j.value("v_max", d.v_max);
  d.w_max = j.value("w_max", d.w_max);
  d.w_heading = j.value("w_heading", d.w_heading);
  d.w_clearance = j.value("w_clearance", d.w_clearance);
  d.w_velocity = j.value("w_velocity", d.w_velocity);
  d.clearance_max = j.value("clearance_max", d.clearance_max);
  d.stop_buffer = j.value("stop_buffer", d.stop_buffer);
  d.depth_tol = j.value("depth_tol", d.depth_tol);
}

inline void to_json(json& j, const ExperimentConfig& c) {
  j = json{{"planner", c.planner},
           {"dt", c.dt},
           {"camera", c.cam},
           {"camera_lateral_offset", c.camera_lateral_offset},
           {"robot_width", c.robot_width},
           {"robot_radius", c.robot_radius},
           {"safety_margin", c.safety_margin},
           {"k_v", c.k_v},
           {"k_w", c.k_w},
           {"v_max", c.v_max},
           {"w_max", c.w_max},
           {"stop_distance", c.stop_distance},
           {"safe_distance", c.safe_distance},
           {"w1", c.w1},
           {"w2", c.w2},
           {"normalize_objectives", c.normalize_objectives},
           {"subgoal_hysteresis", c.subgoal_hysteresis},
           {"lookahead_frac", c.lookahead_frac},
           {"start_snap_radius", c.start_snap_radius},
           {"classes", c.classes},
           {"env", c.env},
           {"depth_max_range", c.depth_max_range},
           {"label_noise", c.label_noise},
           {"noise_seed", c.noise_seed},
           {"dwa", c.dwa},
           {"goal_radius", c.goal_radius},
           {"timeout_factor", c.timeout_factor},
           {"blocked_limit", c.blocked_limit},
           {"sample_seed", c.sample_seed},
           {"trials", c.trials},
           {"min_separation_frac", c.min_separation_frac},
           {"sample_clearance", c.sample_clearance},
           {"bench_levels", c.bench_levels},
           {"bench_planners", c.bench_planners},
           {"overlay_every", c.overlay_every},
           {"trace_waypoints", c.trace_waypoints}};
}
inline void from_json(const json& j, ExperimentConfig& c) {
  c.planner = j.value("planner", c.planner);
  c.dt = j.value("dt", c.dt);
  if (j.contains("camera")) j.at("camera").get_to(c.cam);
  c.camera_lateral_offset =
      j.value("camera_lateral_offset", c.camera_lateral_offset);
  c.robot_width = j.value("robot_width", c.robot_width);
  c.robot_radius = j.value("robot_radius", c.robot_radius);
  c.safety_margin = j.value("safety_margin", c.safety_margin);
  c.k_v = j.value("k_v", c.k_v);
  c.k_w = j.value("k_w", c.k_w);
  c.v_max = j.value("v_max", c.v_max);
  c.w_max = j.value("w_max", c.w_max);
  c.stop_distance = j.value("stop_distance", c.stop_distance);
  c.safe_distance = j.value("safe_distance", c.safe_distance);
  c.w1 = j.value("w1", c.w1);
  c.w2 = j.value("w2", c.w2);
  c.normalize_objectives = j.value("normalize_objectives", c.normalize_objectives);
  c.subgoal_hysteresis = j.value("subgoal_hysteresis", c.subgoal_hysteresis);
  c.lookahead_frac = j.value("lookahead_frac", c.lookahead_frac);
  c.start_snap_radius = j.value("start_snap_radius", c.start_snap_radius);
  if (j.contains("classes")) j.at("classes").get_to(c.classes);
  if (j.contains("env")) j.at("env").get_to(c.env);
  c.depth_max_range = j.value("depth_max_range", c.depth_max_range);
  c.label_noise = j.value("label_noise", c.label_noise);
  c.noise_seed = j.value("noise_seed", c.noise_seed);
  if (j.contains("dwa")) j.at("dwa").get_to(c.dwa);
  c.goal_radius = j.value("goal_radius", c.goal_radius);
  c.timeout_factor = j.value("timeout_factor", c.timeout_factor);
  c.blocked_limit = j.value("blocked_limit", c.blocked_limit);
  c.sample_seed = j.value("sample_seed", c.sample_seed);
  c.trials = j.value("trials", c.trials);
  c.min_separation_frac = j.value("min_separation_frac", c.min_separation_frac);
  c.sample_clearance = j.value("sample_clearance", c.sample_clearance);
  if (j.contains("bench_levels"))
    j.at("bench_levels").get_to(c.bench_levels);
  if (j.contains("bench_planners"))
    j.at("bench_planners").get_to(c.bench_planners);
  c.overlay_every = j.value("overlay_every", c.overlay_every);
  c.trace_waypoints = j.value("trace_waypoints", c.trace_waypoints);
}

namespace detail {
inline void warn_unknown_keys(const json& given, const json& schema,
                              const std::string& prefix) {
  if (!given.is_object() || !schema.is_object()) return;
  for (auto it = given.begin(); it != given.end(); ++it) {
    if (!schema.contains(it.key())) {
      std::cerr << "config: unknown key '" << prefix << it.key()
                << "' ignored\n";
    } else {
      warn_unknown_keys(it.value(), schema.at(it.key()),
                        prefix + it.key() + ".");
    }
  }
}
}  // namespace detail

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config: " + path);
  json j = json::parse(f);
  detail::warn_unknown_keys(j, json(ExperimentConfig{}), "");
  ExperimentConfig cfg;  // defaults
  j.get_to(cfg);
  return cfg;
}

// "dwa.horizon=2.0" style dotted-path override; the value parses as JSON
// when possible, else as a raw string.
inline void apply_override(ExperimentConfig& cfg, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("override must look like key=value: " + kv);
  const std::string key = kv.substr(0, eq);
  const std::string val = kv.substr(eq + 1);
  json j = cfg;
  json* node = &j;
  size_t pos = 0;
  while (true) {
    const auto dot = key.find('.', pos);
    const std::string part = key.substr(pos, dot - pos);
    if (part.empty()) throw std::invalid_argument("bad override key: " + key);
    if (dot == std::string::npos) {
      json parsed;
      try {
        parsed = json::parse(val);
      } catch (const json::parse_error&) {
        parsed = val;
      }
      (*node)[part] = parsed;
      break;
    }
    if (!node->contains(part))
      throw std::invalid_argument("unknown config section: " +
                                  key.substr(0, dot));
    node = &(*node)[part];
    pos = dot + 1;
  }
  detail::warn_unknown_keys(j, json(ExperimentConfig{}), "");
  j.get_to(cfg);
}

// World serialization (envgen output; run --world input).
inline void to_json(json& j, const Bounds& b) {
  j = json{{"xmin", b.xmin}, {"ymin", b.ymin}, {"xmax", b.xmax}, {"ymax", b.ymax}};
}
inline void from_json(const json& j, Bounds& b) {
  b.xmin = j.at("xmin").get<double>();
  b.ymin = j.at("ymin").get<double>();
  b.xmax = j.at("xmax").get<double>();
  b.ymax = j.at("ymax").get<double>();
}
inline void to_json(json& j, const GroundTile& t) {
  j = json{{"polygon", t.polygon}, {"class_id", t.class_id}};
}
inline void from_json(const json& j, GroundTile& t) {
  j.at("polygon").get_to(t.polygon);
  t.class_id = j.at("class_id").get<int>();
  t.cache_bbox();
}
inline void to_json(json& j, const Obstacle& o) {
  j = json{{"shape", o.shape == Obstacle::Shape::circle ? "circle" : "box"},
           {"x", o.x},
           {"y", o.y},
           {"yaw", o.yaw},
           {"radius", o.radius},
           {"hx", o.hx},
           {"hy", o.hy},
           {"class_id", o.class_id},
           {"height", o.height}};
}
inline void from_json(const json& j, Obstacle& o) {
  const std::string s = j.value("shape", "circle");
  if (s == "circle")
    o.shape = Obstacle::Shape::circle;
  else if (s == "box")
    o.shape = Obstacle::Shape::box;
  else
    throw std::invalid_argument("unknown obstacle shape: " + s);
  o.x = j.value("x", 0.0);
  o.y = j.value("y", 0.0);
  o.yaw = j.value("yaw", 0.0);
  o.radius = j.value("radius", 0.25);
  o.hx = j.value("hx", 0.5);
  o.hy = j.value("hy", 0.5);
  o.class_id = j.value("class_id", 1);
  o.height = j.value("height", 1.6);
}
inline void to_json(json& j, const WorldModel& w) {
  j = json{{"bounds", w.bounds},
           {"tiles", w.tiles},
           {"obstacles", w.obstacles},
           {"default_ground_class", w.default_ground_class},
           {"sky_class", w.sky_class}};
}
inline void from_json(const json& j, WorldModel& w) {
  j.at("bounds").get_to(w.bounds);
  if (j.contains("tiles")) j.at("tiles").get_to(w.tiles);
  if (j.contains("obstacles")) j.at("obstacles").get_to(w.obstacles);
  w.default_ground_class = j.value("default_ground_class", 0);
  w.sky_class = j.value("sky_class", 2);
}

// Two-terrain demo arena: a 3 m wide L-shaped road through a snow field,
// one cylinder astride the direct route.  Class ids follow the default map
// (3 = road, 4 = snow).
inline WorldModel make_selective_world() {
  WorldModel w;
  w.bounds = {-3, -4, 13, 13};
  w.default_ground_class = 4;
  GroundTile east;  // along +x
  east.polygon = {{-2, -1.5}, {9.5, -1.5}, {9.5, 1.5}, {-2, 1.5}};
  east.class_id = 3;
  east.cache_bbox();
  GroundTile north;  // up +y
  north.polygon = {{6.5, -1.5}, {9.5, -1.5}, {9.5, 11.5}, {6.5, 11.5}};
  north.class_id = 3;
  north.cache_bbox();
  w.tiles = {east, north};
  Obstacle ob;
  ob.shape = Obstacle::Shape::circle;
  ob.x = 3.45;
  ob.y = 4.0;
  ob.radius = 0.4;
  ob.height = 1.6;
  ob.class_id = 1;
  w.obstacles = {ob};
  return w;
}

}  // namespace povnav
