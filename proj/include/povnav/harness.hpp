#pragma once
// Episode runner and experiment orchestration: paired start/goal sampling,
// planner-agnostic frame loop, metrics tables, JSONL traces, offline mode.
//
// Wall-clock timing covers the observation->action step only and is written
// apart from the deterministic outputs so that repeated runs with one seed
// produce byte-identical tables and traces.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "povnav/config.hpp"
#include "povnav/control.hpp"
#include "povnav/geometry.hpp"
#include "povnav/idwa.hpp"
#include "povnav/image_io.hpp"
#include "povnav/navigability.hpp"
#include "povnav/pathplan.hpp"
#include "povnav/sim.hpp"
#include "povnav/subgoal.hpp"

namespace povnav {

inline uint32_t mix_seed(uint32_t a, uint32_t b, uint32_t c) {
  uint64_t z = (uint64_t(a) << 32) ^ (uint64_t(b) * 0x9e3779b97f4a7c15ull) ^
               (uint64_t(c) * 0xbf58476d1ce4e5b9ull);
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return uint32_t(z);
}

struct PovnavParams {
  CameraModel cam;
  ClassMap classes;
  double w1 = 0.5, w2 = 0.5;
  bool normalize = true;
  double robot_width = 0.30;
  double margin = 0.05;
  double lookahead_px = 60.0;
  int snap_radius = 15;
  double subgoal_hysteresis = 0.05;  // score margin for keeping the last pick
  ServoGains gains;
  bool trace_waypoints = false;

  static PovnavParams from(const ExperimentConfig& cfg) {
    PovnavParams p;
    p.cam = cfg.cam;
    p.classes = cfg.classes;
    p.w1 = cfg.w1;
    p.w2 = cfg.w2;
    p.normalize = cfg.normalize_objectives;
    p.robot_width = cfg.robot_width;
    p.margin = cfg.safety_margin;
    p.lookahead_px = cfg.lookahead_px();
    p.snap_radius = cfg.snap_radius_px();
    p.subgoal_hysteresis = cfg.subgoal_hysteresis;
    p.gains = cfg.servo_gains();
    p.trace_waypoints = cfg.trace_waypoints;
    return p;
  }
};

struct PovnavFrame {
  NavigabilityImage nav;
  SubgoalResult sub;
  std::optional<SafeRegion> safe;
  std::optional<VisualPath> path;
  std::optional<NavFeatures> feats;
  ControlCommand cmd;
  json record;
};

// One full pipeline pass over a segmentation frame.  Drives both the episode
// loop and the offline directory mode, so the emitted record is identical in
// the two settings by construction.  `prev_hog`, when given, keeps the last
// frame's sub-goal whenever its nearest front member still scores within
// `subgoal_hysteresis` of the optimum; without it two near-tied candidates on
// opposite sides can alternate every frame and the turn commands cancel.
inline PovnavFrame povnav_process_frame(const SegmentedImage& seg, double theta,
                                        const PovnavParams& prm,
                                        const FrameBPoint* prev_hog = nullptr) {
  PovnavFrame fr;
  const BinaryImage bin = binarize(seg, prm.classes);
  fr.nav = build_navigability_image(bin);
  fr.sub = select_subgoal(fr.nav, theta, prm.w1, prm.w2, prm.normalize);
  if (prev_hog && prm.subgoal_hysteresis > 0 && fr.sub.hog &&
      fr.sub.front.size() > 1) {
    std::vector<double> scores;
    select_hog(fr.sub.front, fr.sub.pog, prm.w1, prm.w2, prm.normalize,
               &scores);
    size_t pick = 0, near = 0;
    for (size_t i = 0; i < fr.sub.front.size(); ++i) {
      if (fr.sub.front[i].p == *fr.sub.hog) pick = i;
      const auto d = [&](size_t k) {
        return std::abs(fr.sub.front[k].p.y - prev_hog->y);
      };
      if (d(i) < d(near)) near = i;
    }
    // only bridge the center: same-side drift must keep tracking the argmin
    if (near != pick && fr.sub.front[near].p.y * fr.sub.front[pick].p.y < 0 &&
        scores[near] <= scores[pick] + prm.subgoal_hysteresis) {
      fr.sub.hog = fr.sub.front[near].p;
      fr.sub.hog_obj = fr.sub.front[near].obj;
    }
  }

  bool blocked = true;
  if (fr.sub.hog) {
    fr.safe = inflate(fr.nav, prm.cam, prm.robot_width, prm.margin);
    fr.path = plan_path(*fr.safe, FrameBPoint{0, 0}, *fr.sub.hog, prm.snap_radius);
    if (fr.path) {
      fr.feats = compute_features(fr.nav, *fr.path, prm.lookahead_px,
                                  prm.gains.lambda0);
      fr.cmd = servo(fr.feats->error, prm.gains);
      blocked = false;
    }
  }
  if (blocked) fr.cmd = servo_blocked(prm.gains, theta);

  json rec;
  rec["theta"] = theta;
  rec["pog"] = {fr.sub.pog.point.x, fr.sub.pog.point.y};
  rec["front_size"] = fr.sub.front.size();
  if (fr.sub.hog) {
    rec["hog"] = {fr.sub.hog->x, fr.sub.hog->y};
    rec["f1"] = fr.sub.hog_obj.f1;
    rec["f2"] = fr.sub.hog_obj.f2;
  } else {
    rec["hog"] = nullptr;
  }
  if (fr.feats) {
    rec["lambda"] = fr.feats->lambda;
    rec["phi"] = fr.feats->phi;
    rec["error"] = {fr.feats->error[0], fr.feats->error[1]};
  }
  if (fr.path) {
    rec["path_cost"] = fr.path->cost;
    rec["path_len"] = fr.path->waypoints.size();
    rec["snapped"] = fr.path->start_snapped;
    if (prm.trace_waypoints) {
      json wps = json::array();
      for (const auto& p : fr.path->waypoints) wps.push_back({p.x, p.y});
      rec["path_xy"] = std::move(wps);
    }
  }
  rec["v"] = fr.cmd.v;
  rec["w"] = fr.cmd.w;
  rec["blocked"] = blocked;
  fr.record = std::move(rec);
  return fr;
}

struct FramePlan {
  ControlCommand cmd;
  json record;
};

class FramePlanner {
 public:
  virtual ~FramePlanner() = default;
  virtual const char* name() const = 0;
  virtual void reset() {}
  virtual FramePlan plan(const RenderOutput& obs, const RobotPose& pose,
                         const GoalSpec& goal) = 0;
  // diagnostic frame for overlay dumps; optional
  virtual std::optional<RgbImage> overlay() const { return std::nullopt; }
};

class PovnavPlanner : public FramePlanner {
 public:
  explicit PovnavPlanner(const ExperimentConfig& cfg)
      : prm_(PovnavParams::from(cfg)) {}
  explicit PovnavPlanner(PovnavParams prm) : prm_(std::move(prm)) {}

  const char* name() const override { return "povnav"; }
  void reset() override {
    last_.reset();
    hog_memory_.reset();
    turn_sign_ = 0;
  }

  FramePlan plan(const RenderOutput& obs, const RobotPose& pose,
                 const GoalSpec& goal) override {
    const double theta = goal_bearing(pose, goal);
    last_ = povnav_process_frame(obs.seg, theta, prm_,
                                 hog_memory_ ? &*hog_memory_ : nullptr);
    hog_memory_ = last_->sub.hog;
    FramePlan out{last_->cmd, last_->record};
    // zero-velocity stall: commit to one rotation direction until the robot
    // actually translates away.  A symmetric standoff (obstacle centered at
    // stop range) flips the sub-goal side with every yaw step and the turn
    // commands cancel; an obstacle at exactly stop range dead ahead is a
    // fixed point (v = 0, w = 0) that never changes the view at all.  Creep
    // pulses must not release the lock early or the same arc sweeps forever.
    if (turn_sign_ != 0 &&
        std::hypot(pose.x - anchor_x_, pose.y - anchor_y_) > 0.05)
      turn_sign_ = 0;
    if (out.cmd.v <= 1e-9) {
      if (turn_sign_ == 0) {
        turn_sign_ = out.cmd.w > 0    ? 1
                     : out.cmd.w < 0  ? -1
                     : theta >= 0     ? 1
                                      : -1;
        anchor_x_ = pose.x;
        anchor_y_ = pose.y;
      }
      const double rate =
          std::max(std::fabs(out.cmd.w), prm_.gains.w_max / 2);
      out.cmd.w = turn_sign_ * rate;
      out.record["w"] = out.cmd.w;
    } else if (turn_sign_ != 0) {
      out.cmd.w = turn_sign_ * std::fabs(out.cmd.w);
      out.record["w"] = out.cmd.w;
    }
    return out;
  }

  std::optional<RgbImage> overlay() const override {
    if (!last_) return std::nullopt;
    return draw_overlay(last_->nav,
                        last_->safe ? &*last_->safe : nullptr,
                        last_->path ? &*last_->path : nullptr, last_->sub.pog,
                        last_->sub.hog);
  }

  const std::optional<PovnavFrame>& last_frame() const { return last_; }

 private:
  PovnavParams prm_;
  std::optional<PovnavFrame> last_;
  std::optional<FrameBPoint> hog_memory_;
  int turn_sign_ = 0;  // nonzero while a stalled rotation is committed
  double anchor_x_ = 0.0, anchor_y_ = 0.0;
};

class IdwaPlanner : public FramePlanner {
 public:
  explicit IdwaPlanner(const ExperimentConfig& cfg)
      : cam_(cfg.cam), classes_(cfg.classes), dwa_(cfg.dwa),
        robot_width_(cfg.robot_width) {
    dwa_.control_dt = cfg.dt;
    dwa_.v_max = cfg.v_max;
    dwa_.w_max = cfg.w_max;
  }

  const char* name() const override { return "idwa"; }
  void reset() override { v_ = 0.0; w_ = 0.0; }

  FramePlan plan(const RenderOutput& obs, const RobotPose& pose,
                 const GoalSpec& goal) override {
    const double theta = goal_bearing(pose, goal);
    const BinaryImage bin = binarize(obs.seg, classes_);
    last_nav_ = build_navigability_image(bin);
    const auto window = dynamic_window(v_, w_, dwa_);
    const IdwaDecision dec = evaluate(window, *last_nav_, obs.depth, cam_,
                                      theta, dwa_, robot_width_);
    v_ = dec.cmd.v;
    w_ = dec.cmd.w;
    json rec;
    rec["theta"] = theta;
    rec["v"] = dec.cmd.v;
    rec["w"] = dec.cmd.w;
    rec["admissible"] = dec.admissible;
    rec["score"] = dec.best_score;
    rec["clearance"] = dec.clearance;
    rec["blocked"] = dec.cmd.status == DriveStatus::stopped_blocked;
    return {dec.cmd, std::move(rec)};
  }

  std::optional<RgbImage> overlay() const override {
    if (!last_nav_) return std::nullopt;
    return draw_overlay(*last_nav_, nullptr, nullptr, std::nullopt,
                        std::nullopt);
  }

 private:
  CameraModel cam_;
  ClassMap classes_;
  DwaConfig dwa_;
  double robot_width_;
  double v_ = 0.0, w_ = 0.0;
  std::optional<NavigabilityImage> last_nav_;
};

inline std::unique_ptr<FramePlanner> make_planner(const std::string& name,
                                                  const ExperimentConfig& cfg) {
  if (name == "povnav") return std::make_unique<PovnavPlanner>(cfg);
  if (name == "idwa") return std::make_unique<IdwaPlanner>(cfg);
  throw std::invalid_argument("unknown planner: " + name);
}

enum class EpisodeStatus { success, collision, timeout, blocked };

inline const char* to_string(EpisodeStatus s) {
  switch (s) {
    case EpisodeStatus::success: return "success";
    case EpisodeStatus::collision: return "collision";
    case EpisodeStatus::timeout: return "timeout";
    case EpisodeStatus::blocked: return "blocked";
  }
  return "?";
}

struct EpisodeResult {
  EpisodeStatus status = EpisodeStatus::timeout;
  double path_length = 0.0;
  int frames = 0;
  double plan_mean_s = 0.0;
  double plan_max_s = 0.0;
  std::vector<json> trace;
  RobotPose final_pose;
  double straight_dist = 0.0;
};

struct EpisodeOptions {
  bool keep_trace = true;
  std::string overlay_dir;  // with cfg.overlay_every > 0: dump frames here
};

inline EpisodeResult run_episode(const ExperimentConfig& cfg,
                                 const WorldModel& world, const RobotPose& start,
                                 const GoalSpec& goal, FramePlanner& planner,
                                 const Renderer& renderer,
                                 const EpisodeOptions& opt = {}) {
  if (collision(world, start, cfg.robot_radius))
    throw std::invalid_argument(
        "start pose is in collision; resample the trial");

  EpisodeResult res;
  res.straight_dist = std::hypot(goal.x - start.x, goal.y - start.y);
  const double timeout_s =
      std::max(10.0, cfg.timeout_factor * res.straight_dist / cfg.v_max);
  const int max_frames = int(std::ceil(timeout_s / cfg.dt));

  planner.reset();
  RobotPose pose = start;
  int blocked_streak = 0;
  double plan_total = 0.0;
  bool done = false;

  for (int k = 0; k < max_frames && !done; ++k) {
    if (goal_check(pose, goal)) {
      res.status = EpisodeStatus::success;
      done = true;
      break;
    }
    RenderOutput obs = renderer.render(world, pose);
    if (cfg.label_noise > 0)
      apply_label_noise(obs.seg, cfg.classes, cfg.label_noise,
                        mix_seed(cfg.noise_seed, uint32_t(k), 0x5eed));

    const auto t0 = std::chrono::steady_clock::now();
    FramePlan fp = planner.plan(obs, pose, goal);
    const auto t1 = std::chrono::steady_clock::now();
    const double dt_plan =
        std::chrono::duration<double>(t1 - t0).count();
    plan_total += dt_plan;
    res.plan_max_s = std::max(res.plan_max_s, dt_plan);

    const ControlCommand cmd =
        camera_to_body(fp.cmd, cfg.camera_lateral_offset);

    if (opt.keep_trace) {
      json line;
      line["frame"] = k;
      line["pose"] = {pose.x, pose.y, pose.theta};
      line["plan"] = fp.record;
      res.trace.push_back(std::move(line));
    }
    if (cfg.overlay_every > 0 && !opt.overlay_dir.empty() &&
        k % cfg.overlay_every == 0) {
      if (auto img = planner.overlay()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "/overlay_%05d.ppm", k);
        write_ppm(opt.overlay_dir + buf, *img);
      }
    }

    if (fp.cmd.status == DriveStatus::stopped_blocked) {
      if (++blocked_streak > cfg.blocked_limit) {
        res.status = EpisodeStatus::blocked;
        ++res.frames;
        done = true;
        break;
      }
    } else {
      blocked_streak = 0;
    }

    const RobotPose next = step(pose, cmd, cfg.dt);
    res.path_length += std::hypot(next.x - pose.x, next.y - pose.y);
    pose = next;
    ++res.frames;

    if (collision(world, pose, cfg.robot_radius)) {
      res.status = EpisodeStatus::collision;
      done = true;
      break;
    }
  }
  if (!done && goal_check(pose, goal)) res.status = EpisodeStatus::success;

  res.final_pose = pose;
  if (res.frames > 0) res.plan_mean_s = plan_total / res.frames;
  return res;
}

struct TrialSetup {
  RobotPose start;
  GoalSpec goal;
};

// Start/goal pairs depend only on (sample_seed, level, trial): every planner
// sees the same tasks.  Separation demands relax deterministically when the
// arena cannot satisfy them.
inline TrialSetup sample_trial(const WorldModel& world,
                               const ExperimentConfig& cfg, int level,
                               int trial) {
  std::mt19937 rng(mix_seed(cfg.sample_seed, uint32_t(level), uint32_t(trial)));
  const auto& b = world.bounds;
  const double pad = cfg.robot_radius + cfg.sample_clearance;
  std::uniform_real_distribution<double> ux(b.xmin + pad, b.xmax - pad);
  std::uniform_real_distribution<double> uy(b.ymin + pad, b.ymax - pad);
  std::uniform_real_distribution<double> uth(-kPi, kPi);

  const auto clear = [&](double x, double y) {
    return !collision(world, {x, y, 0},
                      cfg.robot_radius + cfg.sample_clearance);
  };

  TrialSetup ts;
  double sep = cfg.min_separation_frac * b.diagonal();
  while (true) {
    bool ok = false;
    for (int i = 0; i < 400 && !ok; ++i) {
      ts.start.x = ux(rng);
      ts.start.y = uy(rng);
      ok = clear(ts.start.x, ts.start.y);
    }
    if (!ok) {
      sep *= 0.85;  // keep shrinking; a degenerate world still terminates
      continue;
    }
    ts.start.theta = uth(rng);
    ok = false;
    for (int i = 0; i < 400 && !ok; ++i) {
      ts.goal.x = ux(rng);
      ts.goal.y = uy(rng);
      ok = clear(ts.goal.x, ts.goal.y) &&
           std::hypot(ts.goal.x - ts.start.x, ts.goal.y - ts.start.y) >= sep;
    }
    if (ok) break;
    sep *= 0.85;
  }
  ts.goal.reach_radius = cfg.goal_radius;
  return ts;
}

struct TrialRow {
  int level = 0;
  std::string planner;
  int trial = 0;
  EpisodeStatus status = EpisodeStatus::timeout;
  double path_length = 0;
  int frames = 0;
  double straight = 0;
  double plan_mean_s = 0;
  double plan_max_s = 0;
};

struct AggRow {
  int level = 0;
  std::string planner;
  int trials = 0;
  int successes = 0;
  double success_rate = 0;
  int mutual_n = 0;  // trials every benched planner completed
  double path_mean = 0, path_sd = 0;
  double plan_mean_s = 0;
};

struct ExperimentTable {
  std::vector<TrialRow> rows;
  std::vector<AggRow> aggs;
};

namespace detail {

inline std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace detail

// Full bench matrix.  With a non-empty out_dir, writes trials.csv,
// aggregates.csv, timing.csv, and traces/ underneath it.
inline ExperimentTable run_experiment(const ExperimentConfig& cfg,
                                      const std::string& out_dir = "",
                                      bool quiet = false) {
  namespace fs = std::filesystem;
  ExperimentTable table;
  const bool write = !out_dir.empty();
  if (write) {
    fs::create_directories(out_dir);
    fs::create_directories(out_dir + "/traces");
  }

  const Renderer renderer(cfg.cam, cfg.depth_max_range);
  std::map<std::pair<int, int>, int> successes_per_trial;

  for (int level : cfg.bench_levels) {
    EnvSpec spec = cfg.env;
    spec.level = level;
    spec.seed = mix_seed(cfg.env.seed, uint32_t(level), 0xa5e11);
    const WorldModel world = make_env(spec);
    for (int trial = 0; trial < cfg.trials; ++trial) {
      const TrialSetup ts = sample_trial(world, cfg, level, trial);
      for (const auto& pname : cfg.bench_planners) {
        auto planner = make_planner(pname, cfg);
        const EpisodeResult er =
            run_episode(cfg, world, ts.start, ts.goal, *planner, renderer);
        TrialRow row{level,        pname,
                     trial,        er.status,
                     er.path_length, er.frames,
                     er.straight_dist, er.plan_mean_s,
                     er.plan_max_s};
        table.rows.push_back(row);
        if (er.status == EpisodeStatus::success)
          successes_per_trial[{level, trial}]++;
        if (write) {
          std::ofstream tf(out_dir + "/traces/env" + std::to_string(level) +
                           "_" + pname + "_t" + std::to_string(trial) +
                           ".jsonl");
          for (const auto& line : er.trace) tf << line.dump() << "\n";
        }
        if (!quiet)
          std::cerr << "env" << level << " trial " << trial << " " << pname
                    << ": " << to_string(er.status)
                    << " len=" << detail::fmt_g(er.path_length) << "\n";
      }
    }
  }

  const int np = int(cfg.bench_planners.size());
  for (int level : cfg.bench_levels) {
    for (const auto& pname : cfg.bench_planners) {
      AggRow agg;
      agg.level = level;
      agg.planner = pname;
      std::vector<double> mutual_lengths;
      double plan_sum = 0;
      int plan_n = 0;
      for (const auto& r : table.rows) {
        if (r.level != level || r.planner != pname) continue;
        agg.trials++;
        if (r.status == EpisodeStatus::success) agg.successes++;
        if (r.frames > 0) {
          plan_sum += r.plan_mean_s;
          plan_n++;
        }
        if (successes_per_trial[{level, r.trial}] == np)
          mutual_lengths.push_back(r.path_length);
      }
      if (agg.trials > 0)
        agg.success_rate = double(agg.successes) / agg.trials;
      agg.mutual_n = int(mutual_lengths.size());
      if (!mutual_lengths.empty()) {
        double s = 0;
        for (double v : mutual_lengths) s += v;
        agg.path_mean = s / mutual_lengths.size();
        double q = 0;
        for (double v : mutual_lengths)
          q += (v - agg.path_mean) * (v - agg.path_mean);
        agg.path_sd = mutual_lengths.size() > 1
                          ? std::sqrt(q / (mutual_lengths.size() - 1))
                          : 0.0;
      }
      if (plan_n > 0) agg.plan_mean_s = plan_sum / plan_n;
      table.aggs.push_back(agg);
    }
  }

  if (write) {
    {
      std::ofstream f(out_dir + "/trials.csv");
      f << "level,planner,trial,status,path_length,frames,straight_dist\n";
      for (const auto& r : table.rows)
        f << r.level << "," << r.planner << "," << r.trial << ","
          << to_string(r.status) << "," << detail::fmt_g(r.path_length) << ","
          << r.frames << "," << detail::fmt_g(r.straight) << "\n";
    }
    {
      std::ofstream f(out_dir + "/timing.csv");
      f << "level,planner,trial,plan_mean_s,plan_max_s\n";
      for (const auto& r : table.rows)
        f << r.level << "," << r.planner << "," << r.trial << ","
          << detail::fmt_g(r.plan_mean_s) << "," << detail::fmt_g(r.plan_max_s)
          << "\n";
    }
    {
      std::ofstream f(out_dir + "/aggregates.csv");
      f << "level,planner,trials,successes,success_rate,mutual_n,path_mean,"
           "path_sd\n";
      for (const auto& a : table.aggs)
        f << a.level << "," << a.planner << "," << a.trials << ","
          << a.successes << "," << detail::fmt_g(a.success_rate) << ","
          << a.mutual_n << "," << detail::fmt_g(a.path_mean) << ","
          << detail::fmt_g(a.path_sd) << "\n";
    }
  }
  return table;
}

// Directory of segmentation label images -> per-frame records + overlays.
inline std::vector<json> offline_process(const std::string& input_dir,
                                         const PovnavParams& prm, double theta,
                                         const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(input_dir))
    if (e.is_regular_file() && e.path().extension() == ".pgm")
      files.push_back(e.path().string());
  std::sort(files.begin(), files.end());

  if (!out_dir.empty()) fs::create_directories(out_dir);
  std::ofstream recf;
  if (!out_dir.empty()) recf.open(out_dir + "/records.jsonl");

  std::vector<json> records;
  int dims_w = -1, dims_h = -1, index = 0;
  for (const auto& path : files) {
    Grid<uint8_t> labels;
    try {
      labels = read_pgm(path);
    } catch (const std::exception& ex) {
      std::cerr << "offline: skipping unreadable " << path << " (" << ex.what()
                << ")\n";
      continue;
    }
    if (dims_w < 0) {
      dims_w = labels.w;
      dims_h = labels.h;
    } else if (labels.w != dims_w || labels.h != dims_h) {
      throw std::runtime_error("dimension mismatch in " + path + ": got " +
                               std::to_string(labels.w) + "x" +
                               std::to_string(labels.h) + ", expected " +
                               std::to_string(dims_w) + "x" +
                               std::to_string(dims_h));
    }
    PovnavParams frame_prm = prm;
    if (labels.w != prm.cam.width || labels.h != prm.cam.height) {
      // frames sized differently from the configured camera: rescale the
      // intrinsics proportionally and recenter
      const double sx = double(labels.w) / prm.cam.width;
      const double sy = double(labels.h) / prm.cam.height;
      frame_prm.cam.width = labels.w;
      frame_prm.cam.height = labels.h;
      frame_prm.cam.fx *= sx;
      frame_prm.cam.fy *= sy;
      frame_prm.cam.cx = (prm.cam.cx + 0.5) * sx - 0.5;
      frame_prm.cam.cy = (prm.cam.cy + 0.5) * sy - 0.5;
    }
    const PovnavFrame fr =
        povnav_process_frame(SegmentedImage{std::move(labels)}, theta, frame_prm);
    json rec = fr.record;
    rec["file"] = fs::path(path).filename().string();
    records.push_back(rec);
    if (recf) recf << rec.dump() << "\n";
    if (!out_dir.empty()) {
      const RgbImage img = draw_overlay(
          fr.nav, fr.safe ? &*fr.safe : nullptr, fr.path ? &*fr.path : nullptr,
          fr.sub.pog, fr.sub.hog);
      char buf[64];
      std::snprintf(buf, sizeof buf, "/overlay_%05d.ppm", index);
      write_ppm(out_dir + buf, img);
    }
    ++index;
  }
  return records;
}

}  // namespace povnav
