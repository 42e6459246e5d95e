// Command-line front end: single episodes, the benchmark matrix, offline
// directory processing, and world generation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "povnav/povnav.hpp"

namespace fs = std::filesystem;
using namespace povnav;

namespace {

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> overrides;
};

ExperimentConfig build_config(const CommonOpts& c) {
  ExperimentConfig cfg;
  if (!c.config_path.empty()) cfg = load_config(c.config_path);
  for (const auto& kv : c.overrides) apply_override(cfg, kv);
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--config", c.config_path, "JSON config file");
  cmd->add_option("--set", c.overrides,
                  "dotted key=value config override (repeatable)");
}

WorldModel world_for(const ExperimentConfig& cfg, const std::string& world_path) {
  if (world_path.empty()) return make_env(cfg.env);
  std::ifstream f(world_path);
  if (!f) throw std::runtime_error("cannot open world file: " + world_path);
  WorldModel w = json::parse(f).get<WorldModel>();
  return w;
}

// Coarse top-down map for envgen previews.
RgbImage world_map(const WorldModel& w, int px_per_m = 20) {
  const int iw = int(w.bounds.width() * px_per_m) + 1;
  const int ih = int(w.bounds.height() * px_per_m) + 1;
  RgbImage img(iw, ih);
  for (int r = 0; r < ih; ++r)
    for (int c = 0; c < iw; ++c) {
      const double x = w.bounds.xmin + double(c) / px_per_m;
      const double y = w.bounds.ymax - double(r) / px_per_m;
      const int cls = w.ground_class_at(x, y);
      uint8_t rr = 200, gg = 200, bb = 200;
      if (cls == 3) { rr = 150; gg = 150; bb = 150; }   // road: darker
      if (cls == 4) { rr = 235; gg = 235; bb = 245; }   // snow: near white
      img.set(r, c, rr, gg, bb);
    }
  for (const auto& ob : w.obstacles) {
    const int cc = int((ob.x - w.bounds.xmin) * px_per_m);
    const int rr = int((w.bounds.ymax - ob.y) * px_per_m);
    const int rad = std::max(1, int(ob.radius * px_per_m));
    img.disc(rr, cc, rad, 60, 60, 60);
  }
  return img;
}

int cmd_run(const CommonOpts& common, const std::string& world_path,
            const std::string& out_dir, int trial,
            const std::vector<double>& start_v,
            const std::vector<double>& goal_v) {
  ExperimentConfig cfg = build_config(common);
  const WorldModel world = world_for(cfg, world_path);
  const Renderer renderer(cfg.cam, cfg.depth_max_range);

  TrialSetup ts;
  if (start_v.size() == 3 && goal_v.size() == 2) {
    ts.start = {start_v[0], start_v[1], start_v[2]};
    ts.goal = {goal_v[0], goal_v[1], cfg.goal_radius};
  } else if (!start_v.empty() || !goal_v.empty()) {
    std::cerr << "need --start x y theta and --goal x y together\n";
    return 2;
  } else {
    ts = sample_trial(world, cfg, cfg.env.level, trial);
  }

  auto planner = make_planner(cfg.planner, cfg);
  EpisodeOptions opt;
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    opt.overlay_dir = out_dir;
  }
  const EpisodeResult res =
      run_episode(cfg, world, ts.start, ts.goal, *planner, renderer, opt);

  if (!out_dir.empty()) {
    std::ofstream tf(out_dir + "/trace.jsonl");
    for (const auto& line : res.trace) tf << line.dump() << "\n";
  }
  std::cout << "planner: " << cfg.planner << "\n"
            << "status: " << to_string(res.status) << "\n"
            << "frames: " << res.frames << "\n"
            << "path_length: " << res.path_length << "\n"
            << "straight_dist: " << res.straight_dist << "\n"
            << "plan_mean_s: " << res.plan_mean_s << "\n"
            << "plan_max_s: " << res.plan_max_s << "\n";
  return res.status == EpisodeStatus::success ? 0 : 1;
}

int cmd_bench(const CommonOpts& common, const std::string& out_dir,
              bool quiet) {
  ExperimentConfig cfg = build_config(common);
  const ExperimentTable table = run_experiment(cfg, out_dir, quiet);
  std::cout << "level,planner,success_rate,mutual_n,path_mean,plan_mean_s\n";
  for (const auto& a : table.aggs)
    std::cout << a.level << "," << a.planner << "," << a.success_rate << ","
              << a.mutual_n << "," << a.path_mean << "," << a.plan_mean_s
              << "\n";
  return 0;
}

int cmd_offline(const CommonOpts& common, const std::string& input_dir,
                double bearing, const std::string& out_dir) {
  ExperimentConfig cfg = build_config(common);
  PovnavParams prm = PovnavParams::from(cfg);
  prm.trace_waypoints = true;
  const auto records = offline_process(input_dir, prm, bearing, out_dir);
  std::cout << "processed " << records.size() << " frames\n";
  return records.empty() ? 1 : 0;
}

int cmd_envgen(const CommonOpts& common, const std::string& out_path,
               const std::string& map_path, bool selective) {
  ExperimentConfig cfg = build_config(common);
  const WorldModel world =
      selective ? make_selective_world() : make_env(cfg.env);
  json j = world;
  if (out_path.empty() || out_path == "-") {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream f(out_path);
    f << j.dump(2) << "\n";
    std::cout << "wrote " << out_path << " (" << world.obstacles.size()
              << " obstacles)\n";
  }
  if (!map_path.empty()) write_ppm(map_path, world_map(world));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pixel-level navigability planning + benchmark harness"};
  app.require_subcommand(1);

  CommonOpts c_run, c_bench, c_off, c_env;

  auto* run = app.add_subcommand("run", "run one episode");
  add_common(run, c_run);
  std::string run_world, run_out;
  int run_trial = 0;
  std::vector<double> run_start, run_goal;
  run->add_option("--world", run_world, "world JSON (default: generated env)");
  run->add_option("--out", run_out, "output dir for trace + overlays");
  run->add_option("--trial", run_trial, "sampled trial index");
  run->add_option("--start", run_start, "x y theta")->expected(3);
  run->add_option("--goal", run_goal, "x y")->expected(2);

  auto* bench = app.add_subcommand("bench", "benchmark matrix over envs");
  add_common(bench, c_bench);
  std::string bench_out = "bench_out";
  bool bench_quiet = false;
  bench->add_option("--out", bench_out, "output dir for csv + traces");
  bench->add_flag("--quiet", bench_quiet, "suppress per-trial progress");

  auto* off = app.add_subcommand("offline", "process a directory of label PGMs");
  add_common(off, c_off);
  std::string off_in, off_out = "offline_out";
  double off_bearing = 0.0;
  off->add_option("--input", off_in, "directory of .pgm label images")
      ->required();
  off->add_option("--bearing", off_bearing, "goal bearing in radians");
  off->add_option("--out", off_out, "output dir");

  auto* env = app.add_subcommand("envgen", "dump a world model as JSON");
  add_common(env, c_env);
  std::string env_out = "-", env_map;
  bool env_sel = false;
  env->add_option("--out", env_out, "output path ('-' for stdout)");
  env->add_option("--map", env_map, "also write a top-down PPM map");
  env->add_flag("--selective", env_sel, "two-terrain road/snow demo world");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(c_run, run_world, run_out, run_trial, run_start, run_goal);
    if (bench->parsed()) return cmd_bench(c_bench, bench_out, bench_quiet);
    if (off->parsed()) return cmd_offline(c_off, off_in, off_bearing, off_out);
    if (env->parsed()) return cmd_envgen(c_env, env_out, env_map, env_sel);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 0;
}
