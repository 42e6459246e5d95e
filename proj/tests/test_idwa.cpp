#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "povnav/idwa.hpp"
#include "povnav/sim.hpp"

using namespace povnav;

namespace {

ClassMap omega3() {
  ClassMap m;
  m.entries = {{0, true, "ground"}, {1, false, "obstacle"}, {2, false, "sky"}};
  return m;
}

struct Scene {
  NavigabilityImage nav;
  DepthImage depth;
};

Scene scene_from(const WorldModel& world, const RobotPose& pose,
                 const CameraModel& cam, double max_range) {
  RenderOutput out = render(world, pose, cam, max_range);
  Scene s{build_navigability_image(binarize(out.seg, omega3())),
          std::move(out.depth)};
  return s;
}

Scene empty_scene(const CameraModel& cam) {
  WorldModel world;
  world.bounds = {-50, -50, 50, 50};
  return scene_from(world, {0, 0, 0}, cam, 4.0);
}

}  // namespace

TEST_CASE("dynamic window sampling") {
  DwaConfig cfg;
  cfg.validate();

  SECTION("hand-computed window") {
    cfg.v_samples = 3;
    cfg.w_samples = 5;
    cfg.accel_v = 1.0;
    cfg.accel_w = 2.0;
    cfg.control_dt = 0.25;
    cfg.v_min = 0.0;
    cfg.v_max = 2.0;
    cfg.w_max = 5.0;
    const auto win = dynamic_window(0.5, 0.1, cfg);
    REQUIRE(win.size() == 15);
    // v in {0.25, 0.5, 0.75}, w in {-0.4, -0.15, 0.1, 0.35, 0.6}
    CHECK(win.front().first == Catch::Approx(0.25));
    CHECK(win.front().second == Catch::Approx(-0.4));
    CHECK(win.back().first == Catch::Approx(0.75));
    CHECK(win.back().second == Catch::Approx(0.6));
    CHECK(win[7].first == Catch::Approx(0.5));    // middle of the grid
    CHECK(win[7].second == Catch::Approx(0.1));
  }

  SECTION("limits clamp the reachable set") {
    cfg = DwaConfig{};
    for (const auto& [v, w] : dynamic_window(1.0, 0.0, cfg)) {
      CHECK(v <= cfg.v_max);
      CHECK(v >= 1.0 - cfg.accel_v * cfg.control_dt - 1e-12);
      CHECK(std::fabs(w) <= cfg.accel_w * cfg.control_dt + 1e-12);
    }
    for (const auto& [v, w] : dynamic_window(0.0, 0.0, cfg)) CHECK(v >= 0.0);
  }

  SECTION("symmetric window around a resting robot when reverse is allowed") {
    cfg = DwaConfig{};
    cfg.v_min = -1.0;
    cfg.v_samples = 15;
    cfg.w_samples = 41;
    const auto win = dynamic_window(0.0, 0.0, cfg);
    REQUIRE(win.size() == 15 * 41);
    CHECK(win.front().first == Catch::Approx(-0.1));
    CHECK(win.back().first == Catch::Approx(0.1));
    // exact center sample is (0, 0)
    CHECK(win[7 * 41 + 20].first == Catch::Approx(0.0).margin(1e-15));
    CHECK(win[7 * 41 + 20].second == Catch::Approx(0.0).margin(1e-15));
  }

  SECTION("2x2 window is exactly the corners") {
    cfg = DwaConfig{};
    cfg.v_samples = 2;
    cfg.w_samples = 2;
    const auto win = dynamic_window(0.5, 0.0, cfg);
    REQUIRE(win.size() == 4);
    CHECK(win[0].first == Catch::Approx(0.4));
    CHECK(win[3].first == Catch::Approx(0.6));
  }

  SECTION("degenerate sample counts rejected") {
    cfg = DwaConfig{};
    cfg.v_samples = 1;
    CHECK_THROWS_AS(dynamic_window(0, 0, cfg), std::invalid_argument);
  }
}

TEST_CASE("evaluate: open ground, goal dead ahead") {
  const CameraModel cam;
  const Scene s = empty_scene(cam);
  DwaConfig cfg;
  const auto cands = dynamic_window(0.9, 0.0, cfg);
  const IdwaDecision d = evaluate(cands, s.nav, s.depth, cam, 0.0, cfg, 0.4);
  CHECK(d.cmd.status == DriveStatus::running);
  CHECK(d.admissible == int(cands.size()));
  CHECK(d.cmd.v == Catch::Approx(1.0));
  CHECK(d.cmd.w == Catch::Approx(0.0).margin(1e-12));
  CHECK(d.clearance == Catch::Approx(cfg.clearance_max));
}

TEST_CASE("evaluate: hand-scored candidate set") {
  const CameraModel cam;
  const Scene s = empty_scene(cam);
  DwaConfig cfg;
  cfg.horizon = 2.0;
  const std::vector<std::pair<double, double>> cands = {
      {0.2, 0.0}, {0.4, 0.2}, {0.4, -0.2}, {0.8, 0.3}, {0.6, 0.0}};
  // heading 0.8(1-|0.3-2w|/pi) + clearance 0.1 + velocity 0.1 v:
  //   (0.2,0)    0.843606
  //   (0.4,0.2)  0.914535   <- argmax
  //   (0.4,-0.2) 0.761746
  //   (0.8,0.3)  0.903606
  //   (0.6,0)    0.883606
  const IdwaDecision d = evaluate(cands, s.nav, s.depth, cam, 0.3, cfg, 0.4);
  CHECK(d.admissible == 5);
  CHECK(d.cmd.v == Catch::Approx(0.4));
  CHECK(d.cmd.w == Catch::Approx(0.2));
  CHECK(d.best_score == Catch::Approx(0.9145352).margin(1e-6));

  SECTION("candidate order does not change the winner") {
    auto rev = cands;
    std::reverse(rev.begin(), rev.end());
    const IdwaDecision d2 = evaluate(rev, s.nav, s.depth, cam, 0.3, cfg, 0.4);
    CHECK(d2.cmd.v == Catch::Approx(d.cmd.v));
    CHECK(d2.cmd.w == Catch::Approx(d.cmd.w));
    CHECK(d2.best_score == Catch::Approx(d.best_score));
  }
}

TEST_CASE("evaluate: wall hard ahead forces the blocked fallback") {
  const CameraModel cam;
  WorldModel world;
  world.bounds = {-50, -50, 50, 50};
  Obstacle wall;
  wall.shape = Obstacle::Shape::box;
  wall.x = 0.3;
  wall.y = 0.0;
  wall.hx = 0.1;
  wall.hy = 3.0;
  wall.height = 1.6;
  world.obstacles.push_back(wall);
  const Scene s = scene_from(world, {0, 0, 0}, cam, 4.0);

  DwaConfig cfg;
  cfg.v_min = 0.3;  // no creeping: braking needs more room than the wall gives
  const auto cands = dynamic_window(0.5, 0.0, cfg);
  for (const auto& [v, w] : cands) CHECK(v >= 0.4 - 1e-12);

  const IdwaDecision d = evaluate(cands, s.nav, s.depth, cam, -0.4, cfg, 0.4);
  CHECK(d.cmd.status == DriveStatus::stopped_blocked);
  CHECK(d.admissible == 0);
  CHECK(d.cmd.v == 0.0);
  CHECK(d.cmd.w == Catch::Approx(-cfg.w_max / 2));  // rotate toward the goal side

  SECTION("the same wall admits slow approach when creeping is allowed") {
    DwaConfig creep = DwaConfig{};
    creep.v_min = 0.0;
    const auto slow = dynamic_window(0.0, 0.0, creep);
    const IdwaDecision d2 = evaluate(slow, s.nav, s.depth, cam, 0.0, creep, 0.4);
    CHECK(d2.cmd.status == DriveStatus::running);
    CHECK(d2.cmd.v < 0.15);
  }
}

TEST_CASE("depth gates what counts as an obstacle") {
  const CameraModel cam;
  // mask everything non-navigable but report no depth returns at all:
  // the planner is blind and every arc stays admissible
  NavigabilityImage nav{BinaryImage{Grid<uint8_t>(cam.width, cam.height, 1)},
                        VisualHorizon{}};
  nav.horizon.psi.assign(cam.width, 0);
  DepthImage blind{Grid<float>(cam.width, cam.height,
                               std::numeric_limits<float>::infinity()),
                   4.0f};
  DwaConfig cfg;
  const auto cands = dynamic_window(0.9, 0.0, cfg);
  const IdwaDecision d = evaluate(cands, nav, blind, cam, 0.0, cfg, 0.4);
  CHECK(d.cmd.status == DriveStatus::running);
  CHECK(d.admissible == int(cands.size()));

  SECTION("a uniform 1 m return blocks arcs only once they reach it") {
    DepthImage near{Grid<float>(cam.width, cam.height, 1.0f), 4.0f};
    const IdwaDecision d2 = evaluate(cands, nav, near, cam, 0.0, cfg, 0.4);
    CHECK(d2.cmd.status == DriveStatus::running);
    CHECK(d2.cmd.v == Catch::Approx(1.0));
    // first arc sample with range + tol >= 1 m
    CHECK(d2.clearance == Catch::Approx(0.9).margin(0.06));
  }
}

TEST_CASE("make_candidate records the rollout") {
  const CameraModel cam;
  const Scene s = empty_scene(cam);
  DwaConfig cfg;
  const CandidateTrajectory t = make_candidate(0.5, 0.0, s.nav, s.depth, cam, cfg, 0.4);
  CHECK(t.v == 0.5);
  CHECK(t.admissible);
  CHECK(t.clearance == Catch::Approx(cfg.clearance_max));
  REQUIRE(t.arc.size() == size_t(std::ceil(cfg.horizon / cfg.dt)) + 1);
  CHECK(t.arc.front().x == 0.0);
  CHECK(t.arc.back().x == Catch::Approx(0.5 * cfg.horizon));
  CHECK_FALSE(t.pixels.empty());
  for (const auto& pix : t.pixels) {
    CHECK(pix.row >= 0);
    CHECK(pix.row < cam.height);
  }

  SECTION("curved arcs bend the recorded trace") {
    const CandidateTrajectory c = make_candidate(0.5, 0.5, s.nav, s.depth, cam, cfg, 0.4);
    CHECK(c.arc.back().y > 0.1);
    CHECK(c.arc.back().theta == Catch::Approx(0.5 * cfg.horizon));
  }
}
