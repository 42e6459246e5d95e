#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "povnav/control.hpp"

using namespace povnav;

namespace {

ServoGains gains() {
  ServoGains g;
  g.k_v = 0.02;
  g.k_w = 1.5;
  g.v_max = 1.0;
  g.w_max = 1.0;
  g.lambda_stop = 60.0;
  g.lambda0 = 150.0;
  return g;
}

std::array<double, 2> err(double lambda, double phi, const ServoGains& g) {
  return {lambda - g.lambda0, phi};
}

}  // namespace

TEST_CASE("servo gain validation") {
  CHECK_NOTHROW(gains().validate());
  ServoGains g = gains();
  g.k_v = 0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = gains();
  g.lambda_stop = g.lambda0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("servo fixed points") {
  const ServoGains g = gains();

  SECTION("clear ahead, aligned: full speed, no turn") {
    const auto cmd = servo(err(1000, 0.0, g), g);
    CHECK(cmd.v == Catch::Approx(g.v_max));
    CHECK(cmd.w == 0.0);
    CHECK(cmd.status == DriveStatus::running);
  }
  SECTION("at or below the stop range: no forward motion") {
    CHECK(servo(err(g.lambda_stop, 0.0, g), g).v == 0.0);
    CHECK(servo(err(10.0, 0.0, g), g).v == 0.0);
    CHECK(servo(err(0.0, 0.0, g), g).v == 0.0);
  }
  SECTION("proportional band") {
    // lambda = 110: v = 0.02 * 50 = 1.0 exactly at the cap
    CHECK(servo(err(110, 0.0, g), g).v == Catch::Approx(1.0));
    // lambda = 85: v = 0.02 * 25 = 0.5
    CHECK(servo(err(85, 0.0, g), g).v == Catch::Approx(0.5));
  }
  SECTION("turn command is proportional and opposite the deviation") {
    CHECK(servo(err(1000, 0.3, g), g).w == Catch::Approx(-0.45));
    CHECK(servo(err(1000, -0.3, g), g).w == Catch::Approx(0.45));
    // saturation
    CHECK(servo(err(1000, 1.5, g), g).w == Catch::Approx(-g.w_max));
  }
  SECTION("hard deviation scales the forward speed down") {
    const auto straight = servo(err(1000, 0.0, g), g);
    const auto turning = servo(err(1000, 1.0, g), g);
    CHECK(turning.v == Catch::Approx(straight.v * std::cos(1.0)));
    // a quarter-turn deviation parks the robot
    CHECK(servo(err(1000, kPi / 2, g), g).v == Catch::Approx(0.0).margin(1e-12));
  }
}

TEST_CASE("servo invariants under fuzz") {
  const ServoGains g = gains();
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> ulam(0.0, 400.0);
  std::uniform_real_distribution<double> uphi(-kPi / 2, kPi / 2);
  for (int i = 0; i < 2000; ++i) {
    const double lam = ulam(rng), phi = uphi(rng);
    const auto cmd = servo(err(lam, phi, g), g);
    CHECK(cmd.v >= 0.0);
    CHECK(cmd.v <= g.v_max);
    CHECK(std::fabs(cmd.w) <= g.w_max);
    // steering always opposes the deviation
    if (phi > 1e-9) CHECK(cmd.w < 0.0);
    if (phi < -1e-9) CHECK(cmd.w > 0.0);
    if (std::fabs(phi) < 1e-12) CHECK(cmd.w == 0.0);
  }

  SECTION("forward speed is monotone in the clearance") {
    std::mt19937 rng2(18);
    for (int i = 0; i < 500; ++i) {
      const double phi = uphi(rng2);
      const double l1 = ulam(rng2), l2 = ulam(rng2);
      const double lo = std::min(l1, l2), hi = std::max(l1, l2);
      CHECK(servo(err(lo, phi, g), g).v <= servo(err(hi, phi, g), g).v + 1e-12);
    }
  }
}

TEST_CASE("blocked recovery rotates toward the goal side") {
  const ServoGains g = gains();
  const auto left = servo_blocked(g, 0.8);
  CHECK(left.v == 0.0);
  CHECK(left.w == Catch::Approx(g.w_max / 2));
  CHECK(left.status == DriveStatus::stopped_blocked);
  const auto right = servo_blocked(g, -0.8);
  CHECK(right.w == Catch::Approx(-g.w_max / 2));
  // degenerate zero bearing turns a consistent way
  CHECK(servo_blocked(g, 0.0).w == Catch::Approx(g.w_max / 2));
}

TEST_CASE("camera-to-body transfer") {
  ControlCommand cmd;
  cmd.v = 0.8;
  cmd.w = 0.5;

  SECTION("centered mount is the identity") {
    const auto out = camera_to_body(cmd, 0.0);
    CHECK(out.v == cmd.v);
    CHECK(out.w == cmd.w);
  }
  SECTION("matches a finite-difference rigid-body check") {
    // body twist (v, w); a camera at body-frame (0, d) has world-forward
    // speed v - w d, so commanding v_c at the camera needs v = v_c + w d
    const double d = 0.2;
    const auto out = camera_to_body(cmd, d);
    CHECK(out.v == Catch::Approx(0.8 + 0.5 * 0.2));
    const double dt = 1e-7;
    // integrate the body twist; the camera point's x-velocity at t=0
    const double cam_x0 = 0.0;  // body at origin, camera at (0, d)
    const double body_x = out.v * dt;
    const double cam_x1 = body_x - d * std::sin(out.w * dt);
    const double observed_vc = (cam_x1 - cam_x0) / dt;
    CHECK(observed_vc == Catch::Approx(cmd.v).margin(1e-5));
  }
  SECTION("never commands reverse") {
    ControlCommand back;
    back.v = 0.1;
    back.w = -2.0;
    CHECK(camera_to_body(back, 0.5).v == 0.0);
  }
}

TEST_CASE("goal proximity check is inclusive") {
  GoalSpec goal{3.0, 4.0, 5.0};
  CHECK(goal_check({0, 0, 0}, goal));          // exactly on the boundary
  CHECK(goal_check({3, 4, 1.2}, goal));        // at the center
  CHECK_FALSE(goal_check({-0.01, 0, 0}, goal));
  CHECK(goal_check({3, -1, 0}, goal));
}
