#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "desolder/controller.hpp"
#include "desolder/plant.hpp"

using namespace desolder;

TEST_CASE("config validation names the field") {
  ControllerConfig c;
  CHECK_NOTHROW(c.validate());
  c.Kp = 0.0;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("controller.Kp"), std::invalid_argument);
  c = ControllerConfig{};
  c.I_max = -1.0;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("controller.I_max"),
                       std::invalid_argument);
}

TEST_CASE("force loop: zero error and pure-proportional checks") {
  ControllerConfig c;
  // At the setpoint with an empty integrator the command is zero.
  auto r = force_control_step(0.0, -20.0, -20.0, c);
  CHECK(r.velocity == 0.0);
  CHECK(r.integrator == 0.0);

  // Proportional term only (one step, Ki contribution is Ki*e*dt):
  // e = -20 - 0 = -20, v = 2e-3 * -20 + 4e-3 * -20 * 1e-3 = -0.04 - 8e-5.
  r = force_control_step(0.0, 0.0, -20.0, c);
  CHECK(r.integrator == doctest::Approx(-8e-5));
  CHECK(r.velocity == doctest::Approx(-0.04 - 8e-5));
}

TEST_CASE("force loop: anti-windup clamps the integrator") {
  ControllerConfig c;
  double I = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto r = force_control_step(I, 0.0, -20.0, c);
    I = r.integrator;
    REQUIRE(std::abs(I) <= c.I_max + 1e-15);
  }
  CHECK(I == doctest::Approx(-c.I_max));
  // And it unwinds when the error flips.
  for (int i = 0; i < 10000; ++i) I = force_control_step(I, -40.0, -20.0, c).integrator;
  CHECK(I == doctest::Approx(c.I_max));
}

TEST_CASE("force loop: integrator bounded under arbitrary force streams") {
  ControllerConfig c;
  SplitMix64 rng(0xAB);
  for (int trial = 0; trial < 100; ++trial) {
    double I = (rng.uniform01() - 0.5) * 2.0 * c.I_max;
    for (int i = 0; i < 200; ++i) {
      const double f = (rng.uniform01() - 0.5) * 200.0;
      const auto r = force_control_step(I, f, c.f_d, c);
      I = r.integrator;
      REQUIRE(std::abs(I) <= c.I_max + 1e-15);
      REQUIRE(std::isfinite(r.velocity));
    }
  }
}

TEST_CASE("compliance: gain and clamp") {
  ControllerConfig c;
  CHECK(compliance_step(10.0, c) == doctest::Approx(0.01));
  CHECK(compliance_step(-10.0, c) == doctest::Approx(-0.01));
  CHECK(compliance_step(1000.0, c) == doctest::Approx(c.v_max));
  CHECK(compliance_step(-1000.0, c) == doctest::Approx(-c.v_max));
  CHECK_THROWS_AS(compliance_step(NAN, c), std::invalid_argument);
}

TEST_CASE("controller_step: approach profile passes velocity through") {
  ControllerConfig c;
  ControllerState cs;
  cs.modes = {AxisMode::hold(), AxisMode::hold(), AxisMode::velocity(-c.v_app)};
  cs.hold_reference = {0.0, 0.0, 0.0};
  const auto [v, ns] = controller_step(cs, ToolWrench{}, {0, 0, 5e-3}, c);
  CHECK(v.x == 0.0);
  CHECK(v.y == 0.0);
  CHECK(v.z == doctest::Approx(-0.02));
}

TEST_CASE("controller_step: hold axes servo back to the reference") {
  ControllerConfig c;
  ControllerState cs;
  cs.modes = {AxisMode::hold(), AxisMode::hold(), AxisMode::hold()};
  cs.hold_reference = {1e-3, 0.0, -2e-3};
  const auto [v, ns] = controller_step(cs, ToolWrench{}, {0, 0, 0}, c);
  CHECK(v.x == doctest::Approx(c.hold_gain * 1e-3));
  CHECK(v.y == 0.0);
  CHECK(v.z == doctest::Approx(c.hold_gain * -2e-3));
  // At the reference the command is zero.
  const auto [v0, ns0] = controller_step(cs, ToolWrench{}, cs.hold_reference, c);
  CHECK(v0.norm() == 0.0);
}

TEST_CASE("controller_step: extraction profile routes every axis") {
  ControllerConfig c;
  ControllerState cs;
  cs.modes = {AxisMode::compliant(), AxisMode::force(c.f_d), AxisMode::compliant()};
  // Sensed wrench (force tool applies to environment): the tool leans +x
  // with 5 N, pushes the face with 20 N (-y), presses the board with 3 N
  // (-z). Compliant axes back away from the contact; y is at setpoint.
  const ToolWrench w{{5.0, -20.0, -3.0}, {0, 0, 0}};
  const auto [v, ns] = controller_step(cs, w, {0, 0, 0}, c);
  CHECK(v.x == doctest::Approx(-0.005));  // retreat from the +x lean
  CHECK(v.y == doctest::Approx(0.0));
  CHECK(v.z == doctest::Approx(0.003));   // lift off the board
  CHECK(ns.integrator == doctest::Approx(0.0));
}

TEST_CASE("controller_step: output always clamped to v_max") {
  ControllerConfig c;
  SplitMix64 rng(0x51);
  for (int i = 0; i < 5000; ++i) {
    ControllerState cs;
    const auto pick = [&](int k) {
      switch (k % 4) {
        case 0: return AxisMode::force(c.f_d);
        case 1: return AxisMode::compliant();
        case 2: return AxisMode::velocity((rng.uniform01() - 0.5) * 1.0);
        default: return AxisMode::hold();
      }
    };
    cs.modes = {pick(static_cast<int>(rng.next() % 4)), pick(static_cast<int>(rng.next() % 4)),
                pick(static_cast<int>(rng.next() % 4))};
    cs.integrator = (rng.uniform01() - 0.5) * 2.0 * c.I_max;
    cs.hold_reference = {(rng.uniform01() - 0.5), (rng.uniform01() - 0.5),
                         (rng.uniform01() - 0.5)};
    const ToolWrench w{{(rng.uniform01() - 0.5) * 400.0, (rng.uniform01() - 0.5) * 400.0,
                        (rng.uniform01() - 0.5) * 400.0},
                       {0, 0, 0}};
    const Vec3 pos{(rng.uniform01() - 0.5), (rng.uniform01() - 0.5), (rng.uniform01() - 0.5)};
    const auto [v, ns] = controller_step(cs, w, pos, c);
    REQUIRE(std::abs(v.x) <= c.v_max + 1e-15);
    REQUIRE(std::abs(v.y) <= c.v_max + 1e-15);
    REQUIRE(std::abs(v.z) <= c.v_max + 1e-15);
    REQUIRE(std::abs(ns.integrator) <= c.I_max + 1e-15);
  }
}

TEST_CASE("controller_step: axes do not cross-couple") {
  ControllerConfig c;
  ControllerState cs;
  cs.modes = {AxisMode::velocity(0.01), AxisMode::force(c.f_d), AxisMode::hold()};
  cs.hold_reference = {0, 0, 0};
  const ToolWrench a{{100.0, -20.0, 0.0}, {0, 0, 0}};
  const ToolWrench b{{-100.0, -20.0, 0.0}, {0, 0, 0}};
  const auto [va, na] = controller_step(cs, a, {0, 0, 0}, c);
  const auto [vb, nb] = controller_step(cs, b, {0, 0, 0}, c);
  // fx changed; x is velocity-profiled so nothing else may move.
  CHECK(va.x == vb.x);
  CHECK(va.y == vb.y);
  CHECK(va.z == vb.z);
  CHECK(na.integrator == nb.integrator);
}

namespace {

// Closed loop against the lateral contact spring: tool face pressed by the
// PI loop against k_t with the robot's first-order tracking lag, setpoint
// ramped over ramp_time as deployed.
struct LoopResult {
  double settle_time = -1.0;  // first time |e| <= eps_f and stays there
  double peak_force = 0.0;    // most negative sensed fy
};

LoopResult run_force_loop(const ControllerConfig& c, double k_t, double seconds) {
  PlantParams p;
  p.k_t = k_t;
  p.F_break = 1e9;  // seam never yields; pure regulation problem
  ControllerState cs;
  cs.modes = {AxisMode::hold(), AxisMode::force(c.f_d), AxisMode::hold()};
  PlantState s = initial_plant_state(p, {0.0, p.comp_face_y - 1e-5, 1e-3});
  cs.hold_reference = s.tool_pose.position;
  ToolWrench sensed{};
  LoopResult out;
  const int n = static_cast<int>(seconds / p.dt);
  for (int i = 0; i < n; ++i) {
    const double t = s.time;
    const double ramp = c.ramp_time > 0.0 ? std::min(1.0, t / c.ramp_time) : 1.0;
    cs.modes[1] = AxisMode::force(c.f_d * ramp);
    auto [v, ns] = controller_step(cs, sensed, s.tool_pose.position, c);
    cs = ns;
    const auto r = plant_step(s, v, p);
    s = r.state;
    sensed = r.measured;
    out.peak_force = std::min(out.peak_force, sensed.force.y);
    if (std::abs(sensed.force.y - c.f_d) <= c.eps_f) {
      if (out.settle_time < 0.0) out.settle_time = s.time;
    } else {
      out.settle_time = -1.0;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("closed loop: settles to -20 N within 2 s without gross overshoot") {
  ControllerConfig c;
  const LoopResult r = run_force_loop(c, 2e4, 4.0);
  REQUIRE(r.settle_time > 0.0);
  CHECK(r.settle_time < 2.0);
  CHECK(r.peak_force > -25.0);  // no more than 25% overshoot past the setpoint
}

TEST_CASE("closed loop: steady-state accuracy across contact stiffnesses") {
  ControllerConfig c;
  SplitMix64 rng(0xC1);
  for (int trial = 0; trial < 8; ++trial) {
    const double k_t = 5e3 + rng.uniform01() * 4.5e4;  // 5e3 .. 5e4 N/m
    const LoopResult r = run_force_loop(c, k_t, 5.0);
    CAPTURE(k_t);
    REQUIRE(r.settle_time > 0.0);
    CHECK(r.settle_time < 3.0);
  }
}
