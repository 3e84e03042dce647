#include "desolder/controller.hpp"

#include <algorithm>

namespace desolder {

namespace {

double clamp_abs(double v, double limit) { return std::clamp(v, -limit, limit); }

}  // namespace

void ControllerConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string("controller.") + name + " must be positive");
  };
  positive(Kp, "Kp");
  positive(Ki, "Ki");
  positive(C, "C");
  positive(I_max, "I_max");
  positive(v_app, "v_app");
  positive(eps_f, "eps_f");
  positive(settle_hold, "settle_hold");
  positive(v_max, "v_max");
  positive(hold_gain, "hold_gain");
  positive(dt, "dt");
  if (ramp_time < 0.0)
    throw std::invalid_argument("controller.ramp_time must be non-negative");
  if (!std::isfinite(f_d)) throw std::invalid_argument("controller.f_d must be finite");
}

ForceStepResult force_control_step(double integrator, double f_meas, double setpoint,
                                   const ControllerConfig& cfg) {
  if (!std::isfinite(integrator) || !std::isfinite(f_meas) || !std::isfinite(setpoint))
    throw std::invalid_argument("force_control_step: non-finite input");
  const double e = setpoint - f_meas;
  const double i = clamp_abs(integrator + cfg.Ki * e * cfg.dt, cfg.I_max);
  return {cfg.Kp * e + i, i};
}

double compliance_step(double f_ext, const ControllerConfig& cfg) {
  if (!std::isfinite(f_ext)) throw std::invalid_argument("compliance_step: non-finite input");
  return clamp_abs(cfg.C * f_ext, cfg.v_max);
}

std::pair<Vec3, ControllerState> controller_step(const ControllerState& cs,
                                                 const ToolWrench& measured,
                                                 const Vec3& tool_position,
                                                 const ControllerConfig& cfg) {
  if (!measured.finite() || !tool_position.finite())
    throw std::invalid_argument("controller_step: non-finite input");

  ControllerState next = cs;
  const double meas[3] = {measured.force.x, measured.force.y, measured.force.z};
  const double pos[3] = {tool_position.x, tool_position.y, tool_position.z};
  const double ref[3] = {cs.hold_reference.x, cs.hold_reference.y, cs.hold_reference.z};
  double v[3] = {0.0, 0.0, 0.0};

  for (int a = 0; a < 3; ++a) {
    const AxisMode& mode = cs.modes[static_cast<std::size_t>(a)];
    switch (mode.kind) {
      case AxisModeKind::ForceRegulate: {
        const ForceStepResult r = force_control_step(cs.integrator, meas[a], mode.value, cfg);
        next.integrator = r.integrator;
        v[a] = r.velocity;
        break;
      }
      case AxisModeKind::Compliant:
        v[a] = compliance_step(-meas[a], cfg);
        break;
      case AxisModeKind::VelocityProfile:
        v[a] = mode.value;
        break;
      case AxisModeKind::Hold:
        v[a] = cfg.hold_gain * (ref[a] - pos[a]);
        break;
    }
    v[a] = clamp_abs(v[a], cfg.v_max);
  }

  return {Vec3{v[0], v[1], v[2]}, next};
}

}  // namespace desolder
