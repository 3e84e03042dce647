#pragma once

#include <array>
#include <utility>

#include "desolder/core.hpp"

namespace desolder {

enum class AxisModeKind { ForceRegulate, Compliant, VelocityProfile, Hold };

struct AxisMode {
  AxisModeKind kind = AxisModeKind::Hold;
  // ForceRegulate: force setpoint [N]; VelocityProfile: velocity [m/s];
  // Compliant and Hold ignore it.
  double value = 0.0;

  static AxisMode force(double setpoint) { return {AxisModeKind::ForceRegulate, setpoint}; }
  static AxisMode compliant() { return {AxisModeKind::Compliant, 0.0}; }
  static AxisMode velocity(double v) { return {AxisModeKind::VelocityProfile, v}; }
  static AxisMode hold() { return {AxisModeKind::Hold, 0.0}; }
};

struct ControllerConfig {
  double f_d = -20.0;       // N, extraction-axis force setpoint
  double Kp = 2e-3;         // m/(s*N)
  double Ki = 4e-3;         // m/(s^2*N)
  double I_max = 0.05;      // m/s, integrator clamp
  double C = 1e-3;          // m/(s*N), compliance gain
  double v_app = 0.02;      // m/s, approach speed
  double eps_f = 0.5;       // N, settle tolerance
  double settle_hold = 0.2; // s
  double ramp_time = 0.5;   // s, force setpoint ramp after contact
  double v_max = 0.1;       // m/s, command clamp
  double hold_gain = 5.0;   // 1/s, proportional position hold
  double dt = 1e-3;         // s

  void validate() const;
};

struct ControllerState {
  std::array<AxisMode, 3> modes{};  // x, y, z
  double integrator = 0.0;          // m/s, force-loop integral term
  Vec3 hold_reference;              // m, reference for Hold axes
};

struct ForceStepResult {
  double velocity = 0.0;
  double integrator = 0.0;
};

// PI force regulation: e = setpoint - f_meas, v = Kp*e + I with the
// integrator clamped to +/- I_max before use.
ForceStepResult force_control_step(double integrator, double f_meas, double setpoint,
                                   const ControllerConfig& cfg);

// Compliance yield: v = C * f_ext, clamped, where f_ext is the external
// force acting on the tool along the axis.
double compliance_step(double f_ext, const ControllerConfig& cfg);

// Route each axis through its mode. `measured` uses the sensed convention
// (force the tool applies to the environment); compliant axes yield against
// it, i.e. along -measured.
std::pair<Vec3, ControllerState> controller_step(const ControllerState& cs,
                                                 const ToolWrench& measured,
                                                 const Vec3& tool_position,
                                                 const ControllerConfig& cfg);

}  // namespace desolder
