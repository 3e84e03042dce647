#pragma once

#include "desolder/core.hpp"

namespace desolder {

// Thermal state of the solder seam. melt_fraction is the fraction of the
// latent budget already absorbed: 0 = solid, 1 = fully molten.
struct SolderState {
  double temperature = 25.0;    // degC
  double melt_fraction = 0.0;   // [0, 1]
  double latent_budget = 273.0; // J to go from phi=0 to phi=1
};

struct ComponentState {
  double displacement = 0.0;  // m, slide distance along -y from the soldered seat
  bool moving = false;        // adhesion bond broken
  bool grasped = false;
};

struct PlantState {
  Pose tool_pose;
  Vec3 tool_velocity;
  SolderState solder;
  ComponentState component;
  bool contact_board = false;
  bool contact_component = false;
  bool heating_air_on = false;
  double time = 0.0;
  double slide_rate = 0.0;  // m/s, component slide speed from the last step
};

struct PlantParams {
  // Contact springs/dampers.
  double k_n = 5e4;  // N/m, board normal stiffness
  double d_n = 50.0; // N*s/m
  double k_t = 2e4;  // N/m, component face stiffness
  double d_t = 20.0; // N*s/m

  // Lumped-capacitance thermal model.
  double C_th = 20.0;    // J/K
  double h_air = 2.0;    // W/K
  double h_plate = 0.5;  // W/K
  double T_air = 300.0;  // degC
  double T_plate = 120.0;
  double T_melt = 183.0; // eutectic Sn-Pb
  double T0 = 25.0;
  double E_L = 273.0;    // J, latent budget used to initialize SolderState

  // Solder holding model.
  double F_break = 30.0; // N, solid-seam adhesion
  double F_res = 0.5;    // N, residual molten resistance

  // Slide dynamics. The unmolten part of the seam blocks advance beyond
  // seat_play + seat_len * phi; a broken-away component slides against
  // F_res plus viscous drag b_slide * v.
  double b_slide = 50.0;    // N*s/m
  double seat_len = 5.1e-3; // m, seam length released in proportion to phi
  double seat_play = 2e-4;  // m, free play available once adhesion breaks

  // Robot velocity tracking.
  double tau_r = 0.05; // s
  double v_max = 0.1;  // m/s
  double dt = 1e-3;    // s

  // Component geometry (board frame; exposed face on the +y side).
  double comp_face_y = 0.01;   // m
  double comp_height = 0.005;  // m

  void validate() const;
};

// First-order lag toward the (clamped) commanded velocity.
Vec3 robot_tracking_step(const Vec3& v_actual, const Vec3& v_cmd, const PlantParams& params);

// One explicit-Euler thermal step. Sensible heating below T_melt, latent
// absorption pinned at T_melt, sensible again once fully molten. Energy is
// conserved exactly against the inflow evaluated at the pre-step temperature.
SolderState solder_thermal_step(const SolderState& s, bool heating_air_on,
                                const PlantParams& params);

// Lateral force the seam can resist before the component slides.
double holding_force(double phi, const PlantParams& params);

// Contact reaction acting on the tool (positive z resists descent, positive
// y opposes the -y push).
ToolWrench contact_wrench(const PlantState& state, const PlantParams& params);

struct PlantStepResult {
  PlantState state;
  // Wrench sensed at the tool: the force the tool applies to the
  // environment, so a 20 N push along -y reads as force.y == -20.
  ToolWrench measured;
};

PlantStepResult plant_step(const PlantState& state, const Vec3& v_cmd,
                           const PlantParams& params);

PlantState initial_plant_state(const PlantParams& params, const Vec3& tool_start);

}  // namespace desolder
