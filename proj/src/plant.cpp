#include "desolder/plant.hpp"

#include <algorithm>

namespace desolder {

namespace {

double clamp_abs(double v, double limit) { return std::clamp(v, -limit, limit); }

}  // namespace

void PlantParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string("plant.") + name + " must be positive");
  };
  positive(k_n, "k_n");
  positive(k_t, "k_t");
  positive(d_n, "d_n");
  positive(d_t, "d_t");
  positive(C_th, "C_th");
  positive(tau_r, "tau_r");
  positive(v_max, "v_max");
  positive(dt, "dt");
  positive(E_L, "E_L");
  positive(b_slide, "b_slide");
  positive(seat_len, "seat_len");
  if (h_air < 0.0 || h_plate < 0.0)
    throw std::invalid_argument("plant.h_air and plant.h_plate must be non-negative");
  if (seat_play < 0.0) throw std::invalid_argument("plant.seat_play must be non-negative");
  if (!(F_res >= 0.0)) throw std::invalid_argument("plant.F_res must be non-negative");
  if (!(F_break > F_res)) throw std::invalid_argument("plant.F_break must exceed plant.F_res");
  if (!(T_melt > T0)) throw std::invalid_argument("plant.T_melt must exceed plant.T0");
  if (h_air > 0.0 && !(T_air > T_melt))
    throw std::invalid_argument("plant.T_air must exceed plant.T_melt when air heating is enabled");
}

Vec3 robot_tracking_step(const Vec3& v_actual, const Vec3& v_cmd, const PlantParams& params) {
  if (!v_actual.finite() || !v_cmd.finite())
    throw std::invalid_argument("robot_tracking_step: non-finite velocity");
  const Vec3 target{clamp_abs(v_cmd.x, params.v_max), clamp_abs(v_cmd.y, params.v_max),
                    clamp_abs(v_cmd.z, params.v_max)};
  const double a = params.dt / params.tau_r;
  return v_actual + (target - v_actual) * a;
}

SolderState solder_thermal_step(const SolderState& s, bool heating_air_on,
                                const PlantParams& params) {
  SolderState out = s;
  const double P = (heating_air_on ? params.h_air * (params.T_air - s.temperature) : 0.0) +
                   params.h_plate * (params.T_plate - s.temperature);
  double energy = P * params.dt;

  if (s.temperature < params.T_melt) {
    const double to_melt = params.C_th * (params.T_melt - s.temperature);
    if (energy <= to_melt) {
      out.temperature = s.temperature + energy / params.C_th;
      return out;
    }
    out.temperature = params.T_melt;
    energy -= to_melt;
  }

  if (out.melt_fraction < 1.0 && out.temperature >= params.T_melt) {
    if (energy > 0.0) {
      const double to_full = (1.0 - out.melt_fraction) * s.latent_budget;
      const double absorbed = std::min(energy, to_full);
      out.melt_fraction += absorbed / s.latent_budget;
      energy -= absorbed;
      if (out.melt_fraction > 1.0) out.melt_fraction = 1.0;
    }
    // Negative net inflow at the melting point cools the seam; refreezing is
    // not modeled, so phi stays put.
  }

  out.temperature += energy / params.C_th;
  return out;
}

double holding_force(double phi, const PlantParams& params) {
  if (!(phi >= 0.0 && phi <= 1.0))
    throw std::invalid_argument("holding_force: melt fraction outside [0,1]");
  return params.F_res + (1.0 - phi) * (params.F_break - params.F_res);
}

ToolWrench contact_wrench(const PlantState& state, const PlantParams& params) {
  ToolWrench w;
  const Vec3& p = state.tool_pose.position;
  const Vec3& v = state.tool_velocity;

  const double dz = -p.z;
  if (dz > 0.0) {
    const double dz_rate = -v.z;
    w.force.z = std::max(0.0, params.k_n * dz + params.d_n * dz_rate);
  }

  if (!state.component.grasped && p.z < params.comp_height) {
    const double face = params.comp_face_y - state.component.displacement;
    const double dy = face - p.y;
    if (dy > 0.0) {
      const double dy_rate = -state.slide_rate - v.y;
      w.force.y = std::max(0.0, params.k_t * dy + params.d_t * dy_rate);
    }
  }
  return w;
}

PlantStepResult plant_step(const PlantState& state, const Vec3& v_cmd,
                           const PlantParams& params) {
  if (!state.tool_pose.position.finite() || !state.tool_velocity.finite() ||
      !std::isfinite(state.solder.temperature) || !std::isfinite(state.component.displacement))
    throw std::invalid_argument("plant_step: non-finite state");
  if (!v_cmd.finite()) throw std::invalid_argument("plant_step: non-finite command");

  PlantState next = state;
  next.tool_velocity = robot_tracking_step(state.tool_velocity, v_cmd, params);
  next.tool_pose.position = state.tool_pose.position + next.tool_velocity * params.dt;

  const ToolWrench reaction = contact_wrench(next, params);
  next.contact_board = reaction.force.z > 0.0;
  next.contact_component = reaction.force.y > 0.0;

  // Component slide. Adhesion breaks the first time the push reaches the
  // holding force; afterwards the component slides against the residual
  // resistance but cannot advance past the melt front.
  next.slide_rate = 0.0;
  if (!next.component.grasped) {
    const double push = reaction.force.y;
    if (!next.component.moving &&
        push >= holding_force(state.solder.melt_fraction, params)) {
      next.component.moving = true;
    }
    if (next.component.moving) {
      const double allowance =
          params.seat_play + params.seat_len * state.solder.melt_fraction;
      const double v_free = std::max(0.0, (push - params.F_res) / params.b_slide);
      const double s_new = std::min(state.component.displacement + v_free * params.dt,
                                    std::max(allowance, state.component.displacement));
      next.slide_rate = (s_new - state.component.displacement) / params.dt;
      next.component.displacement = s_new;
    }
  }

  next.solder = solder_thermal_step(state.solder, state.heating_air_on, params);
  next.time = state.time + params.dt;

  return {next, ToolWrench{-reaction.force, -reaction.torque}};
}

PlantState initial_plant_state(const PlantParams& params, const Vec3& tool_start) {
  PlantState s;
  s.tool_pose.position = tool_start;
  s.solder.temperature = params.T0;
  s.solder.latent_budget = params.E_L;
  return s;
}

}  // namespace desolder
