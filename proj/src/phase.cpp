#include "desolder/phase.hpp"

#include <stdexcept>

namespace desolder {

std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::Approach: return "Approach";
    case Phase::Contact: return "Contact";
    case Phase::Melting: return "Melting";
    case Phase::Grasping: return "Grasping";
    case Phase::Transport: return "Transport";
    case Phase::Release: return "Release";
    case Phase::Done: return "Done";
    case Phase::Fault: return "Fault";
  }
  return "?";
}

std::string_view event_name(EventType e) {
  switch (e) {
    case EventType::ContactDetected: return "ContactDetected";
    case EventType::ForceSettled: return "ForceSettled";
    case EventType::MeltOnset: return "MeltOnset";
    case EventType::RemovalComplete: return "RemovalComplete";
    case EventType::GraspSecured: return "GraspSecured";
    case EventType::GraspFailed: return "GraspFailed";
    case EventType::Arrived: return "Arrived";
    case EventType::Released: return "Released";
    case EventType::Timeout: return "Timeout";
  }
  return "?";
}

Phase transition(Phase p, EventType e) {
  if (is_terminal(p)) throw std::logic_error("transition: phase machine is terminal");
  if (e == EventType::Timeout) return Phase::Fault;
  switch (p) {
    case Phase::Approach:
      return e == EventType::ContactDetected ? Phase::Contact : p;
    case Phase::Contact:
      return e == EventType::ForceSettled ? Phase::Melting : p;
    case Phase::Melting:
      return e == EventType::RemovalComplete ? Phase::Grasping : p;
    case Phase::Grasping:
      if (e == EventType::GraspSecured) return Phase::Transport;
      if (e == EventType::GraspFailed) return Phase::Fault;
      return p;
    case Phase::Transport:
      return e == EventType::Arrived ? Phase::Release : p;
    case Phase::Release:
      return e == EventType::Released ? Phase::Done : p;
    default:
      return p;
  }
}

PhaseProfile phase_profile(Phase p, const ControllerConfig& cfg) {
  if (is_terminal(p)) throw std::logic_error("phase_profile: phase machine is terminal");
  PhaseProfile prof;
  switch (p) {
    case Phase::Approach:
      prof.modes = {AxisMode::hold(), AxisMode::hold(), AxisMode::velocity(-cfg.v_app)};
      break;
    case Phase::Contact:
    case Phase::Melting:
      prof.modes = {AxisMode::compliant(), AxisMode::force(cfg.f_d), AxisMode::compliant()};
      prof.heating_air_on = true;
      break;
    case Phase::Grasping:
      prof.modes = {AxisMode::hold(), AxisMode::hold(), AxisMode::hold()};
      prof.heating_air_on = true;
      prof.grasp_actuate = true;
      break;
    case Phase::Transport:
      prof.modes = {AxisMode::velocity(0.0), AxisMode::velocity(0.0), AxisMode::velocity(0.0)};
      prof.heating_air_on = true;
      prof.transport_active = true;
      break;
    case Phase::Release:
      prof.modes = {AxisMode::hold(), AxisMode::hold(), AxisMode::hold()};
      prof.heating_air_on = true;
      prof.release_actuate = true;
      break;
    default:
      break;
  }
  return prof;
}

}  // namespace desolder
