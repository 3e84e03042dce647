#pragma once

#include <array>
#include <string_view>

#include "desolder/controller.hpp"

namespace desolder {

enum class Phase { Approach, Contact, Melting, Grasping, Transport, Release, Done, Fault };

enum class EventType {
  ContactDetected,
  ForceSettled,
  MeltOnset,
  RemovalComplete,
  GraspSecured,
  GraspFailed,
  Arrived,
  Released,
  Timeout,
};

struct Event {
  EventType type;
  double t = 0.0;
  Phase timeout_phase = Phase::Approach;  // meaningful for Timeout only
};

constexpr std::array<Phase, 8> kAllPhases = {Phase::Approach, Phase::Contact, Phase::Melting,
                                             Phase::Grasping, Phase::Transport, Phase::Release,
                                             Phase::Done,     Phase::Fault};

constexpr std::array<EventType, 9> kAllEvents = {
    EventType::ContactDetected, EventType::ForceSettled, EventType::MeltOnset,
    EventType::RemovalComplete, EventType::GraspSecured, EventType::GraspFailed,
    EventType::Arrived,         EventType::Released,     EventType::Timeout};

inline bool is_terminal(Phase p) { return p == Phase::Done || p == Phase::Fault; }

std::string_view phase_name(Phase p);
std::string_view event_name(EventType e);

// Process transition table. Unlisted (phase, event) pairs leave the phase
// unchanged; any Timeout faults; calling on a terminal phase throws.
Phase transition(Phase p, EventType e);

struct PhaseProfile {
  std::array<AxisMode, 3> modes{};  // x, y, z
  bool heating_air_on = false;
  bool grasp_actuate = false;
  bool release_actuate = false;
  bool transport_active = false;  // harness steers axes toward the transport target
};

// Axis-mode/heater profile for a phase. The y ForceRegulate setpoint is the
// full f_d; the harness ramps it over cfg.ramp_time after entering Contact.
PhaseProfile phase_profile(Phase p, const ControllerConfig& cfg);

}  // namespace desolder
