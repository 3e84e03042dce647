#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "desolder/controller.hpp"
#include "desolder/detector.hpp"
#include "desolder/phase.hpp"
#include "desolder/plant.hpp"

namespace desolder {

// Configuration or validation failure; maps to CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// I/O failure; maps to CLI exit code 3.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ComponentGeometry {
  double width_mm = 20.0;
  double length_mm = 20.0;
  double height_mm = 5.0;
  double clearance_mm = 6.0;

  void validate() const;
};

struct Scenario {
  std::string label = "scenario";
  std::uint64_t seed = 1;
  double duration_cap = 60.0;  // s

  ComponentGeometry component;
  PlantParams plant;
  ControllerConfig controller;
  DetectorConfig detector;
  JamParams jam;
  Vec3 transport_target{0.15, 0.10, 0.05};

  // Approach geometry.
  double approach_height = 5e-3;  // m, tool start above the board
  double face_gap = 5e-4;         // m, initial gap between tool face and component

  // Actuation delays.
  double grasp_time = 0.5;    // s, gripper close before the outcome draw
  double release_time = 0.2;  // s
  double arrival_tol = 5e-4;  // m

  void validate() const;
};

// Strict JSON parse: unknown keys rejected, missing keys defaulted, all
// invariants validated. Throws ConfigError.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);

struct TraceSample {
  double t = 0.0;
  double x = 0.0, y = 0.0, z = 0.0;     // tool position [m]
  double fx = 0.0, fy = 0.0, fz = 0.0;  // sensed force [N]
  double temperature = 0.0;             // degC
  double phi = 0.0;
  double disp = 0.0;                    // m
  Phase phase = Phase::Approach;
  std::string event;  // empty when no event fired this step
};

struct RunReport {
  bool desolder_success = false;
  bool grasp_success = false;
  bool early_motion = false;  // component moved before the solder reached T_melt
  std::optional<double> time_to_contact;     // s from run start (heating-air onset)
  std::optional<double> time_to_settle;
  std::optional<double> time_to_melt_onset;
  std::optional<double> time_to_removal;
  std::string fault;  // empty, "GraspFailed", or "Timeout(<phase>)"
  std::uint64_t seed = 0;
};

struct RunResult {
  RunReport report;
  std::vector<TraceSample> trace;
};

// Fixed-step loop: detectors -> phase transition -> profile -> controller ->
// plant. Deterministic per seed. The environment variable DESOLDER_SIM_DT_US
// (integer microseconds) overrides plant dt when set.
RunResult run_scenario(const Scenario& s);

struct BatchReport {
  std::vector<RunReport> trials;
  std::size_t desolder_count = 0;
  std::size_t grasp_count = 0;
  double desolder_rate = 0.0;
  double grasp_rate = 0.0;
};

BatchReport run_batch(const Scenario& s, std::size_t trials, std::size_t jobs = 1);

void write_trace(const std::vector<TraceSample>& trace, std::ostream& out);
void write_trace_file(const std::vector<TraceSample>& trace, const std::string& path);
std::vector<TraceSample> read_trace(std::istream& in);

std::string report_to_json(const RunReport& r);
std::string batch_report_to_json(const BatchReport& b);
void write_text_file(const std::string& text, const std::string& path);

}  // namespace desolder
