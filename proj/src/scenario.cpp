#include "desolder/scenario.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace desolder {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError("unknown key \"" + (path.empty() ? it.key() : path + "." + it.key()) +
                        "\"");
  }
}

double get_number(const json& obj, const std::string& path, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("field \"" + path + key + "\" must be a number");
  return v.get<double>();
}

std::string fmt_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

void ComponentGeometry::validate() const {
  for (auto [v, name] : {std::pair{width_mm, "component.width_mm"},
                         {length_mm, "component.length_mm"},
                         {height_mm, "component.height_mm"}})
    if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be positive");
  if (!(clearance_mm >= 0.0)) throw ConfigError("component.clearance_mm must be non-negative");
}

void Scenario::validate() const {
  if (!(duration_cap > 0.0)) throw ConfigError("duration_cap must be positive");
  component.validate();
  try {
    plant.validate();
    controller.validate();
    detector.validate();
    jam.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!transport_target.finite()) throw ConfigError("transport_target must be finite");
  if (!(approach_height > 0.0)) throw ConfigError("approach_height_mm must be positive");
  if (!(face_gap >= 0.0)) throw ConfigError("face_gap_mm must be non-negative");
  if (!(grasp_time > 0.0)) throw ConfigError("grasp_time must be positive");
  if (!(release_time > 0.0)) throw ConfigError("release_time must be positive");
  if (!(arrival_tol > 0.0)) throw ConfigError("arrival_tol_mm must be positive");
}

Scenario parse_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("JSON syntax error: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("scenario document must be a JSON object");

  check_keys(doc, "",
             {"label", "seed", "duration_cap", "component", "plant", "controller", "detector",
              "jam", "transport_target", "approach_height_mm", "face_gap_mm", "grasp_time",
              "release_time", "arrival_tol_mm"});

  Scenario s;
  if (doc.contains("label")) {
    if (!doc["label"].is_string()) throw ConfigError("field \"label\" must be a string");
    s.label = doc["label"].get<std::string>();
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned())
      throw ConfigError("field \"seed\" must be an unsigned integer");
    s.seed = doc["seed"].get<std::uint64_t>();
  }
  s.duration_cap = get_number(doc, "", "duration_cap", s.duration_cap);

  if (doc.contains("component")) {
    const json& c = doc["component"];
    check_keys(c, "component", {"width_mm", "length_mm", "height_mm", "clearance_mm"});
    s.component.width_mm = get_number(c, "component.", "width_mm", s.component.width_mm);
    s.component.length_mm = get_number(c, "component.", "length_mm", s.component.length_mm);
    s.component.height_mm = get_number(c, "component.", "height_mm", s.component.height_mm);
    s.component.clearance_mm =
        get_number(c, "component.", "clearance_mm", s.component.clearance_mm);
  }

  if (doc.contains("plant")) {
    const json& p = doc["plant"];
    check_keys(p, "plant",
               {"k_n", "d_n", "k_t", "d_t", "C_th", "h_air", "h_plate", "T_air", "T_plate",
                "T_melt", "T0", "E_L", "F_break", "F_res", "b_slide", "seat_len_mm",
                "seat_play_mm", "tau_r", "v_max", "dt"});
    PlantParams& pp = s.plant;
    pp.k_n = get_number(p, "plant.", "k_n", pp.k_n);
    pp.d_n = get_number(p, "plant.", "d_n", pp.d_n);
    pp.k_t = get_number(p, "plant.", "k_t", pp.k_t);
    pp.d_t = get_number(p, "plant.", "d_t", pp.d_t);
    pp.C_th = get_number(p, "plant.", "C_th", pp.C_th);
    pp.h_air = get_number(p, "plant.", "h_air", pp.h_air);
    pp.h_plate = get_number(p, "plant.", "h_plate", pp.h_plate);
    pp.T_air = get_number(p, "plant.", "T_air", pp.T_air);
    pp.T_plate = get_number(p, "plant.", "T_plate", pp.T_plate);
    pp.T_melt = get_number(p, "plant.", "T_melt", pp.T_melt);
    pp.T0 = get_number(p, "plant.", "T0", pp.T0);
    pp.E_L = get_number(p, "plant.", "E_L", pp.E_L);
    pp.F_break = get_number(p, "plant.", "F_break", pp.F_break);
    pp.F_res = get_number(p, "plant.", "F_res", pp.F_res);
    pp.b_slide = get_number(p, "plant.", "b_slide", pp.b_slide);
    pp.seat_len = get_number(p, "plant.", "seat_len_mm", pp.seat_len * 1e3) * 1e-3;
    pp.seat_play = get_number(p, "plant.", "seat_play_mm", pp.seat_play * 1e3) * 1e-3;
    pp.tau_r = get_number(p, "plant.", "tau_r", pp.tau_r);
    pp.v_max = get_number(p, "plant.", "v_max", pp.v_max);
    pp.dt = get_number(p, "plant.", "dt", pp.dt);
  }

  if (doc.contains("controller")) {
    const json& c = doc["controller"];
    check_keys(c, "controller",
               {"f_d", "Kp", "Ki", "I_max", "C", "v_app", "eps_f", "settle_hold", "ramp_time",
                "hold_gain"});
    ControllerConfig& cc = s.controller;
    cc.f_d = get_number(c, "controller.", "f_d", cc.f_d);
    cc.Kp = get_number(c, "controller.", "Kp", cc.Kp);
    cc.Ki = get_number(c, "controller.", "Ki", cc.Ki);
    cc.I_max = get_number(c, "controller.", "I_max", cc.I_max);
    cc.C = get_number(c, "controller.", "C", cc.C);
    cc.v_app = get_number(c, "controller.", "v_app", cc.v_app);
    cc.eps_f = get_number(c, "controller.", "eps_f", cc.eps_f);
    cc.settle_hold = get_number(c, "controller.", "settle_hold", cc.settle_hold);
    cc.ramp_time = get_number(c, "controller.", "ramp_time", cc.ramp_time);
    cc.hold_gain = get_number(c, "controller.", "hold_gain", cc.hold_gain);
  }

  if (doc.contains("detector")) {
    const json& d = doc["detector"];
    check_keys(d, "detector",
               {"theta_c", "N_c", "eps_f", "t_settle", "alpha", "d_rm_mm", "phi_min",
                "timeout_approach", "timeout_contact", "timeout_melting", "timeout_grasping",
                "timeout_transport", "timeout_release"});
    DetectorConfig& dc = s.detector;
    dc.theta_c = get_number(d, "detector.", "theta_c", dc.theta_c);
    if (d.contains("N_c")) {
      if (!d["N_c"].is_number_unsigned())
        throw ConfigError("field \"detector.N_c\" must be an unsigned integer");
      dc.N_c = d["N_c"].get<std::size_t>();
    }
    dc.eps_f = get_number(d, "detector.", "eps_f", dc.eps_f);
    dc.t_settle = get_number(d, "detector.", "t_settle", dc.t_settle);
    dc.alpha = get_number(d, "detector.", "alpha", dc.alpha);
    dc.d_rm = get_number(d, "detector.", "d_rm_mm", dc.d_rm * 1e3) * 1e-3;
    dc.phi_min = get_number(d, "detector.", "phi_min", dc.phi_min);
    dc.timeout_approach = get_number(d, "detector.", "timeout_approach", dc.timeout_approach);
    dc.timeout_contact = get_number(d, "detector.", "timeout_contact", dc.timeout_contact);
    dc.timeout_melting = get_number(d, "detector.", "timeout_melting", dc.timeout_melting);
    dc.timeout_grasping = get_number(d, "detector.", "timeout_grasping", dc.timeout_grasping);
    dc.timeout_transport = get_number(d, "detector.", "timeout_transport", dc.timeout_transport);
    dc.timeout_release = get_number(d, "detector.", "timeout_release", dc.timeout_release);
  }

  if (doc.contains("jam")) {
    const json& jj = doc["jam"];
    check_keys(jj, "jam", {"p0", "beta_per_mm"});
    s.jam.p0 = get_number(jj, "jam.", "p0", s.jam.p0);
    s.jam.beta_per_mm = get_number(jj, "jam.", "beta_per_mm", s.jam.beta_per_mm);
  }

  if (doc.contains("transport_target")) {
    const json& t = doc["transport_target"];
    if (!t.is_array() || t.size() != 3 || !t[0].is_number() || !t[1].is_number() ||
        !t[2].is_number())
      throw ConfigError("field \"transport_target\" must be an array of 3 numbers");
    s.transport_target = {t[0].get<double>(), t[1].get<double>(), t[2].get<double>()};
  }

  s.approach_height = get_number(doc, "", "approach_height_mm", s.approach_height * 1e3) * 1e-3;
  s.face_gap = get_number(doc, "", "face_gap_mm", s.face_gap * 1e3) * 1e-3;
  s.grasp_time = get_number(doc, "", "grasp_time", s.grasp_time);
  s.release_time = get_number(doc, "", "release_time", s.release_time);
  s.arrival_tol = get_number(doc, "", "arrival_tol_mm", s.arrival_tol * 1e3) * 1e-3;

  // Component geometry fixes the plant contact surfaces.
  s.plant.comp_face_y = 0.5 * s.component.length_mm * 1e-3;
  s.plant.comp_height = s.component.height_mm * 1e-3;

  s.validate();
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

namespace {

struct Loop {
  Scenario sc;
  PlantState ps;
  ControllerState cs;
  Phase phase = Phase::Approach;
  PhaseProfile prof;
  double phase_entry = 0.0;
  bool settled = false;
  bool melt_onset_fired = false;
  bool prev_moving = false;
  ToolWrench measured;
  SplitMix64 rng;
  RunReport rep;

  explicit Loop(const Scenario& s) : sc(s), rng(s.seed) {
    const Vec3 start{0.0, sc.plant.comp_face_y + sc.face_gap, sc.approach_height};
    ps = initial_plant_state(sc.plant, start);
    cs.hold_reference = start;
    prof = phase_profile(phase, sc.controller);
    rep.seed = sc.seed;
  }

  void enter(Phase p) {
    phase = p;
    phase_entry = ps.time;
    if (is_terminal(p)) return;
    prof = phase_profile(p, sc.controller);
    cs.hold_reference = ps.tool_pose.position;
    if (p == Phase::Contact) cs.integrator = 0.0;
    if (p == Phase::Grasping) ps.component.grasped = true;
  }
};

}  // namespace

RunResult run_scenario(const Scenario& scenario_in) {
  Scenario sc = scenario_in;
  if (const char* env = std::getenv("DESOLDER_SIM_DT_US")) {
    char* end = nullptr;
    const unsigned long long us = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || us == 0)
      throw ConfigError("DESOLDER_SIM_DT_US must be a positive integer (microseconds)");
    sc.plant.dt = static_cast<double>(us) * 1e-6;
  }
  sc.controller.dt = sc.plant.dt;
  sc.controller.v_max = sc.plant.v_max;
  sc.validate();

  const double dt = sc.plant.dt;
  const std::size_t settle_samples = static_cast<std::size_t>(sc.detector.t_settle / dt) + 4;
  SignalWindow fz_window(std::max<std::size_t>(sc.detector.N_c + 2, 16));
  SignalWindow fy_window(std::max(settle_samples, sc.detector.N_c + 2));
  const double fz_baseline = 0.0;  // sensed force before the approach begins
  const double ramp_time = sc.controller.ramp_time;

  Loop L(sc);
  RunResult out;
  out.trace.reserve(static_cast<std::size_t>(sc.duration_cap / dt) + 1);

  const std::size_t max_steps = static_cast<std::size_t>(sc.duration_cap / dt);
  double t_contact = 0.0;

  for (std::size_t step = 0; step < max_steps && !is_terminal(L.phase); ++step) {
    // Detect events from the signals produced by the previous step.
    std::optional<EventType> ev;
    std::string event_label;

    if (L.ps.time - L.phase_entry > sc.detector.phase_timeout(L.phase)) {
      ev = EventType::Timeout;
    } else {
      switch (L.phase) {
        case Phase::Approach:
          if (detect_contact(fz_window, fz_baseline, sc.detector)) ev = EventType::ContactDetected;
          break;
        case Phase::Contact:
          if (detect_settled(fy_window, sc.controller.f_d, sc.detector))
            ev = EventType::ForceSettled;
          break;
        case Phase::Melting:
          if (!L.melt_onset_fired &&
              detect_melt_onset(fy_window, L.settled, sc.controller.f_d, sc.detector)) {
            L.melt_onset_fired = true;
            L.rep.time_to_melt_onset = L.ps.time;
            event_label = "MeltOnset";  // trace annotation, not a transition edge
          }
          if (detect_removal_complete(L.ps.component, L.ps.solder, sc.detector))
            ev = EventType::RemovalComplete;
          break;
        case Phase::Grasping:
          if (L.ps.time - L.phase_entry >= sc.grasp_time)
            ev = detect_grasp_outcome(sc.component.clearance_mm * 1e-3, L.rng, sc.jam);
          break;
        case Phase::Transport:
          if ((L.ps.tool_pose.position - sc.transport_target).norm() < sc.arrival_tol)
            ev = EventType::Arrived;
          break;
        case Phase::Release:
          if (L.ps.time - L.phase_entry >= sc.release_time) ev = EventType::Released;
          break;
        default:
          break;
      }
    }

    if (ev) {
      const Phase next = transition(L.phase, *ev);
      event_label = event_name(*ev);
      switch (*ev) {
        case EventType::ContactDetected:
          L.rep.time_to_contact = L.ps.time;
          t_contact = L.ps.time;
          break;
        case EventType::ForceSettled:
          L.settled = true;
          L.rep.time_to_settle = L.ps.time;
          break;
        case EventType::RemovalComplete:
          L.rep.desolder_success = true;
          L.rep.time_to_removal = L.ps.time;
          break;
        case EventType::GraspSecured:
          L.rep.grasp_success = true;
          break;
        case EventType::GraspFailed:
          L.rep.fault = "GraspFailed";
          break;
        case EventType::Timeout:
          L.rep.fault = "Timeout(" + std::string(phase_name(L.phase)) + ")";
          break;
        default:
          break;
      }
      if (next != L.phase) L.enter(next);
      if (is_terminal(L.phase)) {
        TraceSample sample = {L.ps.time,
                              L.ps.tool_pose.position.x,
                              L.ps.tool_pose.position.y,
                              L.ps.tool_pose.position.z,
                              L.measured.force.x,
                              L.measured.force.y,
                              L.measured.force.z,
                              L.ps.solder.temperature,
                              L.ps.solder.melt_fraction,
                              L.ps.component.displacement,
                              L.phase,
                              event_label};
        out.trace.push_back(std::move(sample));
        break;
      }
    }

    // Axis modes for this step.
    L.cs.modes = L.prof.modes;
    if (L.cs.modes[1].kind == AxisModeKind::ForceRegulate && ramp_time > 0.0) {
      const double scale = std::min(1.0, (L.ps.time - t_contact) / ramp_time);
      L.cs.modes[1].value = sc.controller.f_d * scale;
    }
    if (L.prof.transport_active) {
      const Vec3 delta = sc.transport_target - L.ps.tool_pose.position;
      L.cs.modes = {AxisMode::velocity(sc.controller.hold_gain * delta.x),
                    AxisMode::velocity(sc.controller.hold_gain * delta.y),
                    AxisMode::velocity(sc.controller.hold_gain * delta.z)};
    }

    auto [v_cmd, cs_next] = controller_step(L.cs, L.measured, L.ps.tool_pose.position, sc.controller);
    L.cs = cs_next;
    L.ps.heating_air_on = L.prof.heating_air_on;

    PlantStepResult stepped = plant_step(L.ps, v_cmd, sc.plant);
    if (!L.prev_moving && stepped.state.component.moving &&
        L.ps.solder.temperature < sc.plant.T_melt)
      L.rep.early_motion = true;
    L.prev_moving = stepped.state.component.moving;
    L.ps = stepped.state;
    L.measured = stepped.measured;

    fz_window.push(L.ps.time, L.measured.force.z);
    fy_window.push(L.ps.time, L.measured.force.y);

    out.trace.push_back({L.ps.time, L.ps.tool_pose.position.x, L.ps.tool_pose.position.y,
                         L.ps.tool_pose.position.z, L.measured.force.x, L.measured.force.y,
                         L.measured.force.z, L.ps.solder.temperature, L.ps.solder.melt_fraction,
                         L.ps.component.displacement, L.phase, event_label});
  }

  if (!is_terminal(L.phase)) L.rep.fault = "Timeout(DurationCap)";
  out.report = L.rep;
  return out;
}

BatchReport run_batch(const Scenario& s, std::size_t trials, std::size_t jobs) {
  if (trials < 1) throw ConfigError("batch requires at least one trial");
  if (jobs < 1) jobs = 1;
  jobs = std::min(jobs, trials);

  BatchReport batch;
  batch.trials.resize(trials);

  auto worker = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < trials; i += stride) {
      Scenario trial = s;
      trial.seed = mix_seed(s.seed, i);
      batch.trials[i] = run_scenario(trial).report;
    }
  };

  if (jobs == 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(jobs);
    for (std::size_t j = 0; j < jobs; ++j) threads.emplace_back(worker, j, jobs);
    for (auto& t : threads) t.join();
  }

  for (const RunReport& r : batch.trials) {
    batch.desolder_count += r.desolder_success ? 1 : 0;
    batch.grasp_count += r.grasp_success ? 1 : 0;
  }
  batch.desolder_rate = static_cast<double>(batch.desolder_count) / static_cast<double>(trials);
  batch.grasp_rate = static_cast<double>(batch.grasp_count) / static_cast<double>(trials);
  return batch;
}

void write_trace(const std::vector<TraceSample>& trace, std::ostream& out) {
  out << "t,x,y,z,fx,fy,fz,T,phi,disp,phase,event\n";
  for (const TraceSample& s : trace) {
    out << fmt_double(s.t) << ',' << fmt_double(s.x) << ',' << fmt_double(s.y) << ','
        << fmt_double(s.z) << ',' << fmt_double(s.fx) << ',' << fmt_double(s.fy) << ','
        << fmt_double(s.fz) << ',' << fmt_double(s.temperature) << ',' << fmt_double(s.phi)
        << ',' << fmt_double(s.disp) << ',' << phase_name(s.phase) << ',' << s.event << '\n';
  }
}

void write_trace_file(const std::vector<TraceSample>& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open trace output: " + path);
  write_trace(trace, out);
  out.flush();
  if (!out) throw IoError("failed writing trace: " + path);
}

std::vector<TraceSample> read_trace(std::istream& in) {
  std::vector<TraceSample> trace;
  std::string line;
  if (!std::getline(in, line)) throw IoError("trace stream is empty");
  if (line != "t,x,y,z,fx,fy,fz,T,phi,disp,phase,event")
    throw IoError("unexpected trace header: " + line);

  auto parse_field = [](const std::string& f) {
    double v = 0.0;
    const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
    if (res.ec != std::errc{} || res.ptr != f.data() + f.size())
      throw IoError("bad numeric field in trace: " + f);
    return v;
  };

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        fields.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    if (fields.size() != 12) throw IoError("bad trace row: " + line);
    TraceSample s;
    s.t = parse_field(fields[0]);
    s.x = parse_field(fields[1]);
    s.y = parse_field(fields[2]);
    s.z = parse_field(fields[3]);
    s.fx = parse_field(fields[4]);
    s.fy = parse_field(fields[5]);
    s.fz = parse_field(fields[6]);
    s.temperature = parse_field(fields[7]);
    s.phi = parse_field(fields[8]);
    s.disp = parse_field(fields[9]);
    bool found = false;
    for (Phase p : kAllPhases)
      if (phase_name(p) == fields[10]) {
        s.phase = p;
        found = true;
        break;
      }
    if (!found) throw IoError("unknown phase label in trace: " + fields[10]);
    s.event = fields[11];
    trace.push_back(std::move(s));
  }
  return trace;
}

namespace {

json report_json(const RunReport& r) {
  json j;
  j["desolder_success"] = r.desolder_success;
  j["grasp_success"] = r.grasp_success;
  j["early_motion"] = r.early_motion;
  if (r.time_to_contact) j["time_to_contact"] = *r.time_to_contact;
  if (r.time_to_settle) j["time_to_settle"] = *r.time_to_settle;
  if (r.time_to_melt_onset) j["time_to_melt_onset"] = *r.time_to_melt_onset;
  if (r.time_to_removal) j["time_to_removal"] = *r.time_to_removal;
  if (!r.fault.empty()) j["fault"] = r.fault;
  j["seed"] = r.seed;
  return j;
}

}  // namespace

std::string report_to_json(const RunReport& r) { return report_json(r).dump(2) + "\n"; }

std::string batch_report_to_json(const BatchReport& b) {
  json j;
  j["trials"] = json::array();
  for (const RunReport& r : b.trials) j["trials"].push_back(report_json(r));
  j["desolder_count"] = b.desolder_count;
  j["grasp_count"] = b.grasp_count;
  j["desolder_rate"] = b.desolder_rate;
  j["grasp_rate"] = b.grasp_rate;
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path);
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing file: " + path);
}

}  // namespace desolder
