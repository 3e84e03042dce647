#include "desolder/detector.hpp"

#include <algorithm>

namespace desolder {

double DetectorConfig::phase_timeout(Phase p) const {
  switch (p) {
    case Phase::Approach: return timeout_approach;
    case Phase::Contact: return timeout_contact;
    case Phase::Melting: return timeout_melting;
    case Phase::Grasping: return timeout_grasping;
    case Phase::Transport: return timeout_transport;
    case Phase::Release: return timeout_release;
    default: throw std::logic_error("phase_timeout: terminal phase has no timeout");
  }
}

void DetectorConfig::validate() const {
  if (!(theta_c > 0.0)) throw std::invalid_argument("detector.theta_c must be positive");
  if (N_c < 1) throw std::invalid_argument("detector.N_c must be at least 1");
  if (!(eps_f > 0.0)) throw std::invalid_argument("detector.eps_f must be positive");
  if (!(t_settle > 0.0)) throw std::invalid_argument("detector.t_settle must be positive");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("detector.alpha must be in (0,1)");
  if (!(d_rm > 0.0)) throw std::invalid_argument("detector.d_rm must be positive");
  if (!(phi_min >= 0.0 && phi_min <= 1.0))
    throw std::invalid_argument("detector.phi_min must be in [0,1]");
  for (double t : {timeout_approach, timeout_contact, timeout_melting, timeout_grasping,
                   timeout_transport, timeout_release})
    if (!(t > 0.0)) throw std::invalid_argument("detector timeouts must be positive");
}

void JamParams::validate() const {
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw std::invalid_argument("jam.p0 must be in [0,1]");
  if (beta_per_mm < 0.0)
    throw std::invalid_argument("jam.beta_per_mm must be non-negative");
}

bool detect_contact(const SignalWindow& fz_window, double baseline, const DetectorConfig& cfg) {
  if (fz_window.size() < cfg.N_c) return false;
  for (std::size_t i = fz_window.size() - cfg.N_c; i < fz_window.size(); ++i) {
    if (std::abs(fz_window[i].value - baseline) <= cfg.theta_c) return false;
  }
  return true;
}

bool detect_settled(const SignalWindow& fy_window, double f_d, const DetectorConfig& cfg) {
  if (fy_window.empty()) return false;
  const double cutoff = fy_window.latest().t - cfg.t_settle;
  if (fy_window[0].t > cutoff) return false;  // window does not span t_settle yet
  for (std::size_t i = 0; i < fy_window.size(); ++i) {
    if (fy_window[i].t < cutoff) continue;
    if (std::abs(fy_window[i].value - f_d) > cfg.eps_f) return false;
  }
  return true;
}

bool detect_melt_onset(const SignalWindow& fy_window, bool settled, double f_d,
                       const DetectorConfig& cfg) {
  if (!settled || fy_window.empty()) return false;
  return std::abs(fy_window.latest().value) < cfg.alpha * std::abs(f_d);
}

bool detect_removal_complete(const ComponentState& component, const SolderState& solder,
                             const DetectorConfig& cfg) {
  return component.displacement >= cfg.d_rm && solder.melt_fraction >= cfg.phi_min;
}

double jam_probability(double clearance_m, const JamParams& jam) {
  if (!(clearance_m >= 0.0))
    throw std::invalid_argument("jam_probability: clearance must be non-negative");
  return std::clamp(jam.p0 - jam.beta_per_mm * clearance_m * 1e3, 0.0, 1.0);
}

EventType detect_grasp_outcome(double clearance_m, SplitMix64& rng, const JamParams& jam) {
  const double p = jam_probability(clearance_m, jam);
  return rng.uniform01() < p ? EventType::GraspFailed : EventType::GraspSecured;
}

}  // namespace desolder
