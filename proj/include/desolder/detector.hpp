#pragma once

#include "desolder/core.hpp"
#include "desolder/phase.hpp"
#include "desolder/plant.hpp"

namespace desolder {

struct DetectorConfig {
  double theta_c = 2.0;     // N, contact deviation threshold
  std::size_t N_c = 10;     // debounce sample count
  double eps_f = 0.5;       // N, settle tolerance around f_d
  double t_settle = 0.2;    // s, settle hold time
  double alpha = 0.7;       // melt-dip ratio against |f_d|
  double d_rm = 5e-3;       // m, removal displacement
  double phi_min = 0.95;    // minimum melt fraction for removal

  // Per-phase timeout budget [s].
  double timeout_approach = 10.0;
  double timeout_contact = 5.0;
  double timeout_melting = 30.0;
  double timeout_grasping = 5.0;
  double timeout_transport = 20.0;
  double timeout_release = 5.0;

  double phase_timeout(Phase p) const;
  void validate() const;
};

struct JamParams {
  double p0 = 0.6;          // jam probability at zero clearance
  double beta_per_mm = 0.1; // probability decrease per mm of clearance

  void validate() const;
};

// True iff the last N_c samples all deviate from the pre-approach baseline
// by more than theta_c. Insufficient samples means no detection.
bool detect_contact(const SignalWindow& fz_window, double baseline, const DetectorConfig& cfg);

// True iff every sample in the trailing t_settle interval is within eps_f of
// f_d and the window actually spans that interval.
bool detect_settled(const SignalWindow& fy_window, double f_d, const DetectorConfig& cfg);

// Melt signature: after the force has settled, |f_y| of the latest sample
// drops below alpha * |f_d|.
bool detect_melt_onset(const SignalWindow& fy_window, bool settled, double f_d,
                       const DetectorConfig& cfg);

bool detect_removal_complete(const ComponentState& component, const SolderState& solder,
                             const DetectorConfig& cfg);

// Clearance-parameterized Bernoulli jam draw from the scenario-owned stream.
EventType detect_grasp_outcome(double clearance_m, SplitMix64& rng, const JamParams& jam);

double jam_probability(double clearance_m, const JamParams& jam);

}  // namespace desolder
