#include "desolder/core.hpp"

namespace desolder {

ToolWrench transform_wrench(const Pose& pose, const ToolWrench& w) {
  if (!pose.valid()) throw std::invalid_argument("transform_wrench: invalid pose");
  if (!w.finite()) throw std::invalid_argument("transform_wrench: non-finite wrench");
  const Vec3 f = pose.rotation.rotate(w.force);
  const Vec3 tau = pose.rotation.rotate(w.torque) + cross(pose.position, f);
  return {f, tau};
}

double window_mean(const SignalWindow& w, double horizon) {
  if (w.empty()) throw std::invalid_argument("window_mean: empty window");
  if (!(horizon > 0.0)) throw std::invalid_argument("window_mean: horizon must be positive");
  const double cutoff = w.latest().t - horizon;
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i].t >= cutoff) {
      sum += w[i].value;
      ++n;
    }
  }
  // The latest sample is always within the horizon, so n >= 1.
  return sum / static_cast<double>(n);
}

}  // namespace desolder
