#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace desolder {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
};

inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

// Unit quaternion, scalar-first.
struct Quat {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

  Quat normalized() const {
    const double n = norm();
    if (n == 0.0 || !std::isfinite(n))
      throw std::invalid_argument("Quat: cannot normalize zero/non-finite quaternion");
    return {w / n, x / n, y / n, z / n};
  }

  Quat operator*(const Quat& o) const {
    return {w * o.w - x * o.x - y * o.y - z * o.z,
            w * o.x + x * o.w + y * o.z - z * o.y,
            w * o.y - x * o.z + y * o.w + z * o.x,
            w * o.z + x * o.y - y * o.x + z * o.w};
  }

  Vec3 rotate(const Vec3& v) const {
    // v' = v + 2*q_vec x (q_vec x v + w*v)
    const Vec3 qv{x, y, z};
    const Vec3 t = cross(qv, cross(qv, v) + v * w);
    return v + t * 2.0;
  }

  static Quat from_axis_angle(const Vec3& axis, double angle_rad) {
    const double n = axis.norm();
    if (n == 0.0) throw std::invalid_argument("Quat: zero rotation axis");
    const double h = 0.5 * angle_rad;
    const double s = std::sin(h) / n;
    return {std::cos(h), axis.x * s, axis.y * s, axis.z * s};
  }
};

struct Pose {
  Vec3 position;
  Quat rotation;

  bool valid() const {
    return position.finite() && std::isfinite(rotation.norm()) &&
           std::abs(rotation.norm() - 1.0) <= 1e-9;
  }
};

// Compose poses: applying `a` then `b` equals applying compose(b, a).
inline Pose compose(const Pose& b, const Pose& a) {
  return {b.position + b.rotation.rotate(a.position), (b.rotation * a.rotation).normalized()};
}

// Force/torque at the tool tip, expressed in the board frame.
// force.z is the vertical contact channel, force.y the extraction channel.
struct ToolWrench {
  Vec3 force;
  Vec3 torque;

  bool finite() const { return force.finite() && torque.finite(); }
};

ToolWrench transform_wrench(const Pose& pose, const ToolWrench& w);

// Ring buffer of timestamped scalar samples, oldest evicted first.
class SignalWindow {
 public:
  struct Sample {
    double t = 0.0;
    double value = 0.0;
  };

  explicit SignalWindow(std::size_t capacity) : buf_(capacity) {
    if (capacity == 0) throw std::invalid_argument("SignalWindow: capacity must be positive");
  }

  std::size_t capacity() const { return buf_.size(); }
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }

  void push(double t, double value) {
    if (!std::isfinite(t) || !std::isfinite(value))
      throw std::invalid_argument("SignalWindow: non-finite sample");
    if (count_ > 0 && t <= latest().t)
      throw std::invalid_argument("SignalWindow: timestamps must be strictly increasing");
    buf_[(head_ + count_) % buf_.size()] = {t, value};
    if (count_ < buf_.size())
      ++count_;
    else
      head_ = (head_ + 1) % buf_.size();
  }

  // Index 0 is the oldest retained sample.
  const Sample& operator[](std::size_t i) const { return buf_[(head_ + i) % buf_.size()]; }

  const Sample& latest() const {
    if (count_ == 0) throw std::out_of_range("SignalWindow: empty");
    return (*this)[count_ - 1];
  }

 private:
  std::vector<Sample> buf_;
  std::size_t head_ = 0;
  std::size_t count_ = 0;
};

double window_mean(const SignalWindow& w, double horizon);

// splitmix64: deterministic 64-bit stream, identical on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Per-trial seed derivation: mix the scenario seed with the trial index so
// trials are independent of execution order.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 rng(seed ^ (0x9E3779B97F4A7C15ull * (index + 1)));
  return rng.next();
}

}  // namespace desolder
