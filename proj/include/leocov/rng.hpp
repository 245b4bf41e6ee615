#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "leocov/geometry.hpp"

namespace leocov {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Deterministic per-sample random stream. Sub-streams are derived from
/// (seed, index) so results never depend on evaluation order or worker
/// count. All variate transforms are spelled out explicitly; the standard
/// distribution adaptors are implementation-defined and would not be
/// bit-stable across toolchains.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed;
    (void)detail::splitmix64(s);
    s ^= index * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL;
    engine_.seed(detail::splitmix64(s));
  }

  /// Uniform on (0, 1].
  double uniform_open0() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double exponential(double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("rate must be positive");
    return -std::log(uniform_open0()) / rate;
  }

  /// Uniform direction on the unit sphere.
  Vec3 unit_vector() {
    const double z = uniform(-1.0, 1.0);
    const double phi = uniform(0.0, 2.0 * kPi);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {s * std::cos(phi), s * std::sin(phi), z};
  }

 private:
  std::mt19937_64 engine_;
};

/// Rotation matrix, row-major.
struct Mat3 {
  double m[3][3];
  Vec3 apply(const Vec3& v) const {
    return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
  }
};

/// Uniform random rotation (Shoemake's quaternion method).
inline Mat3 random_rotation(RngStream& rng) {
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  const double u3 = rng.uniform();
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  const double qx = a * std::sin(2.0 * kPi * u2);
  const double qy = a * std::cos(2.0 * kPi * u2);
  const double qz = b * std::sin(2.0 * kPi * u3);
  const double qw = b * std::cos(2.0 * kPi * u3);
  Mat3 r;
  r.m[0][0] = 1 - 2 * (qy * qy + qz * qz);
  r.m[0][1] = 2 * (qx * qy - qz * qw);
  r.m[0][2] = 2 * (qx * qz + qy * qw);
  r.m[1][0] = 2 * (qx * qy + qz * qw);
  r.m[1][1] = 1 - 2 * (qx * qx + qz * qz);
  r.m[1][2] = 2 * (qy * qz - qx * qw);
  r.m[2][0] = 2 * (qx * qz - qy * qw);
  r.m[2][1] = 2 * (qy * qz + qx * qw);
  r.m[2][2] = 1 - 2 * (qx * qx + qy * qy);
  return r;
}

/// Rotation taking unit vector `from` onto unit vector `to` (Rodrigues).
inline Mat3 rotation_between(const Vec3& from, const Vec3& to) {
  const Vec3 f = from.normalized(), t = to.normalized();
  const Vec3 axis = f.cross(t);
  const double s = axis.norm();
  const double c = clamp_unit(f.dot(t));
  if (s < 1e-15) {
    if (c > 0.0) return Mat3{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    // Antiparallel: rotate pi about any axis orthogonal to f.
    Vec3 ortho = std::abs(f.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    Vec3 u = (ortho - f * ortho.dot(f)).normalized();
    Mat3 r;
    r.m[0][0] = 2 * u.x * u.x - 1;
    r.m[0][1] = 2 * u.x * u.y;
    r.m[0][2] = 2 * u.x * u.z;
    r.m[1][0] = 2 * u.y * u.x;
    r.m[1][1] = 2 * u.y * u.y - 1;
    r.m[1][2] = 2 * u.y * u.z;
    r.m[2][0] = 2 * u.z * u.x;
    r.m[2][1] = 2 * u.z * u.y;
    r.m[2][2] = 2 * u.z * u.z - 1;
    return r;
  }
  const Vec3 k = axis * (1.0 / s);
  const double ic = 1.0 - c;
  Mat3 r;
  r.m[0][0] = c + k.x * k.x * ic;
  r.m[0][1] = k.x * k.y * ic - k.z * s;
  r.m[0][2] = k.x * k.z * ic + k.y * s;
  r.m[1][0] = k.y * k.x * ic + k.z * s;
  r.m[1][1] = c + k.y * k.y * ic;
  r.m[1][2] = k.y * k.z * ic - k.x * s;
  r.m[2][0] = k.z * k.x * ic - k.y * s;
  r.m[2][1] = k.z * k.y * ic + k.x * s;
  r.m[2][2] = c + k.z * k.z * ic;
  return r;
}

}  // namespace leocov
