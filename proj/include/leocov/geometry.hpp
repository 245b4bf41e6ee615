#pragma once

#include <cmath>
#include <stdexcept>

namespace leocov {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 normalized() const {
    const double n = norm();
    if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
    return {x / n, y / n, z / n};
  }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Pole of the visible cap: the point of the orbital sphere directly above
/// the user. All observation geometry is expressed in a frame where the
/// user's zenith is +z.
inline constexpr Vec3 kZenith{0.0, 0.0, 1.0};

inline double clamp_unit(double v) { return v < -1.0 ? -1.0 : (v > 1.0 ? 1.0 : v); }

/// Earth/orbit geometry. Radii in km, elevation in radians.
struct GeometryConfig {
  double earth_radius_km;
  double orbit_altitude_km;
  double min_elevation_rad;

  GeometryConfig(double earth_radius, double orbit_altitude, double min_elevation)
      : earth_radius_km(earth_radius),
        orbit_altitude_km(orbit_altitude),
        min_elevation_rad(min_elevation) {
    if (!(earth_radius_km > 0.0))
      throw std::invalid_argument("earth_radius_km must be positive");
    if (!(orbit_altitude_km > 0.0))
      throw std::invalid_argument("orbit_altitude_km must be positive");
    if (!(min_elevation_rad >= 0.0 && min_elevation_rad <= kPi / 2.0))
      throw std::invalid_argument("min_elevation_rad must lie in [0, pi/2]");
  }

  double orbit_radius_km() const { return earth_radius_km + orbit_altitude_km; }
};

namespace detail {
inline void require_unit(const Vec3& v, const char* name) {
  if (std::abs(v.norm() - 1.0) > 1e-9)
    throw std::invalid_argument(std::string(name) + " is not a unit vector");
}
}  // namespace detail

/// Great-circle distance between two directions, measured on a sphere of the
/// given radius.
inline double spherical_distance(const Vec3& p, const Vec3& q, double radius_km) {
  detail::require_unit(p, "p");
  detail::require_unit(q, "q");
  if (!(radius_km > 0.0)) throw std::invalid_argument("radius_km must be positive");
  return radius_km * std::acos(clamp_unit(p.dot(q)));
}

/// Straight-line distance from a surface user to a satellite whose zenith
/// offset, measured along the orbital sphere, is r km.
inline double euclidean_slant_distance(double r_km, const GeometryConfig& cfg) {
  const double rs = cfg.orbit_radius_km();
  if (!(r_km >= 0.0 && r_km <= kPi * rs + 1e-9))
    throw std::invalid_argument("spherical distance out of [0, pi*Rs]");
  const double s = std::sin(r_km / (2.0 * rs));
  return std::sqrt(cfg.orbit_altitude_km * cfg.orbit_altitude_km +
                   4.0 * rs * cfg.earth_radius_km * s * s);
}

/// Power-law path loss D(r)^-alpha.
inline double path_loss(double r_km, double alpha, const GeometryConfig& cfg) {
  if (!(alpha >= 2.0)) throw std::invalid_argument("alpha must be >= 2");
  return std::pow(euclidean_slant_distance(r_km, cfg), -alpha);
}

namespace detail {
// Elevation angle of a satellite at Earth-central angle psi, seen from the
// surface. Strictly decreasing in psi on (0, arccos(Re/Rs)].
inline double elevation_at(double psi, double re, double rs) {
  const double d = std::sqrt(rs * rs + re * re - 2.0 * rs * re * std::cos(psi));
  return std::asin(clamp_unit((rs * std::cos(psi) - re) / d));
}
}  // namespace detail

/// Spherical radius of the visible cap: the largest zenith offset (along the
/// orbital sphere) at which the satellite's elevation is still >= the
/// configured minimum. Exact closed form at zero minimum elevation; otherwise
/// solved by bisection to 1e-12 rad.
inline double max_visible_spherical_radius(const GeometryConfig& cfg) {
  const double re = cfg.earth_radius_km;
  const double rs = cfg.orbit_radius_km();
  const double horizon = std::acos(re / rs);
  if (cfg.min_elevation_rad == 0.0) return rs * horizon;
  if (cfg.min_elevation_rad >= kPi / 2.0) return 0.0;
  double lo = 0.0;       // elevation(lo) -> pi/2 >= min
  double hi = horizon;   // elevation(hi) = 0 < min
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (detail::elevation_at(mid, re, rs) >= cfg.min_elevation_rad)
      lo = mid;
    else
      hi = mid;
  }
  return rs * 0.5 * (lo + hi);
}

/// Area of a spherical cap of spherical radius r on a sphere of the given
/// radius.
inline double spherical_cap_area(double r_km, double radius_km) {
  if (!(radius_km > 0.0)) throw std::invalid_argument("radius_km must be positive");
  if (!(r_km >= 0.0 && r_km <= kPi * radius_km + 1e-9))
    throw std::invalid_argument("cap radius out of [0, pi*radius]");
  return 2.0 * kPi * radius_km * radius_km * (1.0 - std::cos(r_km / radius_km));
}

}  // namespace leocov
