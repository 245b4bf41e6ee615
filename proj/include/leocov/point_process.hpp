#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "leocov/geometry.hpp"
#include "leocov/rng.hpp"

namespace leocov {

/// Spacing constant of the golden-ratio lattice: 2*sqrt(N)*sin(H/Rs)
/// approaches this value for large N.
inline constexpr double kLatticeSpacingConstant = 3.0921;

/// Points on a sphere of radius `radius_km`, stored as unit direction
/// vectors. `ids` is either empty or one tag per point.
struct PointSet {
  double radius_km = 1.0;
  std::vector<Vec3> points;
  std::vector<std::string> ids;

  std::size_t size() const { return points.size(); }
};

/// Cap-count regulation constants: caps of spherical radius r hold at most
/// sigma + rho*r + nu*r^2 points.
struct RegulationParams {
  double sigma;
  double rho;
  double nu;

  RegulationParams(double sigma_, double rho_, double nu_)
      : sigma(sigma_), rho(rho_), nu(nu_) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
    if (!(nu >= 0.0)) throw std::invalid_argument("nu must be >= 0");
  }
};

/// Distances (km, along the orbital sphere) from the user's zenith to the
/// serving satellite and to every visible interferer. Empty when no
/// satellite is visible.
struct Observation {
  double r_max_km = 0.0;
  std::optional<double> serving_distance_km;
  std::vector<double> interferer_distances_km;

  bool empty() const { return !serving_distance_km.has_value(); }
};

/// Golden-ratio lattice of n (odd) points, as latitude arcsin(2i/n) and
/// longitude 2*pi*i/phi for i = -(n-1)/2 .. (n-1)/2.
inline PointSet fibonacci_lattice(long long n, double radius_km) {
  if (n < 3 || n % 2 == 0)
    throw std::invalid_argument("lattice size must be an odd integer >= 3");
  if (!(radius_km > 0.0)) throw std::invalid_argument("radius_km must be positive");
  const long long k = (n - 1) / 2;
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  PointSet ps;
  ps.radius_km = radius_km;
  ps.points.reserve(static_cast<std::size_t>(n));
  for (long long i = -k; i <= k; ++i) {
    const double lat = std::asin(2.0 * static_cast<double>(i) / static_cast<double>(n));
    const double turns = static_cast<double>(i) / phi;
    const double lon = 2.0 * kPi * (turns - std::floor(turns));
    const double c = std::cos(lat);
    ps.points.push_back({c * std::cos(lon), c * std::sin(lon), std::sin(lat)});
  }
  return ps;
}

/// Inverts the spacing relation: the lattice size whose half-minimum
/// distance is approximately h_km. Rounded down to the nearest odd integer
/// (the spacing constant slightly overestimates 2*sqrt(N)*sin(H/Rs), so the
/// raw size always lands in [N, N+2) for the matching lattice).
inline long long lattice_size_for_half_distance(double h_km, double radius_km) {
  if (!(radius_km > 0.0)) throw std::invalid_argument("radius_km must be positive");
  if (!(h_km > 0.0 && h_km < 0.5 * kPi * radius_km))
    throw std::invalid_argument("half distance out of (0, pi/2*radius)");
  const double ratio = kLatticeSpacingConstant / (2.0 * std::sin(h_km / radius_km));
  const double n_raw = ratio * ratio;
  long long n = static_cast<long long>(std::floor(n_raw));
  if (n % 2 == 0) --n;
  return std::max<long long>(3, n);
}

/// Half the minimum pairwise spherical distance. Exact O(N^2) scan over the
/// maximum pairwise dot product.
inline double half_min_distance(const PointSet& ps) {
  const std::size_t n = ps.size();
  if (n < 2) throw std::invalid_argument("need at least 2 points");
  double max_dot = -2.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Vec3& p = ps.points[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = p.dot(ps.points[j]);
      if (d > max_dot) max_dot = d;
    }
  }
  return 0.5 * ps.radius_km * std::acos(clamp_unit(max_dot));
}

/// Regulation constants of the golden-ratio lattice with half-minimum
/// distance h_km: sigma = 1, rho = 0, nu = (c/(4 Rs sin(h/Rs)))^2.
inline RegulationParams fibonacci_regulation_params(double h_km, double radius_km) {
  if (!(radius_km > 0.0)) throw std::invalid_argument("radius_km must be positive");
  if (!(h_km > 0.0 && h_km < 0.5 * kPi * radius_km))
    throw std::invalid_argument("half distance out of (0, pi/2*radius)");
  const double root = kLatticeSpacingConstant / (4.0 * radius_km * std::sin(h_km / radius_km));
  return {1.0, 0.0, root * root};
}

/// Number of points within spherical distance r of `center` (boundary
/// inclusive).
inline std::size_t count_in_cap(const PointSet& ps, const Vec3& center, double r_km) {
  detail::require_unit(center, "center");
  if (!(r_km >= 0.0 && r_km <= kPi * ps.radius_km + 1e-9))
    throw std::invalid_argument("cap radius out of [0, pi*Rs]");
  std::size_t count = 0;
  for (const Vec3& p : ps.points)
    if (ps.radius_km * std::acos(clamp_unit(center.dot(p))) <= r_km) ++count;
  return count;
}

struct RegulationReport {
  double max_excess;
  Vec3 worst_center;
  double worst_radius_km;
};

namespace detail {
inline std::vector<double> sorted_cap_distances(const PointSet& ps, const Vec3& center) {
  std::vector<double> d;
  d.reserve(ps.size());
  for (const Vec3& p : ps.points)
    d.push_back(ps.radius_km * std::acos(clamp_unit(center.dot(p))));
  std::sort(d.begin(), d.end());
  return d;
}
}  // namespace detail

/// Sampled check of the cap-count regulation: maximizes
/// count_in_cap - (sigma + rho*r + nu*r^2) over `centers` seeded uniform cap
/// centers crossed with `radii` seeded radii uniform on (0, pi*Rs]. The
/// reported excess can be positive; the quadratic envelope is an
/// approximation for quasi-uniform sets.
inline RegulationReport verify_ball_regulation(const PointSet& ps,
                                               const RegulationParams& params,
                                               int centers, int radii,
                                               std::uint64_t seed) {
  if (centers < 1 || radii < 1)
    throw std::invalid_argument("sample counts must be >= 1");
  std::vector<double> rs(static_cast<std::size_t>(radii));
  for (int j = 0; j < radii; ++j) {
    RngStream stream(seed, static_cast<std::uint64_t>(centers) + j);
    rs[j] = kPi * ps.radius_km * stream.uniform_open0();
  }
  RegulationReport report{-std::numeric_limits<double>::infinity(), {0, 0, 1}, 0.0};
  for (int i = 0; i < centers; ++i) {
    RngStream stream(seed, static_cast<std::uint64_t>(i));
    const Vec3 c = stream.unit_vector();
    const std::vector<double> dist = detail::sorted_cap_distances(ps, c);
    for (const double r : rs) {
      const auto count = static_cast<double>(
          std::upper_bound(dist.begin(), dist.end(), r) - dist.begin());
      const double excess = count - (params.sigma + params.rho * r + params.nu * r * r);
      if (excess > report.max_excess) {
        report.max_excess = excess;
        report.worst_center = c;
        report.worst_radius_km = r;
      }
    }
  }
  return report;
}

/// Fits the quadratic cap-count envelope to an arbitrary point set with
/// sigma = 1 and rho = 0 fixed: nu_hat is the sampled maximum of
/// (count - 1)/r^2 over 1000 seeded centers and 100 log-spaced radii in
/// [half_min_distance, pi*Rs].
inline RegulationParams estimate_regulation_nu(const PointSet& ps, std::uint64_t seed) {
  if (ps.size() == 0) throw std::invalid_argument("point set is empty");
  if (ps.size() == 1) return {1.0, 0.0, 0.0};
  constexpr int kCenters = 1000;
  constexpr int kRadii = 100;
  const double h = half_min_distance(ps);
  const double r_hi = kPi * ps.radius_km;
  if (!(h > 0.0)) return {1.0, 0.0, 0.0};
  std::vector<double> rs(kRadii);
  const double log_step = std::log(r_hi / h) / (kRadii - 1);
  for (int j = 0; j < kRadii; ++j) rs[j] = h * std::exp(j * log_step);
  double nu_hat = 0.0;
  for (int i = 0; i < kCenters; ++i) {
    RngStream stream(seed, static_cast<std::uint64_t>(i));
    const Vec3 c = stream.unit_vector();
    const std::vector<double> dist = detail::sorted_cap_distances(ps, c);
    for (const double r : rs) {
      const auto count = static_cast<double>(
          std::upper_bound(dist.begin(), dist.end(), r) - dist.begin());
      if (count > 1.0) nu_hat = std::max(nu_hat, (count - 1.0) / (r * r));
    }
  }
  return {1.0, 0.0, nu_hat};
}

/// Distances from the zenith pole to every visible satellite; the nearest
/// one serves, ties broken by point order.
inline Observation observe(const PointSet& ps, const GeometryConfig& cfg) {
  const double rs = cfg.orbit_radius_km();
  if (std::abs(ps.radius_km - rs) > 1e-6 * rs)
    throw std::invalid_argument("point set radius does not match orbit radius");
  Observation obs;
  obs.r_max_km = max_visible_spherical_radius(cfg);
  std::size_t serving_index = 0;
  double serving_dist = std::numeric_limits<double>::infinity();
  std::vector<std::pair<std::size_t, double>> visible;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double d = ps.radius_km * std::acos(clamp_unit(kZenith.dot(ps.points[i])));
    if (d <= obs.r_max_km) {
      visible.emplace_back(i, d);
      if (d < serving_dist) {
        serving_dist = d;
        serving_index = i;
      }
    }
  }
  if (visible.empty()) return obs;
  obs.serving_distance_km = serving_dist;
  obs.interferer_distances_km.reserve(visible.size() - 1);
  for (const auto& [idx, d] : visible)
    if (idx != serving_index) obs.interferer_distances_km.push_back(d);
  return obs;
}

}  // namespace leocov
