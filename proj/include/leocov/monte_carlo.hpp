#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include "leocov/bounds.hpp"
#include "leocov/geometry.hpp"
#include "leocov/point_process.hpp"
#include "leocov/rng.hpp"

namespace leocov {

/// Raised when the coverage conditioning (a visible serving satellite)
/// fails.
struct ConditioningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SimConfig {
  int runs = 50000;
  std::uint64_t seed = 0;
  std::vector<double> thetas_db;
  bool rotate_per_run = false;
  int workers = 1;
};

/// Unit-mean Nakagami-m power sample: Gamma(m, rate m) as the sum of m
/// exponentials (the shape is restricted to integers).
inline double sample_nakagami_power(int m, RngStream& rng) {
  if (m < 1) throw std::invalid_argument("m must be a positive integer");
  double acc = 0.0;
  for (int k = 0; k < m; ++k) acc += rng.exponential(static_cast<double>(m));
  return acc;
}

/// One SINR draw for a fixed observation. Returns +infinity when there is
/// neither interference nor noise.
inline double sinr_realization(const Observation& obs, const ChannelParams& ch,
                               const GeometryConfig& cfg, RngStream& rng) {
  if (obs.empty()) throw ConditioningError("no visible satellite");
  const double num =
      sample_nakagami_power(ch.m, rng) * path_loss(*obs.serving_distance_km, ch.alpha, cfg);
  double denom = ch.wbar;
  for (const double r : obs.interferer_distances_km)
    denom += ch.gbar * sample_nakagami_power(ch.m, rng) * path_loss(r, ch.alpha, cfg);
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return num / denom;
}

namespace detail {

inline double wilson_z() { return 1.959963984540054; }  // 95%

inline void wilson_interval(double covered, double n, double& lo, double& hi) {
  const double z = wilson_z();
  const double p = covered / n;
  const double denom = 1.0 + z * z / n;
  const double center = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  lo = center - half;
  hi = center + half;
}

struct SimTally {
  std::vector<std::uint64_t> covered;
  std::uint64_t valid_runs = 0;
};

// Counts coverage for runs [first, last). One sub-stream per run index, one
// fading vector per run shared across the whole theta grid.
template <class ObserveFn>
SimTally tally_runs(ObserveFn&& observe_run, const ChannelParams& ch,
                    const GeometryConfig& cfg, const std::vector<double>& thetas,
                    std::uint64_t seed, int first, int last) {
  SimTally tally;
  tally.covered.assign(thetas.size(), 0);
  for (int run = first; run < last; ++run) {
    RngStream rng(seed, static_cast<std::uint64_t>(run));
    const Observation* obs = observe_run(rng);
    if (obs == nullptr || obs->empty()) continue;
    ++tally.valid_runs;
    const double num =
        sample_nakagami_power(ch.m, rng) * path_loss(*obs->serving_distance_km, ch.alpha, cfg);
    double denom = ch.wbar;
    for (const double r : obs->interferer_distances_km)
      denom += ch.gbar * sample_nakagami_power(ch.m, rng) * path_loss(r, ch.alpha, cfg);
    if (denom == 0.0) {
      for (std::size_t t = 0; t < thetas.size(); ++t) ++tally.covered[t];
      continue;
    }
    const double sinr = num / denom;
    for (std::size_t t = 0; t < thetas.size(); ++t)
      if (sinr > thetas[t]) ++tally.covered[t];
  }
  return tally;
}

template <class ObserveFactory>
CoverageCurve run_simulation(ObserveFactory&& factory, const ChannelParams& ch,
                             const GeometryConfig& cfg, const SimConfig& sim) {
  if (sim.runs < 1) throw std::invalid_argument("runs must be >= 1");
  if (sim.thetas_db.empty()) throw std::invalid_argument("empty theta grid");
  for (std::size_t i = 1; i < sim.thetas_db.size(); ++i)
    if (!(sim.thetas_db[i] > sim.thetas_db[i - 1]))
      throw std::invalid_argument("theta grid must be strictly increasing");
  std::vector<double> thetas;
  thetas.reserve(sim.thetas_db.size());
  for (const double db : sim.thetas_db) thetas.push_back(db_to_linear(db));

  const int workers = std::max(1, sim.workers);
  std::vector<SimTally> parts(static_cast<std::size_t>(workers));
  if (workers == 1) {
    auto observe_run = factory();
    parts[0] = tally_runs(observe_run, ch, cfg, thetas, sim.seed, 0, sim.runs);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (sim.runs + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int first = w * chunk;
      const int last = std::min(sim.runs, first + chunk);
      pool.emplace_back([&, w, first, last] {
        auto observe_run = factory();
        parts[static_cast<std::size_t>(w)] =
            tally_runs(observe_run, ch, cfg, thetas, sim.seed, first, last);
      });
    }
    for (std::thread& t : pool) t.join();
  }

  SimTally total;
  total.covered.assign(thetas.size(), 0);
  for (const SimTally& part : parts) {
    total.valid_runs += part.valid_runs;
    for (std::size_t t = 0; t < thetas.size(); ++t) total.covered[t] += part.covered[t];
  }
  if (total.valid_runs == 0) throw ConditioningError("no run produced a visible satellite");

  CoverageCurve curve;
  curve.points.reserve(thetas.size());
  const double n = static_cast<double>(total.valid_runs);
  for (std::size_t t = 0; t < thetas.size(); ++t) {
    const double covered = static_cast<double>(total.covered[t]);
    double lo, hi;
    detail::wilson_interval(covered, n, lo, hi);
    curve.points.push_back({sim.thetas_db[t], covered / n, lo, hi});
  }
  return curve;
}

}  // namespace detail

/// Empirical conditional coverage for a fixed observation. Common fading
/// draws across the theta grid keep the empirical curve monotone; Wilson
/// 95% intervals are attached to every point.
inline CoverageCurve coverage_estimate(const Observation& obs, const ChannelParams& ch,
                                       const GeometryConfig& cfg, const SimConfig& sim) {
  if (obs.empty()) throw ConditioningError("no visible satellite");
  auto factory = [&obs] {
    return [&obs](RngStream&) -> const Observation* { return &obs; };
  };
  return detail::run_simulation(factory, ch, cfg, sim);
}

/// Point-set overload: with rotate_per_run the set is re-observed each run
/// under an independent uniform rotation (isotropic averaging); runs whose
/// visible cap is empty are excluded from the conditional estimate.
inline CoverageCurve coverage_estimate(const PointSet& ps, const ChannelParams& ch,
                                       const GeometryConfig& cfg, const SimConfig& sim) {
  if (!sim.rotate_per_run) {
    const Observation obs = observe(ps, cfg);
    return coverage_estimate(obs, ch, cfg, sim);
  }
  auto factory = [&ps, &cfg] {
    return [&ps, &cfg, rotated = PointSet{}, obs = Observation{}](RngStream& rng) mutable
           -> const Observation* {
      const Mat3 rot = random_rotation(rng);
      rotated.radius_km = ps.radius_km;
      rotated.points.resize(ps.points.size());
      for (std::size_t i = 0; i < ps.points.size(); ++i)
        rotated.points[i] = rot.apply(ps.points[i]);
      obs = observe(rotated, cfg);
      return &obs;
    };
  };
  return detail::run_simulation(factory, ch, cfg, sim);
}

}  // namespace leocov
