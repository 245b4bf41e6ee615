#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "leocov/bounds.hpp"
#include "leocov/geometry.hpp"
#include "leocov/point_process.hpp"

using namespace leocov;

TEST_CASE("lattice construction matches the closed form") {
  const PointSet ps = fibonacci_lattice(5, 1.0);
  REQUIRE(ps.size() == 5);
  // Last point (i = 2): latitude arcsin(4/5), i.e. arccos(4/5) from the pole.
  CHECK(ps.points.back().z == Catch::Approx(0.8).epsilon(1e-15));
  CHECK(spherical_distance(ps.points.back(), kZenith, 1.0) ==
        Catch::Approx(0.6435011087932844).epsilon(1e-12));
  for (const Vec3& p : ps.points) CHECK(p.norm() == Catch::Approx(1.0).margin(1e-12));

  CHECK_THROWS_AS(fibonacci_lattice(4, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(fibonacci_lattice(1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(fibonacci_lattice(5, 0.0), std::invalid_argument);
}

TEST_CASE("serving distance of the generated lattice") {
  for (const auto& [n, radius] : {std::pair{267LL, 6870.0}, {1369LL, 6870.0}, {2973LL, 6920.0}}) {
    const PointSet ps = fibonacci_lattice(n, radius);
    const double want = radius * std::acos((static_cast<double>(n) - 1.0) / static_cast<double>(n));
    double best = 1e300;
    for (const Vec3& p : ps.points)
      best = std::min(best, spherical_distance(p, kZenith, radius));
    CHECK(best == Catch::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("size from half distance reproduces the published pairs") {
  CHECK(lattice_size_for_half_distance(650.0, 6870.0) == 267);
  CHECK(lattice_size_for_half_distance(287.0, 6870.0) == 1369);
  CHECK(lattice_size_for_half_distance(196.2013, 6920.0) == 2973);
  CHECK(lattice_size_for_half_distance(650.0, 6870.0) % 2 == 1);
  CHECK_THROWS_AS(lattice_size_for_half_distance(0.0, 6870.0), std::invalid_argument);
  CHECK_THROWS_AS(lattice_size_for_half_distance(kPi * 6870.0, 6870.0), std::invalid_argument);
}

TEST_CASE("half minimum distance") {
  PointSet two;
  two.radius_km = 1.0;
  two.points = {{0, 0, 1}, {0, 0, -1}};
  CHECK(half_min_distance(two) == Catch::Approx(kPi / 2.0).epsilon(1e-15));

  PointSet one;
  one.radius_km = 1.0;
  one.points = {{0, 0, 1}};
  CHECK_THROWS_AS(half_min_distance(one), std::invalid_argument);

  CHECK(half_min_distance(fibonacci_lattice(2973, 6920.0)) ==
        Catch::Approx(196.2013).epsilon(0.005));
  CHECK(half_min_distance(fibonacci_lattice(1369, 6870.0)) ==
        Catch::Approx(287.0).epsilon(0.005));
}

TEST_CASE("measured spacing round-trips the lattice size") {
  for (const auto& [n, radius] : {std::pair{267LL, 6870.0}, {1369LL, 6870.0}, {2973LL, 6920.0}}) {
    const double h = half_min_distance(fibonacci_lattice(n, radius));
    CHECK(lattice_size_for_half_distance(h, radius) == n);
  }
}

TEST_CASE("lattice regulation parameters") {
  const RegulationParams p = fibonacci_regulation_params(650.0, 6870.0);
  CHECK(p.sigma == 1.0);
  CHECK(p.rho == 0.0);
  CHECK(p.nu == Catch::Approx(1.4185892577812943e-6).epsilon(1e-12));
  // Consistency with the size relation: nu = N_raw/(4 Rs^2).
  const double ratio = kLatticeSpacingConstant / (2.0 * std::sin(650.0 / 6870.0));
  CHECK(p.nu == Catch::Approx(ratio * ratio / (4.0 * 6870.0 * 6870.0)).epsilon(1e-12));

  // Quarter-turn limit: sin -> 1.
  const double edge = 0.5 * kPi * 6870.0 * (1.0 - 1e-12);
  const double want = kLatticeSpacingConstant / (4.0 * 6870.0);
  CHECK(fibonacci_regulation_params(edge, 6870.0).nu ==
        Catch::Approx(want * want).epsilon(1e-6));

  CHECK_THROWS_AS(RegulationParams(-0.1, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(RegulationParams(1.0, 0.0, -1e-9), std::invalid_argument);
}

TEST_CASE("cap counting") {
  const PointSet ps = fibonacci_lattice(1369, 6870.0);
  CHECK(count_in_cap(ps, ps.points[0], 0.0) == 1);  // boundary inclusive
  CHECK(count_in_cap(ps, kZenith, kPi * 6870.0) == 1369);
  CHECK(count_in_cap(ps, kZenith, 287.0) == 1);

  // Brute-force scan agrees at sampled radii, and counts are monotone in r.
  RngStream rng(11, 0);
  std::size_t prev = 0;
  for (int j = 0; j < 12; ++j) {
    const double r = kPi * 6870.0 * (j + 1) / 12.0;
    std::size_t brute = 0;
    for (const Vec3& p : ps.points)
      if (spherical_distance(kZenith, p, 6870.0) <= r) ++brute;
    const std::size_t got = count_in_cap(ps, kZenith, r);
    CHECK(got == brute);
    CHECK(got >= prev);
    prev = got;
  }
  CHECK_THROWS_AS(count_in_cap(ps, kZenith, -1.0), std::invalid_argument);
}

TEST_CASE("ball regulation verification") {
  const PointSet ps = fibonacci_lattice(1369, 6870.0);

  // sigma = N swallows every cap.
  const RegulationReport trivial =
      verify_ball_regulation(ps, RegulationParams(1369.0, 0.0, 0.0), 50, 20, 3);
  CHECK(trivial.max_excess <= 0.0);

  // Deterministic under a fixed seed.
  const RegulationReport a = verify_ball_regulation(ps, RegulationParams(1, 0, 1e-6), 1, 1, 9);
  const RegulationReport b = verify_ball_regulation(ps, RegulationParams(1, 0, 1e-6), 1, 1, 9);
  CHECK(a.max_excess == b.max_excess);
  CHECK(a.worst_radius_km == b.worst_radius_km);

  // The quadratic envelope of the lattice is quasi-uniformity-based: the
  // sampled worst case sits a few points above it at large radii. Frozen
  // seeded value; the true sup over all caps is about +4.1.
  const RegulationParams p = fibonacci_regulation_params(287.0, 6870.0);
  const RegulationReport r = verify_ball_regulation(ps, p, 1000, 100, 0);
  CHECK(r.max_excess == Catch::Approx(3.092554).margin(1e-4));
  CHECK(r.max_excess < 4.2);

  CHECK_THROWS_AS(verify_ball_regulation(ps, p, 0, 1, 0), std::invalid_argument);
}

TEST_CASE("nu estimation") {
  PointSet one;
  one.radius_km = 1.0;
  one.points = {{0, 0, 1}};
  const RegulationParams single = estimate_regulation_nu(one, 0);
  CHECK(single.sigma == 1.0);
  CHECK(single.rho == 0.0);
  CHECK(single.nu == 0.0);

  // Two points: covering caps exist from radius d/2 (midpoint) up to d
  // (centered at a point), so the sampled sup lies in [1/d^2, 4/d^2].
  PointSet two;
  two.radius_km = 1.0;
  two.points = {{0, 0, 1}, {std::sin(0.3), 0, std::cos(0.3)}};
  const double d = 0.3;
  const RegulationParams est = estimate_regulation_nu(two, 5);
  CHECK(est.nu >= 1.0 / (d * d));
  CHECK(est.nu <= 4.0 / (d * d));
  CHECK(est.nu == Catch::Approx(27.18398109411).epsilon(1e-9));

  // Lattice: the estimator finds near-minimal pairs and triples, landing
  // between 1 and 2 times the analytic envelope.
  const PointSet ps = fibonacci_lattice(1369, 6870.0);
  const double nu = fibonacci_regulation_params(287.0, 6870.0).nu;
  const RegulationParams fit = estimate_regulation_nu(ps, 0);
  CHECK(fit.nu == Catch::Approx(1.170210016866e-5).epsilon(1e-9));
  CHECK(fit.nu >= nu);
  CHECK(fit.nu <= 2.0 * nu);
}

TEST_CASE("observation of the published configurations") {
  // 550 km shell, 25 deg mask: exactly 16 visible.
  {
    const GeometryConfig cfg(6370.0, 550.0, 25.0 * kPi / 180.0);
    const Observation obs = observe(fibonacci_lattice(2973, 6920.0), cfg);
    REQUIRE_FALSE(obs.empty());
    CHECK(obs.interferer_distances_km.size() + 1 == 16);
    CHECK(*obs.serving_distance_km == Catch::Approx(179.4881625881277).epsilon(1e-9));
  }
  // 500 km shell at the horizon.
  {
    const GeometryConfig cfg(6370.0, 500.0, 0.0);
    const Observation lo = observe(fibonacci_lattice(267, 6870.0), cfg);
    CHECK(lo.interferer_distances_km.size() + 1 == 10);
    const Observation hi = observe(fibonacci_lattice(1369, 6870.0), cfg);
    CHECK(hi.interferer_distances_km.size() + 1 == 50);
  }
}

TEST_CASE("observation basics") {
  const GeometryConfig cfg(6370.0, 500.0, 0.0);

  PointSet zenith_sat;
  zenith_sat.radius_km = 6870.0;
  zenith_sat.points = {{0, 0, 1}};
  const Observation obs = observe(zenith_sat, cfg);
  REQUIRE_FALSE(obs.empty());
  CHECK(*obs.serving_distance_km == 0.0);
  CHECK(obs.interferer_distances_km.empty());

  PointSet behind;
  behind.radius_km = 6870.0;
  behind.points = {{0, 0, -1}};
  CHECK(observe(behind, cfg).empty());

  PointSet wrong;
  wrong.radius_km = 7000.0;
  wrong.points = {{0, 0, 1}};
  CHECK_THROWS_AS(observe(wrong, cfg), std::invalid_argument);

  // Serving distance from observe equals the closed form whenever the
  // zenith point is visible.
  for (const long long n : {15LL, 267LL, 805LL}) {
    const PointSet ps = fibonacci_lattice(n, 6870.0);
    const Observation o = observe(ps, cfg);
    REQUIRE_FALSE(o.empty());
    CHECK(*o.serving_distance_km ==
          Catch::Approx(6870.0 * std::acos((n - 1.0) / n)).epsilon(1e-9));
    for (const double r : o.interferer_distances_km) {
      CHECK(r >= *o.serving_distance_km);
      CHECK(r <= o.r_max_km);
    }
  }
}

TEST_CASE("shot-noise envelope holds for the lattice interference sum") {
  const GeometryConfig cfg(6370.0, 500.0, 0.0);
  const PointSet ps = fibonacci_lattice(1369, 6870.0);
  const RegulationParams p = fibonacci_regulation_params(287.0, 6870.0);
  const double r_max = max_visible_spherical_radius(cfg);

  double lhs = 0.0;
  for (const Vec3& q : ps.points) {
    const double d = spherical_distance(kZenith, q, 6870.0);
    if (d <= r_max) lhs += path_loss(d, 2.0, cfg);
  }
  const double rhs =
      a_ell_tilde([&](double r) { return path_loss(r, 2.0, cfg); }, p, r_max, 256);
  const double slack = (lhs - rhs) / rhs;
  INFO("relative slack " << slack);
  CHECK(slack <= 0.05);
}
