#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "leocov/point_process.hpp"
#include "leocov/rng.hpp"
#include "leocov/tle.hpp"

using namespace leocov;

namespace {

// Canonical reference element set, decoded by hand against the published
// column layout.
const std::string kIssName = "ISS (ZARYA)";
const std::string kIssL1 =
    "1 25544U 98067A   08264.51782528 -.00002182  00000-0 -11606-4 0  2927";
const std::string kIssL2 =
    "2 25544  51.6416 247.4627 0006703 130.5360 325.0288 15.72125391563537";

std::string fixture() { return kIssName + "\n" + kIssL1 + "\n" + kIssL2 + "\n"; }

// Formats a minimal circular-orbit element set; used to synthesize shells.
std::string synth_tle(int catalog, double incl_deg, double raan_deg, double m_deg,
                      double mean_motion) {
  char l1[80], l2[80];
  std::snprintf(l1, sizeof(l1), "1 %05dU 24001A   24001.00000000  .00000000  00000-0  00000-0 0  999",
                catalog);
  std::snprintf(l2, sizeof(l2), "2 %05d %8.4f %8.4f 0000000 %8.4f %8.4f %11.8f%5d", catalog,
                incl_deg, raan_deg, 0.0, m_deg, mean_motion, 1);
  std::string a(l1), b(l2);
  a += static_cast<char>('0' + tle_checksum(a));
  b += static_cast<char>('0' + tle_checksum(b));
  return a + "\n" + b + "\n";
}

}  // namespace

TEST_CASE("reference element set decodes to the published fields") {
  const TleParseResult r = parse_tle(fixture());
  REQUIRE(r.records.size() == 1);
  const TleRecord& rec = r.records[0];
  CHECK(rec.name == "ISS (ZARYA)");
  CHECK(rec.catalog_number == 25544);
  CHECK(rec.epoch_year == 2008);
  CHECK(rec.epoch_day == Catch::Approx(264.51782528).epsilon(1e-12));
  CHECK(rec.inclination_rad == Catch::Approx(51.6416 * kPi / 180.0).epsilon(1e-12));
  CHECK(rec.raan_rad == Catch::Approx(247.4627 * kPi / 180.0).epsilon(1e-12));
  CHECK(rec.eccentricity == Catch::Approx(0.0006703).epsilon(1e-12));
  CHECK(rec.arg_perigee_rad == Catch::Approx(130.5360 * kPi / 180.0).epsilon(1e-12));
  CHECK(rec.mean_anomaly_rad == Catch::Approx(325.0288 * kPi / 180.0).epsilon(1e-12));
  CHECK(rec.mean_motion_rev_per_day == Catch::Approx(15.72125391).epsilon(1e-12));
  CHECK(epoch_julian_date(rec) == Catch::Approx(2454730.01782528).epsilon(1e-12));
}

TEST_CASE("parser accepts bare two-line records and multiple records") {
  const std::string text = kIssL1 + "\n" + kIssL2 + "\n\n" + fixture();
  const TleParseResult r = parse_tle(text);
  REQUIRE(r.records.size() == 2);
  CHECK(r.records[0].name.empty());
  CHECK(r.records[1].name == "ISS (ZARYA)");
  CHECK(parse_tle("").records.empty());
  CHECK(parse_tle("\n\n \n").records.empty());
}

TEST_CASE("checksum failures name the offending line") {
  std::string bad = kIssL1;
  bad.back() = bad.back() == '9' ? '0' : bad.back() + 1;
  const std::string text = kIssName + "\n" + bad + "\n" + kIssL2 + "\n";
  try {
    parse_tle(text);
    FAIL("expected a parse error");
  } catch (const TleParseException& e) {
    CHECK(e.line_number == 2);
    CHECK(std::string(e.what()).find("checksum") != std::string::npos);
  }
}

TEST_CASE("strict mode rejects structural problems") {
  CHECK_THROWS_AS(parse_tle(kIssName + "\n" + kIssL1 + "\n"), TleParseException);
  CHECK_THROWS_AS(parse_tle("NAME ONLY\n"), TleParseException);
  CHECK_THROWS_AS(parse_tle(kIssL1.substr(0, 60) + "\n" + kIssL2 + "\n"), TleParseException);

  // Catalog mismatch between the two lines.
  std::string l2 = kIssL2;
  l2[6] = '5';  // 25544 -> 25545
  l2[68] = '0' + static_cast<char>(tle_checksum(l2));
  CHECK_THROWS_AS(parse_tle(kIssL1 + "\n" + l2 + "\n"), TleParseException);
}

TEST_CASE("lenient mode collects errors and continues") {
  std::string bad = kIssL1;
  bad[10] = 'X';  // corrupt a column, breaking the checksum
  const std::string text = "BROKEN SAT\n" + bad + "\n" + kIssL2 + "\n" + fixture();
  const TleParseResult r = parse_tle(text, TleParseMode::lenient);
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].name == "ISS (ZARYA)");
  REQUIRE(r.errors.size() == 1);
  CHECK(r.errors[0].line_number == 2);
}

TEST_CASE("accepted lines reproduce their checksum digit") {
  std::string text = fixture();
  RngStream rng(31, 0);
  for (int i = 0; i < 25; ++i)
    text += synth_tle(40000 + i, 53.0, rng.uniform(0.0, 360.0), rng.uniform(0.0, 360.0),
                      15.081468116324018);
  const TleParseResult r = parse_tle(text);
  CHECK(r.records.size() == 26);
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string line = text.substr(pos, nl - pos);
    if (line.size() == 69 && (line[0] == '1' || line[0] == '2') && line[1] == ' ')
      CHECK(tle_checksum(line) == line.back() - '0');
    pos = nl + 1;
  }
}

TEST_CASE("Kepler solver") {
  CHECK(kepler_solve(0.7, 0.0) == 0.7);
  CHECK(kepler_solve(kPi, 0.3) == Catch::Approx(kPi).margin(1e-12));
  CHECK(kepler_solve(1.0, 0.1) == Catch::Approx(1.0885977523978936).epsilon(1e-12));

  RngStream rng(41, 0);
  for (int i = 0; i < 500; ++i) {
    const double m = rng.uniform(-10.0, 10.0);
    const double e = rng.uniform(0.0, 0.999);
    const double big_e = kepler_solve(m, e);
    CHECK(std::abs(big_e - e * std::sin(big_e) - m) < 1e-12);
  }
  CHECK_THROWS_AS(kepler_solve(1.0, 0.9995), std::invalid_argument);
}

TEST_CASE("two-body position at epoch") {
  TleRecord rec;
  rec.mean_motion_rev_per_day = 15.05;
  const EciState s = position_at_epoch(rec);
  const double a = 6929.6426821579101;
  CHECK(s.position_km.x == Catch::Approx(a).epsilon(1e-12));
  CHECK(s.position_km.y == Catch::Approx(0.0).margin(1e-9));
  CHECK(s.position_km.z == Catch::Approx(0.0).margin(1e-9));
  CHECK(s.geocentric_radius_km == Catch::Approx(a).epsilon(1e-12));

  // Polar orbit, quarter phase: directly above the pole.
  TleRecord polar;
  polar.mean_motion_rev_per_day = 15.05;
  polar.inclination_rad = kPi / 2.0;
  polar.mean_anomaly_rad = kPi / 2.0;
  const EciState p = position_at_epoch(polar);
  CHECK(p.position_km.x == Catch::Approx(0.0).margin(1e-9));
  CHECK(p.position_km.y == Catch::Approx(0.0).margin(1e-9));
  CHECK(p.position_km.z == Catch::Approx(a).epsilon(1e-12));

  // Conic radius identity over random elements.
  RngStream rng(43, 0);
  for (int i = 0; i < 200; ++i) {
    TleRecord r;
    r.mean_motion_rev_per_day = rng.uniform(1.0, 16.0);
    r.eccentricity = rng.uniform(0.0, 0.6);
    r.inclination_rad = rng.uniform(0.0, kPi);
    r.raan_rad = rng.uniform(0.0, 2.0 * kPi);
    r.arg_perigee_rad = rng.uniform(0.0, 2.0 * kPi);
    r.mean_anomaly_rad = rng.uniform(0.0, 2.0 * kPi);
    const EciState st = position_at_epoch(r);
    const double n = r.mean_motion_rev_per_day * 2.0 * kPi / 86400.0;
    const double sma = std::cbrt(kEarthMuKm3S2 / (n * n));
    const double big_e = kepler_solve(r.mean_anomaly_rad, r.eccentricity);
    const double want = sma * (1.0 - r.eccentricity * std::cos(big_e));
    CHECK(st.geocentric_radius_km == Catch::Approx(want).epsilon(1e-9));
    if (r.eccentricity == 0.0) CHECK(st.geocentric_radius_km == Catch::Approx(sma).epsilon(1e-12));
  }
}

TEST_CASE("sidereal angle") {
  CHECK(gmst_rad(2451545.0) == Catch::Approx(4.894961212735792).epsilon(1e-12));
  CHECK(gmst_rad(2454730.01782528) ==
        Catch::Approx(186.18215313996188 * kPi / 180.0).epsilon(1e-10));
  for (const double jd : {2451545.5, 2458000.25, 2460000.0}) {
    CHECK(gmst_rad(jd) >= 0.0);
    CHECK(gmst_rad(jd) < 2.0 * kPi);
  }
}

TEST_CASE("snapshot filters, projects and aligns") {
  std::vector<TleRecord> recs;
  // Circular shells at three altitudes over a 6370 km reference radius.
  for (const double rev : {15.6, 15.081468116324018, 14.2}) {
    TleRecord r;
    r.catalog_number = static_cast<int>(rev * 1000);
    r.mean_motion_rev_per_day = rev;
    r.inclination_rad = kPi / 2.0;
    r.mean_anomaly_rad = kPi / 2.0;  // above the north pole
    recs.push_back(r);
  }
  const SnapshotResult snap =
      snapshot_to_pointset(recs, 500.0, 600.0, kPi / 2.0, 0.0, 6920.0, 6370.0);
  REQUIRE(snap.point_set.size() == 1);  // only the 550 km shell survives
  CHECK(snap.point_set.radius_km == 6920.0);
  CHECK(snap.entries[0].catalog_number == 15081);
  CHECK(snap.entries[0].altitude_km == Catch::Approx(550.0).margin(1e-6));
  // North-pole observer, satellite above the pole: zero zenith offset.
  CHECK(spherical_distance(snap.point_set.points[0], kZenith, 6920.0) ==
        Catch::Approx(0.0).margin(1e-6));

  CHECK_THROWS_AS(snapshot_to_pointset(recs, 600.0, 500.0, 0.0, 0.0, 6920.0, 6370.0),
                  std::invalid_argument);
  CHECK(snapshot_to_pointset(recs, 10.0, 20.0, 0.0, 0.0, 6920.0, 6370.0).point_set.size() == 0);
}

TEST_CASE("projection preserves direction and the alignment is rigid") {
  RngStream rng(47, 0);
  std::vector<TleRecord> recs;
  for (int i = 0; i < 40; ++i) {
    TleRecord r;
    r.catalog_number = 40000 + i;
    r.mean_motion_rev_per_day = 15.081468116324018;
    r.inclination_rad = 53.0 * kPi / 180.0;
    r.raan_rad = rng.uniform(0.0, 2.0 * kPi);
    r.mean_anomaly_rad = rng.uniform(0.0, 2.0 * kPi);
    recs.push_back(r);
  }
  // North-pole observer at epoch: the alignment rotation is the identity, so
  // each projected point is a positive multiple of its Earth-fixed position.
  const SnapshotResult snap =
      snapshot_to_pointset(recs, 500.0, 600.0, kPi / 2.0, 0.0, 6920.0, 6370.0);
  REQUIRE(snap.point_set.size() == 40);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const EciState st = position_at_epoch(recs[i]);
    const double theta = gmst_rad(epoch_julian_date(recs[i]));
    const Vec3 ecef{std::cos(theta) * st.position_km.x + std::sin(theta) * st.position_km.y,
                    -std::sin(theta) * st.position_km.x + std::cos(theta) * st.position_km.y,
                    st.position_km.z};
    const double dot = snap.point_set.points[i].dot(ecef.normalized());
    CHECK(dot == Catch::Approx(1.0).epsilon(1e-12));
  }

  // A mid-latitude observer only rotates the configuration: pairwise angles
  // are preserved.
  const SnapshotResult turned =
      snapshot_to_pointset(recs, 500.0, 600.0, 0.5, 1.2, 6920.0, 6370.0);
  REQUIRE(turned.point_set.size() == 40);
  for (std::size_t i = 1; i < 6; ++i) {
    const double before = snap.point_set.points[0].dot(snap.point_set.points[i]);
    const double after = turned.point_set.points[0].dot(turned.point_set.points[i]);
    CHECK(after == Catch::Approx(before).margin(1e-12));
  }
}

TEST_CASE("synthetic shell seen from Beijing") {
  std::string text;
  const int total = 2200;
  for (int i = 0; i < total; ++i) {
    // 2-D low-discrepancy angles (rationally independent multipliers).
    const double raan = std::fmod(i * 271.7559991089196, 360.0);
    const double mean_anom = std::fmod(i * 205.14250480433067, 360.0);
    text += synth_tle(40000 + i, 53.0, raan, mean_anom, 15.081468116324018);
  }
  const TleParseResult parsed = parse_tle(text);
  REQUIRE(parsed.records.size() == static_cast<std::size_t>(total));

  const double lat = 39.9 * kPi / 180.0, lon = 116.4 * kPi / 180.0;
  const SnapshotResult snap =
      snapshot_to_pointset(parsed.records, 500.0, 600.0, lat, lon, 6920.0, 6370.0);
  CHECK(snap.point_set.size() == static_cast<std::size_t>(total));

  const GeometryConfig cfg(6370.0, 550.0, 25.0 * kPi / 180.0);
  const Observation obs = observe(snap.point_set, cfg);
  REQUIRE_FALSE(obs.empty());
  const std::size_t visible = obs.interferer_distances_km.size() + 1;
  CHECK(visible == 19);  // frozen for this deterministic shell; order 10-20
  CHECK(*obs.serving_distance_km == Catch::Approx(158.509).margin(0.01));
}
