#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "leocov/curve_io.hpp"
#include "leocov/point_process.hpp"
#include "leocov/pointset_io.hpp"
#include "leocov/rng.hpp"

using namespace leocov;

namespace {
std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}
}  // namespace

TEST_CASE("curve CSV round trip") {
  CoverageCurve c;
  RngStream rng(1, 0);
  double p = 1.0;
  for (int db = -15; db <= 15; ++db) {
    p *= rng.uniform(0.85, 1.0);
    c.points.push_back({static_cast<double>(db), p, std::nullopt, std::nullopt});
  }
  const std::string path = temp_path("leocov_curve.csv");
  write_curve(path, c);
  const CoverageCurve back = read_curve(path);
  REQUIRE(back.points.size() == c.points.size());
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    CHECK(back.points[i].theta_db ==
          Catch::Approx(c.points[i].theta_db).epsilon(1e-11));
    CHECK(back.points[i].coverage ==
          Catch::Approx(c.points[i].coverage).epsilon(1e-11));
    CHECK_FALSE(back.points[i].ci_low.has_value());
  }

  // One write-read cycle is a fixed point byte-for-byte.
  const std::string path2 = temp_path("leocov_curve2.csv");
  write_curve(path2, back);
  CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("curve CSV keeps confidence columns") {
  CoverageCurve c;
  c.points = {{-1.0, 0.75, 0.74, 0.76}, {0.0, 0.5, 0.49, 0.51}, {1.0, 0.25, 0.24, 0.26}};
  const std::string path = temp_path("leocov_curve_ci.csv");
  write_curve(path, c);
  const CoverageCurve back = read_curve(path);
  REQUIRE(back.points.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    REQUIRE(back.points[i].ci_low.has_value());
    CHECK(*back.points[i].ci_low == Catch::Approx(*c.points[i].ci_low).epsilon(1e-11));
    CHECK(*back.points[i].ci_high == Catch::Approx(*c.points[i].ci_high).epsilon(1e-11));
  }
}

TEST_CASE("curve CSV rejects malformed input") {
  const std::string path = temp_path("leocov_curve_bad.csv");
  {
    std::ofstream out(path);
    out << "thetadb,coverage\n0,1\n";
  }
  try {
    read_curve(path);
    FAIL("expected a header error");
  } catch (const CsvError& e) {
    CHECK(e.row == 0);
  }
  {
    std::ofstream out(path);
    out << "theta_db,coverage\n0,0.5\n1,oops\n";
  }
  try {
    read_curve(path);
    FAIL("expected a row error");
  } catch (const CsvError& e) {
    CHECK(e.row == 2);
  }
  {
    std::ofstream out(path);
    out << "theta_db,coverage\n0,0.5\n0,0.4\n";  // not strictly increasing
  }
  CHECK_THROWS_AS(read_curve(path), std::invalid_argument);
  {
    std::ofstream out(path);
    out << "theta_db,coverage\n0,1.5\n";  // probability out of range
  }
  CHECK_THROWS_AS(read_curve(path), std::invalid_argument);
}

TEST_CASE("point-set CSV round trip is exact") {
  const PointSet ps = fibonacci_lattice(267, 6870.0);
  const std::string path = temp_path("leocov_points.csv");
  write_pointset(path, ps);
  const PointSet back = read_pointset(path);
  REQUIRE(back.size() == ps.size());
  CHECK(back.radius_km == ps.radius_km);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    CHECK(back.points[i].x == ps.points[i].x);
    CHECK(back.points[i].y == ps.points[i].y);
    CHECK(back.points[i].z == ps.points[i].z);
    CHECK(back.ids[i] == std::to_string(i));
  }
}

TEST_CASE("point-set CSV rejects malformed input") {
  const std::string path = temp_path("leocov_points_bad.csv");
  {
    std::ofstream out(path);
    out << "radius_km=6870\nid,x,y,z\n0,0,0,1\n";
  }
  CHECK_THROWS_AS(read_pointset(path), CsvError);
  {
    std::ofstream out(path);
    out << "# radius_km=6870\nid,x,y,z\n0,0,0,2\n";  // not unit length
  }
  CHECK_THROWS_AS(read_pointset(path), CsvError);
  {
    std::ofstream out(path);
    out << "# radius_km=6870\nid,x,y,z\na,0,0,1\na,0,1,0\n";  // duplicate id
  }
  CHECK_THROWS_AS(read_pointset(path), CsvError);
  CHECK_THROWS_AS(read_pointset(temp_path("leocov_missing_file.csv")), std::runtime_error);
}
