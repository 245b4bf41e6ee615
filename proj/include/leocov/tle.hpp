#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "leocov/geometry.hpp"
#include "leocov/point_process.hpp"
#include "leocov/rng.hpp"

namespace leocov {

/// Mean orbital elements from one two-line element set. Angles in radians,
/// mean motion in revolutions per (solar) day, epoch as full year plus
/// fractional day-of-year (1.0 = Jan 1 00:00 UTC).
struct TleRecord {
  std::string name;
  int catalog_number = 0;
  int epoch_year = 0;
  double epoch_day = 1.0;
  double inclination_rad = 0.0;
  double raan_rad = 0.0;
  double eccentricity = 0.0;
  double arg_perigee_rad = 0.0;
  double mean_anomaly_rad = 0.0;
  double mean_motion_rev_per_day = 0.0;
};

struct TleError {
  std::size_t line_number;
  std::string message;
};

struct TleParseException : std::runtime_error {
  std::size_t line_number;
  TleParseException(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_number(line) {}
};

enum class TleParseMode { strict, lenient };

struct TleParseResult {
  std::vector<TleRecord> records;
  std::vector<TleError> errors;  // populated in lenient mode only
};

/// Standard mod-10 checksum: digits count their value, '-' counts one,
/// everything else zero; computed over the first 68 columns.
inline int tle_checksum(std::string_view line) {
  int sum = 0;
  const std::size_t n = std::min<std::size_t>(line.size(), 68);
  for (std::size_t i = 0; i < n; ++i) {
    const char c = line[i];
    if (c >= '0' && c <= '9') sum += c - '0';
    if (c == '-') sum += 1;
  }
  return sum % 10;
}

namespace detail {

inline std::string strip_cr(std::string line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
  return line;
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline double tle_field_double(std::string_view line, std::size_t col, std::size_t len,
                               std::size_t line_no) {
  const std::string field = trim(line.substr(col, len));
  if (field.empty()) throw TleParseException(line_no, "empty numeric field");
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &used);
  } catch (const std::exception&) {
    throw TleParseException(line_no, "malformed number '" + field + "'");
  }
  if (used != field.size())
    throw TleParseException(line_no, "malformed number '" + field + "'");
  return v;
}

inline long tle_field_int(std::string_view line, std::size_t col, std::size_t len,
                          std::size_t line_no) {
  const std::string field = trim(line.substr(col, len));
  if (field.empty()) throw TleParseException(line_no, "empty integer field");
  for (std::size_t i = field[0] == '-' || field[0] == '+' ? 1 : 0; i < field.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(field[i])))
      throw TleParseException(line_no, "malformed integer '" + field + "'");
  return std::stol(field);
}

// Columns like " 0006703" that carry an implied leading "0.".
inline double tle_implied_decimal(std::string_view field, std::size_t line_no) {
  const std::string f = trim(field);
  if (f.empty()) throw TleParseException(line_no, "empty implied-decimal field");
  for (const char c : f)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw TleParseException(line_no, "malformed implied decimal '" + f + "'");
  return std::stod("0." + f);
}

inline bool looks_like_tle_line(const std::string& line, char which) {
  return line.size() >= 2 && line[0] == which && line[1] == ' ';
}

inline void check_line(const std::string& line, char which, std::size_t line_no) {
  if (line.size() != 69)
    throw TleParseException(line_no, "line length is " + std::to_string(line.size()) +
                                         ", expected 69");
  if (line[0] != which)
    throw TleParseException(line_no, std::string("expected line number '") + which + "'");
  const int want = line[68] - '0';
  if (want < 0 || want > 9) throw TleParseException(line_no, "checksum column is not a digit");
  if (tle_checksum(line) != want)
    throw TleParseException(line_no, "checksum mismatch (computed " +
                                         std::to_string(tle_checksum(line)) + ")");
}

inline TleRecord decode_record(const std::string& name, const std::string& l1,
                               const std::string& l2, std::size_t l1_no, std::size_t l2_no) {
  check_line(l1, '1', l1_no);
  check_line(l2, '2', l2_no);
  const long cat1 = tle_field_int(l1, 2, 5, l1_no);
  const long cat2 = tle_field_int(l2, 2, 5, l2_no);
  if (cat1 != cat2)
    throw TleParseException(l2_no, "catalog number mismatch between lines");
  TleRecord rec;
  rec.name = trim(name);
  rec.catalog_number = static_cast<int>(cat1);
  const long yy = tle_field_int(l1, 18, 2, l1_no);
  rec.epoch_year = static_cast<int>(yy <= 56 ? 2000 + yy : 1900 + yy);
  rec.epoch_day = tle_field_double(l1, 20, 12, l1_no);
  if (!(rec.epoch_day >= 1.0 && rec.epoch_day < 367.0))
    throw TleParseException(l1_no, "epoch day out of range");
  const double deg = kPi / 180.0;
  rec.inclination_rad = tle_field_double(l2, 8, 8, l2_no) * deg;
  rec.raan_rad = tle_field_double(l2, 17, 8, l2_no) * deg;
  rec.eccentricity = tle_implied_decimal(l2.substr(26, 7), l2_no);
  if (!(rec.eccentricity >= 0.0 && rec.eccentricity < 1.0))
    throw TleParseException(l2_no, "eccentricity out of [0, 1)");
  rec.arg_perigee_rad = tle_field_double(l2, 34, 8, l2_no) * deg;
  rec.mean_anomaly_rad = tle_field_double(l2, 43, 8, l2_no) * deg;
  rec.mean_motion_rev_per_day = tle_field_double(l2, 52, 11, l2_no);
  if (!(rec.mean_motion_rev_per_day > 0.0))
    throw TleParseException(l2_no, "mean motion must be positive");
  return rec;
}

}  // namespace detail

/// Parses name + line1 + line2 triplets (the name line is optional). Strict
/// mode throws on the first problem; lenient mode records errors and resyncs
/// at the next plausible record.
inline TleParseResult parse_tle(std::string_view text,
                                TleParseMode mode = TleParseMode::strict) {
  TleParseResult result;
  std::vector<std::pair<std::size_t, std::string>> lines;
  {
    std::size_t line_no = 0, pos = 0;
    while (pos <= text.size()) {
      const std::size_t nl = text.find('\n', pos);
      const std::string_view raw =
          text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
      ++line_no;
      const std::string line = detail::strip_cr(std::string(raw));
      if (!detail::trim(line).empty()) lines.emplace_back(line_no, line);
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
  }
  std::size_t i = 0;
  while (i < lines.size()) {
    std::string name;
    std::size_t start = i;
    try {
      if (!detail::looks_like_tle_line(lines[i].second, '1')) {
        name = lines[i].second;
        ++i;
        if (i >= lines.size() || !detail::looks_like_tle_line(lines[i].second, '1'))
          throw TleParseException(lines[start].first,
                                  "expected TLE line 1 after name '" +
                                      detail::trim(name) + "'");
      }
      if (i + 1 >= lines.size())
        throw TleParseException(lines[i].first, "record truncated: missing line 2");
      const auto& [no1, l1] = lines[i];
      const auto& [no2, l2] = lines[i + 1];
      result.records.push_back(detail::decode_record(name, l1, l2, no1, no2));
      i += 2;
    } catch (const TleParseException& err) {
      if (mode == TleParseMode::strict) throw;
      result.errors.push_back({err.line_number, err.what()});
      // Resync past the failed record: its optional name, its line 1 if one
      // was present, and any stray line-2 continuation.
      i = start + 1;
      if (!name.empty() && i < lines.size() &&
          detail::looks_like_tle_line(lines[i].second, '1'))
        ++i;
      while (i < lines.size() && detail::looks_like_tle_line(lines[i].second, '2')) ++i;
    }
  }
  return result;
}

/// Solves E - e*sin(E) = M by Newton iteration with a guaranteed bisection
/// fallback on [M - e, M + e]; residual below 1e-12.
inline double kepler_solve(double mean_anomaly_rad, double eccentricity) {
  if (!(eccentricity >= 0.0 && eccentricity <= 0.999))
    throw std::invalid_argument("eccentricity must lie in [0, 0.999]");
  const double m = mean_anomaly_rad;
  const double e = eccentricity;
  double big_e = e < 0.8 ? m : kPi;
  for (int iter = 0; iter < 50; ++iter) {
    const double f = big_e - e * std::sin(big_e) - m;
    if (std::abs(f) < 1e-12) return big_e;
    big_e -= f / (1.0 - e * std::cos(big_e));
  }
  // f is strictly increasing and |E - M| <= e.
  double lo = m - e, hi = m + e;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid - e * std::sin(mid) - m < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double big_e2 = 0.5 * (lo + hi);
  if (std::abs(big_e2 - e * std::sin(big_e2) - m) > 1e-12)
    throw std::runtime_error("Kepler iteration failed to converge");
  return big_e2;
}

/// Earth-centered inertial position at epoch.
struct EciState {
  Vec3 position_km;
  double geocentric_radius_km;
};

inline constexpr double kEarthMuKm3S2 = 398600.4418;

/// Two-body position from mean elements at their own epoch.
inline EciState position_at_epoch(const TleRecord& rec) {
  const double n = rec.mean_motion_rev_per_day * 2.0 * kPi / 86400.0;
  const double a = std::cbrt(kEarthMuKm3S2 / (n * n));
  const double e = rec.eccentricity;
  const double big_e = kepler_solve(rec.mean_anomaly_rad, e);
  const double true_anom = 2.0 * std::atan2(std::sqrt(1.0 + e) * std::sin(big_e / 2.0),
                                            std::sqrt(1.0 - e) * std::cos(big_e / 2.0));
  const double radius = a * (1.0 - e * std::cos(big_e));
  const Vec3 perifocal{radius * std::cos(true_anom), radius * std::sin(true_anom), 0.0};

  const double co = std::cos(rec.arg_perigee_rad), so = std::sin(rec.arg_perigee_rad);
  const double ci = std::cos(rec.inclination_rad), si = std::sin(rec.inclination_rad);
  const double cr = std::cos(rec.raan_rad), sr = std::sin(rec.raan_rad);
  // Rz(raan) * Rx(incl) * Rz(argp)
  const Mat3 rot{{{cr * co - sr * so * ci, -cr * so - sr * co * ci, sr * si},
                  {sr * co + cr * so * ci, -sr * so + cr * co * ci, -cr * si},
                  {so * si, co * si, ci}}};
  const Vec3 pos = rot.apply(perifocal);
  return {pos, pos.norm()};
}

/// Julian date of the record's epoch (UT).
inline double epoch_julian_date(const TleRecord& rec) {
  const int y = rec.epoch_year, m = 1, d = 1;
  const long jdn = (1461L * (y + 4800 + (m - 14) / 12)) / 4 +
                   (367L * (m - 2 - 12 * ((m - 14) / 12))) / 12 -
                   (3L * ((y + 4900 + (m - 14) / 12) / 100)) / 4 + d - 32075;
  return static_cast<double>(jdn) - 0.5 + (rec.epoch_day - 1.0);
}

/// Greenwich Mean Sidereal Time (1982 polynomial), radians in [0, 2pi).
inline double gmst_rad(double jd_ut1) {
  const double d = jd_ut1 - 2451545.0;
  const double t = d / 36525.0;
  double deg = 280.46061837 + 360.98564736629 * d + 0.000387933 * t * t -
               t * t * t / 38710000.0;
  deg = std::fmod(deg, 360.0);
  if (deg < 0.0) deg += 360.0;
  return deg * kPi / 180.0;
}

enum class EpochPolicy { per_record, common };

struct SnapshotEntry {
  std::string name;
  int catalog_number;
  double epoch_jd;
  double altitude_km;
};

struct SnapshotResult {
  PointSet point_set;
  std::vector<SnapshotEntry> entries;
};

/// Builds the observation-ready point set for a ground observer: keeps
/// records inside the altitude band, rotates ECI to Earth-fixed by GMST
/// (at each record's own epoch, or at one shared instant), projects onto
/// the common shell, and aligns the observer's zenith with the +z pole so
/// `observe` applies unchanged. Raw altitudes are preserved per entry.
inline SnapshotResult snapshot_to_pointset(const std::vector<TleRecord>& records,
                                           double band_lo_km, double band_hi_km,
                                           double observer_lat_rad, double observer_lon_rad,
                                           double shell_radius_km, double earth_radius_km,
                                           EpochPolicy policy = EpochPolicy::per_record,
                                           double common_epoch_jd = 0.0) {
  if (!(band_lo_km < band_hi_km)) throw std::invalid_argument("altitude band is empty");
  if (!(shell_radius_km > 0.0)) throw std::invalid_argument("shell radius must be positive");
  if (!(earth_radius_km > 0.0)) throw std::invalid_argument("earth radius must be positive");
  SnapshotResult out;
  out.point_set.radius_km = shell_radius_km;
  const Vec3 zenith{std::cos(observer_lat_rad) * std::cos(observer_lon_rad),
                    std::cos(observer_lat_rad) * std::sin(observer_lon_rad),
                    std::sin(observer_lat_rad)};
  const Mat3 align = rotation_between(zenith, kZenith);
  for (const TleRecord& rec : records) {
    const EciState state = position_at_epoch(rec);
    const double altitude = state.geocentric_radius_km - earth_radius_km;
    if (altitude < band_lo_km || altitude > band_hi_km) continue;
    const double jd =
        policy == EpochPolicy::common ? common_epoch_jd : epoch_julian_date(rec);
    const double theta = gmst_rad(jd);
    const double c = std::cos(theta), s = std::sin(theta);
    // Rz(-gmst): inertial -> Earth-fixed.
    const Vec3 ecef{c * state.position_km.x + s * state.position_km.y,
                    -s * state.position_km.x + c * state.position_km.y,
                    state.position_km.z};
    out.point_set.points.push_back(align.apply(ecef.normalized()));
    out.point_set.ids.push_back(std::to_string(rec.catalog_number));
    out.entries.push_back({rec.name, rec.catalog_number, epoch_julian_date(rec), altitude});
  }
  return out;
}

}  // namespace leocov
