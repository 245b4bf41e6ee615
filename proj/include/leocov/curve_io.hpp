#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "leocov/bounds.hpp"

namespace leocov {

struct CsvError : std::runtime_error {
  std::size_t row;
  CsvError(std::size_t row_, const std::string& what)
      : std::runtime_error("row " + std::to_string(row_) + ": " + what), row(row_) {}
};

namespace detail {
inline std::string format_sig(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

inline double parse_double(const std::string& field, std::size_t row) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &used);
  } catch (const std::exception&) {
    throw CsvError(row, "not a number: '" + field + "'");
  }
  if (used != field.size()) throw CsvError(row, "trailing junk in '" + field + "'");
  return v;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline void validate_curve(const CoverageCurve& c) {
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    const CurvePoint& p = c.points[i];
    if (!(p.coverage >= 0.0 && p.coverage <= 1.0))
      throw std::invalid_argument("coverage out of [0, 1]");
    if (p.ci_low.has_value() != p.ci_high.has_value())
      throw std::invalid_argument("confidence bounds must come in pairs");
    if (p.ci_low && !(*p.ci_low <= p.coverage && p.coverage <= *p.ci_high))
      throw std::invalid_argument("confidence interval does not bracket coverage");
    if (i > 0 && !(p.theta_db > c.points[i - 1].theta_db))
      throw std::invalid_argument("theta_db must be strictly increasing");
  }
}
}  // namespace detail

/// Writes `theta_db,coverage[,ci_low,ci_high]` rows at 12 significant
/// digits. CI columns are emitted when the first point carries them.
inline void write_curve(const std::string& path, const CoverageCurve& curve) {
  detail::validate_curve(curve);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const bool ci = !curve.points.empty() && curve.points.front().ci_low.has_value();
  out << (ci ? "theta_db,coverage,ci_low,ci_high\n" : "theta_db,coverage\n");
  for (const CurvePoint& p : curve.points) {
    out << detail::format_sig(p.theta_db, 12) << ',' << detail::format_sig(p.coverage, 12);
    if (ci)
      out << ',' << detail::format_sig(p.ci_low.value_or(p.coverage), 12) << ','
          << detail::format_sig(p.ci_high.value_or(p.coverage), 12);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline CoverageCurve read_curve(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw CsvError(0, "missing header");
  const auto header = detail::split_csv(line);
  bool ci = false;
  if (header.size() == 2 && header[0] == "theta_db" && header[1] == "coverage") {
    ci = false;
  } else if (header.size() == 4 && header[0] == "theta_db" && header[1] == "coverage" &&
             header[2] == "ci_low" && header[3] == "ci_high") {
    ci = true;
  } else {
    throw CsvError(0, "unexpected header '" + line + "'");
  }
  CoverageCurve curve;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto fields = detail::split_csv(line);
    if (fields.size() != (ci ? 4u : 2u)) throw CsvError(row, "wrong field count");
    CurvePoint p{detail::parse_double(fields[0], row), detail::parse_double(fields[1], row),
                 std::nullopt, std::nullopt};
    if (ci) {
      p.ci_low = detail::parse_double(fields[2], row);
      p.ci_high = detail::parse_double(fields[3], row);
    }
    curve.points.push_back(p);
  }
  detail::validate_curve(curve);
  return curve;
}

}  // namespace leocov
