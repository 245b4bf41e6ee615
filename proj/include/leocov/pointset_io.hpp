#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "leocov/curve_io.hpp"
#include "leocov/point_process.hpp"

namespace leocov {

/// Writes the point-set CSV: a `# radius_km=<value>` header line followed by
/// `id,x,y,z` rows with unit coordinates at 17 significant digits.
inline void write_pointset(const std::string& path, const PointSet& ps) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "# radius_km=" << detail::format_sig(ps.radius_km, 17) << '\n';
  out << "id,x,y,z\n";
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const Vec3& p = ps.points[i];
    const std::string id = i < ps.ids.size() ? ps.ids[i] : std::to_string(i);
    out << id << ',' << detail::format_sig(p.x, 17) << ',' << detail::format_sig(p.y, 17)
        << ',' << detail::format_sig(p.z, 17) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline PointSet read_pointset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw CsvError(0, "missing radius header");
  const std::string prefix = "# radius_km=";
  if (line.rfind(prefix, 0) != 0) throw CsvError(0, "expected '# radius_km=<value>'");
  PointSet ps;
  ps.radius_km = detail::parse_double(line.substr(prefix.size()), 0);
  if (!(ps.radius_km > 0.0)) throw CsvError(0, "radius must be positive");
  std::size_t row = 0;
  bool saw_columns = false;
  std::unordered_set<std::string> seen;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    if (!saw_columns) {
      if (detail::split_csv(line) != std::vector<std::string>{"id", "x", "y", "z"})
        throw CsvError(row, "expected column header id,x,y,z");
      saw_columns = true;
      continue;
    }
    const auto fields = detail::split_csv(line);
    if (fields.size() != 4) throw CsvError(row, "wrong field count");
    const Vec3 p{detail::parse_double(fields[1], row), detail::parse_double(fields[2], row),
                 detail::parse_double(fields[3], row)};
    if (std::abs(p.norm() - 1.0) > 1e-9) throw CsvError(row, "coordinates are not unit length");
    if (!seen.insert(fields[0]).second)
      throw CsvError(row, "duplicate id '" + fields[0] + "'");
    ps.ids.push_back(fields[0]);
    ps.points.push_back(p);
  }
  return ps;
}

}  // namespace leocov
