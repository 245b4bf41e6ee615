// Command-line front end: lattice generation, analytic coverage bounds,
// Monte Carlo estimation, TLE snapshots and curve comparison. Every output
// file is accompanied by a <file>.manifest.json recording the exact
// parameters, seed, tool version and input digests needed to reproduce it.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "leocov/leocov.hpp"

using json = nlohmann::ordered_json;
using namespace leocov;

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::string fnv1a64_digest(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// start:stop:step in dB, or a single value.
std::vector<double> parse_theta_grid(const std::string& spec) {
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError("bad theta grid component '" + tok + "'");
    }
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3) throw UsageError("theta grid must be <value> or start:stop:step");
  const double start = parts[0], stop = parts[1], step = parts[2];
  if (!(step > 0.0) || stop < start) throw UsageError("theta grid requires start<=stop, step>0");
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double v = start + i * step;
    if (v > stop + 1e-9) break;
    grid.push_back(v);
  }
  return grid;
}

class Manifest {
 public:
  Manifest(std::string command) : command_(std::move(command)) {
    start_ = std::chrono::steady_clock::now();
  }

  template <class T>
  void param(const std::string& key, const T& value) {
    params_[key] = value;
  }
  void seed(std::uint64_t s) { seed_ = s; }
  void input(const std::string& path) { inputs_[path] = fnv1a64_digest(read_file(path)); }

  void write(const std::string& out_path) const {
    const auto elapsed = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - start_);
    json m;
    m["command"] = command_;
    m["version"] = kVersion;
    m["parameters"] = params_;
    if (seed_) m["seed"] = *seed_;
    m["inputs"] = inputs_;
    m["duration_seconds"] = elapsed.count();
    std::ofstream out(out_path + ".manifest.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest for " + out_path);
    out << m.dump(2) << '\n';
  }

 private:
  std::string command_;
  json params_ = json::object();
  json inputs_ = json::object();
  std::optional<std::uint64_t> seed_;
  std::chrono::steady_clock::time_point start_;
};

// Flags > JSON config > built-in defaults. The config file holds flag names
// without the leading dashes.
class ConfigLayer {
 public:
  explicit ConfigLayer(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
      if (args[i] == "--config") {
        const std::string text = read_file(args[i + 1]);
        cfg_ = json::parse(text, nullptr, true);
        if (!cfg_.is_object()) throw UsageError("config must be a JSON object");
      }
  }

  template <class T>
  void apply(const CLI::App& app, const std::string& flag, T& value) const {
    if (!cfg_.contains(flag)) return;
    const CLI::Option* opt = app.get_option_no_throw("--" + flag);
    if (opt != nullptr && opt->count() > 0) return;  // explicit flag wins
    value = cfg_.at(flag).get<T>();
  }

 private:
  json cfg_ = json::object();
};

int workers_from_env() {
  const char* env = std::getenv("LEOCOV_WORKERS");
  if (env == nullptr) return 1;
  const int n = std::atoi(env);
  return n < 1 ? 1 : n;
}

struct SharedParams {
  double earth_km = 6370.0;
  double alt_km = 500.0;
  double min_elev_deg = 25.0;
  double alpha = 2.0;
  double gbar = 0.1;
  double wbar = 0.0;
  int m = 2;
};

void add_geometry_flags(CLI::App* cmd, SharedParams& p) {
  cmd->add_option("--earth-km", p.earth_km, "Earth radius [km]");
  cmd->add_option("--alt-km", p.alt_km, "orbit altitude [km]");
  cmd->add_option("--min-elev-deg", p.min_elev_deg, "minimum elevation angle [deg]");
}

void add_channel_flags(CLI::App* cmd, SharedParams& p) {
  cmd->add_option("--alpha", p.alpha, "path loss exponent");
  cmd->add_option("--gbar", p.gbar, "normalized interferer gain");
  cmd->add_option("--wbar", p.wbar, "normalized noise power");
  cmd->add_option("--m", p.m, "Nakagami shape (positive integer)");
}

void apply_shared_config(const ConfigLayer& cfg, const CLI::App& cmd, SharedParams& p) {
  cfg.apply(cmd, "earth-km", p.earth_km);
  cfg.apply(cmd, "alt-km", p.alt_km);
  cfg.apply(cmd, "min-elev-deg", p.min_elev_deg);
  cfg.apply(cmd, "alpha", p.alpha);
  cfg.apply(cmd, "gbar", p.gbar);
  cfg.apply(cmd, "wbar", p.wbar);
  cfg.apply(cmd, "m", p.m);
}

GeometryConfig make_geometry(const SharedParams& p) {
  return GeometryConfig(p.earth_km, p.alt_km, p.min_elev_deg * kPi / 180.0);
}

void manifest_shared(Manifest& man, const SharedParams& p) {
  man.param("earth_km", p.earth_km);
  man.param("alt_km", p.alt_km);
  man.param("min_elev_deg", p.min_elev_deg);
  man.param("alpha", p.alpha);
  man.param("gbar", p.gbar);
  man.param("wbar", p.wbar);
  man.param("m", p.m);
}

int run(int argc, char** argv) {
  CLI::App app{"LEO constellation coverage toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (keys mirror flag names)");

  std::vector<std::string> raw_args(argv + 1, argv + argc);
  const ConfigLayer config(raw_args);

  // ---- lattice ----
  auto* lattice_cmd = app.add_subcommand("lattice", "generate a golden-ratio lattice");
  lattice_cmd->fallthrough();
  long long lattice_n = 0;
  double lattice_radius = 0.0;
  std::string lattice_out;
  lattice_cmd->add_option("--n", lattice_n, "odd point count")->required();
  lattice_cmd->add_option("--radius-km", lattice_radius, "sphere radius [km]")->required();
  lattice_cmd->add_option("--out", lattice_out, "point-set CSV path")->required();

  // ---- bound ----
  auto* bound_cmd = app.add_subcommand("bound", "evaluate an analytic coverage lower bound");
  bound_cmd->fallthrough();
  SharedParams bound_p;
  std::string bound_model = "rayleigh";
  double bound_h = 0.0, bound_r0 = -1.0;
  double bound_sigma = 1.0, bound_rho = 0.0, bound_nu = -1.0;
  std::string bound_grid = "-15:15:1", bound_out;
  int bound_nodes = 64, bound_panels = 128, bound_panel_nodes = 16;
  bound_cmd->add_option("--model", bound_model, "rayleigh | nakagami");
  add_channel_flags(bound_cmd, bound_p);
  add_geometry_flags(bound_cmd, bound_p);
  bound_cmd->add_option("--h-km", bound_h, "lattice half-minimum distance [km]");
  bound_cmd->add_option("--r0-km", bound_r0, "serving distance override [km]");
  bound_cmd->add_option("--sigma", bound_sigma, "regulation sigma");
  bound_cmd->add_option("--rho", bound_rho, "regulation rho");
  bound_cmd->add_option("--nu", bound_nu, "regulation nu [km^-2]");
  bound_cmd->add_option("--theta-db", bound_grid, "dB grid start:stop:step");
  bound_cmd->add_option("--nodes", bound_nodes, "envelope quadrature nodes");
  bound_cmd->add_option("--panels", bound_panels, "fading-integral panels");
  bound_cmd->add_option("--panel-nodes", bound_panel_nodes, "nodes per fading panel");
  bound_cmd->add_option("--out", bound_out, "curve CSV path")->required();

  // ---- simulate ----
  auto* sim_cmd = app.add_subcommand("simulate", "seeded Monte Carlo coverage estimate");
  sim_cmd->fallthrough();
  SharedParams sim_p;
  std::string sim_points, sim_grid = "-15:15:1", sim_out;
  long long sim_lattice_n = 0;
  int sim_runs = 50000;
  std::uint64_t sim_seed = 0;
  bool sim_rotate = false;
  sim_cmd->add_option("--points", sim_points, "point-set CSV input");
  sim_cmd->add_option("--lattice-n", sim_lattice_n, "generate a lattice of this size instead");
  add_channel_flags(sim_cmd, sim_p);
  add_geometry_flags(sim_cmd, sim_p);
  sim_cmd->add_option("--runs", sim_runs, "Monte Carlo runs");
  sim_cmd->add_option("--seed", sim_seed, "RNG seed");
  sim_cmd->add_option("--theta-db", sim_grid, "dB grid start:stop:step");
  sim_cmd->add_flag("--rotate-per-run", sim_rotate, "isotropic re-rotation each run");
  sim_cmd->add_option("--out", sim_out, "curve CSV path")->required();

  // ---- tle ----
  auto* tle_cmd = app.add_subcommand("tle", "two-line element ingestion");
  tle_cmd->fallthrough();
  tle_cmd->require_subcommand(1);
  auto* tle_parse_cmd = tle_cmd->add_subcommand("parse", "parse and summarize a TLE file");
  tle_parse_cmd->fallthrough();
  std::string tp_in;
  bool tp_lenient = false;
  tle_parse_cmd->add_option("--in", tp_in, "TLE file")->required();
  tle_parse_cmd->add_flag("--lenient", tp_lenient, "collect errors instead of failing");

  auto* tle_snap_cmd = tle_cmd->add_subcommand("snapshot", "build an observation-ready point set");
  tle_snap_cmd->fallthrough();
  std::string ts_in, ts_out, ts_policy = "per-record";
  double ts_lat = 39.9, ts_lon = 116.4, ts_lo = 500.0, ts_hi = 600.0;
  double ts_shell = 6920.0, ts_earth = 6370.0, ts_common_jd = 0.0;
  bool ts_lenient = false;
  tle_snap_cmd->add_option("--in", ts_in, "TLE file")->required();
  tle_snap_cmd->add_option("--out", ts_out, "point-set CSV path")->required();
  tle_snap_cmd->add_option("--observer-lat-deg", ts_lat, "observer latitude [deg]");
  tle_snap_cmd->add_option("--observer-lon-deg", ts_lon, "observer longitude [deg]");
  tle_snap_cmd->add_option("--band-lo-km", ts_lo, "altitude band low edge [km]");
  tle_snap_cmd->add_option("--band-hi-km", ts_hi, "altitude band high edge [km]");
  tle_snap_cmd->add_option("--shell-radius-km", ts_shell, "projection shell radius [km]");
  tle_snap_cmd->add_option("--earth-km", ts_earth, "Earth radius for the altitude filter [km]");
  tle_snap_cmd->add_option("--epoch-policy", ts_policy, "per-record | common");
  tle_snap_cmd->add_option("--common-epoch-jd", ts_common_jd, "shared GMST epoch (policy=common)");
  tle_snap_cmd->add_flag("--lenient", ts_lenient, "collect parse errors instead of failing");

  // ---- compare ----
  auto* cmp_cmd = app.add_subcommand("compare", "fit a dB shift between two curves");
  cmp_cmd->fallthrough();
  std::string cmp_ref, cmp_target;
  cmp_cmd->add_option("--ref", cmp_ref, "reference curve CSV")->required();
  cmp_cmd->add_option("--target", cmp_target, "target curve CSV")->required();

  // ---- verify-regulation ----
  auto* ver_cmd = app.add_subcommand("verify-regulation", "sampled cap-count regulation check");
  ver_cmd->fallthrough();
  std::string ver_points;
  long long ver_lattice_n = 0;
  double ver_radius = 6870.0, ver_h = 0.0;
  double ver_sigma = 1.0, ver_rho = 0.0, ver_nu = -1.0;
  int ver_centers = 1000, ver_radii = 100;
  std::uint64_t ver_seed = 0;
  ver_cmd->add_option("--points", ver_points, "point-set CSV input");
  ver_cmd->add_option("--lattice-n", ver_lattice_n, "generate a lattice of this size instead");
  ver_cmd->add_option("--radius-km", ver_radius, "lattice radius [km]");
  ver_cmd->add_option("--h-km", ver_h, "half-minimum distance for the envelope");
  ver_cmd->add_option("--sigma", ver_sigma, "explicit sigma");
  ver_cmd->add_option("--rho", ver_rho, "explicit rho");
  ver_cmd->add_option("--nu", ver_nu, "explicit nu [km^-2]");
  ver_cmd->add_option("--centers", ver_centers, "sampled cap centers");
  ver_cmd->add_option("--radii", ver_radii, "sampled radii");
  ver_cmd->add_option("--seed", ver_seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the error message
    return code == 0 ? 0 : 1;
  }

  if (lattice_cmd->parsed()) {
    Manifest man("lattice");
    const PointSet ps = fibonacci_lattice(lattice_n, lattice_radius);
    write_pointset(lattice_out, ps);
    man.param("n", lattice_n);
    man.param("radius_km", lattice_radius);
    man.param("out", lattice_out);
    man.write(lattice_out);
    std::cerr << "wrote " << ps.size() << " points to " << lattice_out << "\n";
    return 0;
  }

  if (bound_cmd->parsed()) {
    Manifest man("bound");
    apply_shared_config(config, *bound_cmd, bound_p);
    config.apply(*bound_cmd, "model", bound_model);
    config.apply(*bound_cmd, "h-km", bound_h);
    config.apply(*bound_cmd, "theta-db", bound_grid);
    const GeometryConfig geo = make_geometry(bound_p);
    const double rs = geo.orbit_radius_km();

    std::optional<RegulationParams> params;
    if (bound_nu >= 0.0) params = RegulationParams(bound_sigma, bound_rho, bound_nu);
    double r0 = bound_r0;
    if (bound_h > 0.0) {
      if (!params) params = fibonacci_regulation_params(bound_h, rs);
      if (r0 < 0.0) {
        const auto n = static_cast<double>(lattice_size_for_half_distance(bound_h, rs));
        r0 = rs * std::acos((n - 1.0) / n);
      }
    }
    if (!params) throw UsageError("provide --h-km or explicit --sigma/--rho/--nu");
    if (r0 < 0.0) throw UsageError("provide --h-km or --r0-km");

    const std::vector<double> grid = parse_theta_grid(bound_grid);
    CoverageCurve curve;
    if (bound_model == "rayleigh") {
      const ChannelParams ch(1, bound_p.alpha, bound_p.gbar, bound_p.wbar);
      curve = coverage_curve(grid, [&](double theta) {
        return coverage_lb_rayleigh(theta, r0, ch, geo, *params, bound_nodes);
      });
    } else if (bound_model == "nakagami") {
      const ChannelParams ch(bound_p.m, bound_p.alpha, bound_p.gbar, bound_p.wbar);
      const NakagamiBoundOptions opts{bound_nodes, bound_panels, bound_panel_nodes};
      curve = coverage_curve(grid, [&](double theta) {
        return coverage_lb_nakagami(theta, r0, ch, geo, *params, opts);
      });
    } else {
      throw UsageError("unknown model '" + bound_model + "'");
    }
    write_curve(bound_out, curve);
    manifest_shared(man, bound_p);
    man.param("model", bound_model);
    man.param("h_km", bound_h);
    man.param("r0_km", r0);
    man.param("sigma", params->sigma);
    man.param("rho", params->rho);
    man.param("nu", params->nu);
    man.param("theta_db", bound_grid);
    man.param("nodes", bound_nodes);
    man.param("panels", bound_panels);
    man.param("panel_nodes", bound_panel_nodes);
    man.param("out", bound_out);
    man.write(bound_out);
    std::cerr << "wrote " << curve.points.size() << "-point " << bound_model
              << " bound to " << bound_out << "\n";
    return 0;
  }

  if (sim_cmd->parsed()) {
    Manifest man("simulate");
    apply_shared_config(config, *sim_cmd, sim_p);
    config.apply(*sim_cmd, "runs", sim_runs);
    config.apply(*sim_cmd, "theta-db", sim_grid);
    const GeometryConfig geo = make_geometry(sim_p);
    PointSet ps;
    if (!sim_points.empty() && sim_lattice_n > 0)
      throw UsageError("--points and --lattice-n are mutually exclusive");
    if (!sim_points.empty()) {
      man.input(sim_points);
      ps = read_pointset(sim_points);
    } else if (sim_lattice_n > 0) {
      ps = fibonacci_lattice(sim_lattice_n, geo.orbit_radius_km());
    } else {
      throw UsageError("provide --points or --lattice-n");
    }
    const ChannelParams ch(sim_p.m, sim_p.alpha, sim_p.gbar, sim_p.wbar);
    SimConfig sim;
    sim.runs = sim_runs;
    sim.seed = sim_seed;
    sim.thetas_db = parse_theta_grid(sim_grid);
    sim.rotate_per_run = sim_rotate;
    sim.workers = workers_from_env();
    const CoverageCurve curve = coverage_estimate(ps, ch, geo, sim);
    write_curve(sim_out, curve);
    manifest_shared(man, sim_p);
    man.seed(sim_seed);
    man.param("runs", sim_runs);
    man.param("points", sim_points);
    man.param("lattice_n", sim_lattice_n);
    man.param("theta_db", sim_grid);
    man.param("rotate_per_run", sim_rotate);
    man.param("out", sim_out);
    man.write(sim_out);
    std::cerr << "wrote " << curve.points.size() << "-point estimate to " << sim_out << "\n";
    return 0;
  }

  if (tle_parse_cmd->parsed()) {
    const std::string text = read_file(tp_in);
    const TleParseResult r =
        parse_tle(text, tp_lenient ? TleParseMode::lenient : TleParseMode::strict);
    for (const TleError& e : r.errors)
      std::cerr << tp_in << ":" << e.line_number << ": " << e.message << "\n";
    for (const TleRecord& rec : r.records) {
      char line[160];
      std::snprintf(line, sizeof(line), "%5d  %-24s  epoch %d/%012.8f  %7.3f deg  %.8f rev/d",
                    rec.catalog_number, rec.name.c_str(), rec.epoch_year, rec.epoch_day,
                    rec.inclination_rad * 180.0 / kPi, rec.mean_motion_rev_per_day);
      std::cout << line << "\n";
    }
    std::cerr << "parsed " << r.records.size() << " records, " << r.errors.size()
              << " errors\n";
    return 0;
  }

  if (tle_snap_cmd->parsed()) {
    Manifest man("tle snapshot");
    man.input(ts_in);
    const std::string text = read_file(ts_in);
    const TleParseResult parsed =
        parse_tle(text, ts_lenient ? TleParseMode::lenient : TleParseMode::strict);
    for (const TleError& e : parsed.errors)
      std::cerr << ts_in << ":" << e.line_number << ": " << e.message << "\n";
    EpochPolicy policy;
    if (ts_policy == "per-record") {
      policy = EpochPolicy::per_record;
    } else if (ts_policy == "common") {
      policy = EpochPolicy::common;
      if (ts_common_jd <= 0.0) throw UsageError("--epoch-policy common needs --common-epoch-jd");
    } else {
      throw UsageError("unknown epoch policy '" + ts_policy + "'");
    }
    const SnapshotResult snap = snapshot_to_pointset(
        parsed.records, ts_lo, ts_hi, ts_lat * kPi / 180.0, ts_lon * kPi / 180.0, ts_shell,
        ts_earth, policy, ts_common_jd);
    write_pointset(ts_out, snap.point_set);
    json meta = json::array();
    for (const SnapshotEntry& e : snap.entries) {
      meta.push_back({{"name", e.name},
                      {"catalog_number", e.catalog_number},
                      {"epoch_jd", e.epoch_jd},
                      {"altitude_km", e.altitude_km}});
    }
    std::ofstream side(ts_out + ".meta.json", std::ios::binary);
    side << meta.dump(2) << '\n';
    man.param("in", ts_in);
    man.param("out", ts_out);
    man.param("observer_lat_deg", ts_lat);
    man.param("observer_lon_deg", ts_lon);
    man.param("band_lo_km", ts_lo);
    man.param("band_hi_km", ts_hi);
    man.param("shell_radius_km", ts_shell);
    man.param("earth_km", ts_earth);
    man.param("epoch_policy", ts_policy);
    man.param("common_epoch_jd", ts_common_jd);
    man.write(ts_out);
    std::cerr << "kept " << snap.point_set.size() << " of " << parsed.records.size()
              << " records\n";
    return 0;
  }

  if (cmp_cmd->parsed()) {
    const CoverageCurve ref = read_curve(cmp_ref);
    const CoverageCurve target = read_curve(cmp_target);
    const ShiftFit fit = fit_db_shift(ref, target);
    char line[96];
    std::snprintf(line, sizeof(line), "shift_db=%.6f linf_gap=%.6g", fit.shift_db,
                  fit.linf_gap);
    std::cout << line << "\n";
    return 0;
  }

  if (ver_cmd->parsed()) {
    PointSet ps;
    if (!ver_points.empty()) {
      ps = read_pointset(ver_points);
    } else if (ver_lattice_n > 0) {
      ps = fibonacci_lattice(ver_lattice_n, ver_radius);
    } else {
      throw UsageError("provide --points or --lattice-n");
    }
    std::optional<RegulationParams> params;
    if (ver_nu >= 0.0) params = RegulationParams(ver_sigma, ver_rho, ver_nu);
    if (!params) {
      const double h = ver_h > 0.0 ? ver_h : half_min_distance(ps);
      params = fibonacci_regulation_params(h, ps.radius_km);
    }
    const RegulationReport rep =
        verify_ball_regulation(ps, *params, ver_centers, ver_radii, ver_seed);
    char line[192];
    std::snprintf(line, sizeof(line),
                  "max_excess=%.6f worst_radius_km=%.6f sigma=%g rho=%g nu=%.9g", rep.max_excess,
                  rep.worst_radius_km, params->sigma, params->rho, params->nu);
    std::cout << line << "\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const TleParseException& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const CsvError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const ConditioningError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  }
}
