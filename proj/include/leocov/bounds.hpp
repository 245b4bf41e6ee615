#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "leocov/geometry.hpp"
#include "leocov/point_process.hpp"
#include "leocov/quadrature.hpp"

namespace leocov {

/// Normalized channel parameters: Nakagami shape m, path-loss exponent,
/// interferer-to-serving gain ratio and noise-to-serving-EIRP ratio.
struct ChannelParams {
  int m;
  double alpha;
  double gbar;
  double wbar;

  ChannelParams(int m_, double alpha_, double gbar_, double wbar_)
      : m(m_), alpha(alpha_), gbar(gbar_), wbar(wbar_) {
    if (m < 1) throw std::invalid_argument("m must be a positive integer");
    if (!(alpha >= 2.0)) throw std::invalid_argument("alpha must be >= 2");
    if (!(gbar > 0.0 && gbar <= 1.0)) throw std::invalid_argument("gbar must lie in (0, 1]");
    if (!(wbar >= 0.0)) throw std::invalid_argument("wbar must be >= 0");
  }
};

/// Raw link-budget quantities before normalization.
struct LinkBudget {
  double tx_power_w;
  double main_lobe_gain;
  double side_lobe_gain;
  double rx_gain;
  double carrier_hz;
  double noise_w;

  static constexpr double kLightSpeed = 299792458.0;  // m/s
};

struct NormalizedLink {
  double gbar;
  double wbar;
};

/// Folds transmit power, antenna gains and carrier frequency into the
/// serving-link gain G0 and returns the normalized side-lobe gain and noise.
inline NormalizedLink normalize_link_budget(const LinkBudget& b) {
  if (!(b.tx_power_w > 0.0 && b.main_lobe_gain > 0.0 && b.side_lobe_gain > 0.0 &&
        b.rx_gain > 0.0 && b.carrier_hz > 0.0))
    throw std::invalid_argument("link budget fields must be positive");
  if (!(b.noise_w >= 0.0)) throw std::invalid_argument("noise_w must be >= 0");
  if (b.side_lobe_gain > b.main_lobe_gain)
    throw std::invalid_argument("side lobe gain must not exceed main lobe gain");
  const double lam = LinkBudget::kLightSpeed / (4.0 * kPi * b.carrier_hz);
  const double g0 = b.main_lobe_gain * b.rx_gain * lam * lam;
  return {b.side_lobe_gain / b.main_lobe_gain, b.noise_w / (b.tx_power_w * g0)};
}

/// One sample of a coverage curve. Confidence bounds are present on
/// simulated curves only.
struct CurvePoint {
  double theta_db;
  double coverage;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
};

struct CoverageCurve {
  std::vector<CurvePoint> points;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Log-Laplace weight of the Nakagami Chernoff argument:
/// -m*log(1 - s*gbar*l(r)/m). Defined for s in [0, s*) with
/// s* = m/(gbar*l(0)).
inline double ell_tilde_nakagami(double r_km, double s, const ChannelParams& ch,
                                 const GeometryConfig& cfg) {
  if (!(s >= 0.0)) throw std::domain_error("s must be >= 0");
  const double y = s * ch.gbar * path_loss(r_km, ch.alpha, cfg) / ch.m;
  if (y >= 1.0) throw std::domain_error("s is at or beyond s* = m/(gbar*l(0))");
  return -static_cast<double>(ch.m) * std::log1p(-y);
}

/// Shot-noise envelope of a non-increasing weight over the visible cap:
/// sigma*w(0) + rho*Int w + 2*nu*Int w*r, both integrals by fixed-order
/// Gauss-Legendre on [0, r_max].
template <class F>
double a_ell_tilde(F&& weight, const RegulationParams& params, double r_max_km,
                   int nodes = 64) {
  if (nodes < 16) throw std::invalid_argument("nodes must be >= 16");
  if (!(r_max_km > 0.0)) throw std::invalid_argument("r_max_km must be positive");
  const GaussLegendre gl = gauss_legendre(nodes);
  const double c = 0.5 * r_max_km;
  double lin = 0.0, quad = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double r = c * (gl.nodes[i] + 1.0);
    const double w = weight(r);
    lin += gl.weights[i] * w;
    quad += gl.weights[i] * w * r;
  }
  return params.sigma * weight(0.0) + params.rho * c * lin + 2.0 * params.nu * c * quad;
}

namespace detail {

/// Precomputed state for the Nakagami exponent: path loss cached at the
/// quadrature nodes so repeated evaluations in s cost only logs.
struct NakagamiExponent {
  double m;
  double gbar;
  double wbar;
  double theta;
  double r0_km;
  double r_max_km;
  double s_star;
  double loss_at_zero;
  double loss_at_r0;
  std::vector<double> node_r;
  std::vector<double> node_w;
  std::vector<double> node_loss;

  NakagamiExponent(double theta_, double r0, const ChannelParams& ch,
                   const GeometryConfig& cfg, int nodes) {
    m = static_cast<double>(ch.m);
    gbar = ch.gbar;
    wbar = ch.wbar;
    theta = theta_;
    r0_km = r0;
    r_max_km = max_visible_spherical_radius(cfg);
    loss_at_zero = path_loss(0.0, ch.alpha, cfg);
    loss_at_r0 = path_loss(r0, ch.alpha, cfg);
    s_star = m / (gbar * loss_at_zero);
    const GaussLegendre gl = gauss_legendre(nodes);
    const double c = 0.5 * r_max_km;
    node_r.resize(nodes);
    node_w.resize(nodes);
    node_loss.resize(nodes);
    for (int i = 0; i < nodes; ++i) {
      node_r[i] = c * (gl.nodes[i] + 1.0);
      node_w[i] = c * gl.weights[i];
      node_loss[i] = path_loss(node_r[i], ch.alpha, cfg);
    }
  }

  double ell_tilde(double s, double loss) const {
    const double y = s * gbar * loss / m;
    if (y >= 1.0) throw std::domain_error("s is at or beyond s*");
    return -m * std::log1p(-y);
  }

  /// A_ltilde(s) - ltilde(r0, s) - s*(x*l(r0)/theta - wbar).
  double operator()(double s, double x, const RegulationParams& p) const {
    double lin = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < node_r.size(); ++i) {
      const double lt = ell_tilde(s, node_loss[i]);
      lin += node_w[i] * lt;
      quad += node_w[i] * lt * node_r[i];
    }
    const double a = p.sigma * ell_tilde(s, loss_at_zero) + p.rho * lin + 2.0 * p.nu * quad;
    return a - ell_tilde(s, loss_at_r0) - s * (x * loss_at_r0 / theta - wbar);
  }

  /// Shot-noise envelope of the plain path loss; the derivative of the
  /// exponent at s = 0 is gbar*(A_l - l(r0)) + wbar - x*l(r0)/theta.
  double plain_loss_envelope(const RegulationParams& p) const {
    double lin = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < node_r.size(); ++i) {
      lin += node_w[i] * node_loss[i];
      quad += node_w[i] * node_loss[i] * node_r[i];
    }
    return p.sigma * loss_at_zero + p.rho * lin + 2.0 * p.nu * quad;
  }

  double minimize(double x, const RegulationParams& p) const {
    const double s_hi = s_star * (1.0 - 1e-9);
    double best_s = 0.0, best_f = 0.0;  // s = 0 evaluates to exactly 0
    constexpr int kScan = 64;
    for (int i = 1; i < kScan; ++i) {
      const double s = s_hi * i / (kScan - 1);
      const double f = (*this)(s, x, p);
      if (f < best_f) {
        best_f = f;
        best_s = s;
      }
    }
    const double step = s_hi / (kScan - 1);
    const double lo = std::max(0.0, best_s - step);
    const double hi = std::min(s_hi, best_s + step);
    const GoldenResult g =
        golden_minimize([&](double s) { return (*this)(s, x, p); }, lo, hi, 1e-10 * s_star);
    return std::min(0.0, std::min(best_f, g.value));
  }
};

inline void require_bound_inputs(double theta, double r0, const RegulationParams& params) {
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
  if (!(r0 >= 0.0)) throw std::invalid_argument("r0 must be >= 0");
  if (!(params.sigma >= 1.0))
    throw std::invalid_argument("sigma must be >= 1 (serving satellite lies in the cap)");
}

}  // namespace detail

/// Chernoff exponent evaluated at transform parameter s and fading value x.
/// Zero at s = 0.
inline double chernoff_exponent(double s, double x, double theta, double r0_km,
                                const ChannelParams& ch, const GeometryConfig& cfg,
                                const RegulationParams& params, int nodes = 64) {
  detail::require_bound_inputs(theta, r0_km, params);
  const detail::NakagamiExponent ex(theta, r0_km, ch, cfg, nodes);
  return ex(s, x, params);
}

struct ExponentMinimum {
  double s_opt;
  double value;
};

/// Infimum of the Chernoff exponent over s in [0, s*): 64-point scan plus
/// golden-section refinement. Never positive (s = 0 gives 0).
inline ExponentMinimum minimize_exponent(double x, double theta, double r0_km,
                                         const ChannelParams& ch, const GeometryConfig& cfg,
                                         const RegulationParams& params, int nodes = 64) {
  detail::require_bound_inputs(theta, r0_km, params);
  const detail::NakagamiExponent ex(theta, r0_km, ch, cfg, nodes);
  const double s_hi = ex.s_star * (1.0 - 1e-9);
  double best_s = 0.0, best_f = 0.0;
  constexpr int kScan = 64;
  for (int i = 1; i < kScan; ++i) {
    const double s = s_hi * i / (kScan - 1);
    const double f = ex(s, x, params);
    if (f < best_f) {
      best_f = f;
      best_s = s;
    }
  }
  const double step = s_hi / (kScan - 1);
  const GoldenResult g = golden_minimize([&](double s) { return ex(s, x, params); },
                                         std::max(0.0, best_s - step),
                                         std::min(s_hi, best_s + step), 1e-10 * ex.s_star);
  if (g.value < best_f) return {g.arg, std::min(0.0, g.value)};
  return {best_s, std::min(0.0, best_f)};
}

/// Quadrature controls for the Nakagami bound. Doubling either knob must
/// leave any reported value unchanged to well below 1e-8.
struct NakagamiBoundOptions {
  int envelope_nodes = 64;
  int outer_panels = 128;
  int panel_nodes = 16;
};

/// Coverage lower bound under Nakagami-m fading: the fading integral of the
/// optimized Chernoff tail bound. Zero when the serving satellite is beyond
/// the visible cap.
inline double coverage_lb_nakagami(double theta, double r0_km, const ChannelParams& ch,
                                   const GeometryConfig& cfg, const RegulationParams& params,
                                   const NakagamiBoundOptions& opts = {}) {
  detail::require_bound_inputs(theta, r0_km, params);
  const detail::NakagamiExponent ex(theta, r0_km, ch, cfg, opts.envelope_nodes);
  if (r0_km > ex.r_max_km) return 0.0;

  const double m = ex.m;
  const double lo = ch.wbar * theta / ex.loss_at_r0;
  double x_up = 1.0;
  while (detail::upper_gamma_regularized(ch.m, m * x_up) >= 1e-9) x_up *= 2.0;
  if (x_up <= lo) return 0.0;

  // The integrand vanishes up to the point where the exponent's slope at
  // s = 0 turns negative; splitting there keeps each piece smooth.
  const double x_c =
      theta * (ch.gbar * (ex.plain_loss_envelope(params) - ex.loss_at_r0) + ch.wbar) /
      ex.loss_at_r0;
  std::vector<double> edges{lo, x_up};
  if (x_c > lo && x_c < x_up) edges.insert(edges.begin() + 1, x_c);

  double log_gamma_m = 0.0;
  for (int k = 2; k < ch.m; ++k) log_gamma_m += std::log(static_cast<double>(k));
  const double log_norm = m * std::log(m) - log_gamma_m;
  const auto density = [&](double x) {
    return std::exp(log_norm + (m - 1.0) * std::log(x) - m * x);
  };

  const GaussLegendre gl = gauss_legendre(opts.panel_nodes);
  const double total_len = x_up - lo;
  double acc = 0.0;
  for (std::size_t seg = 0; seg + 1 < edges.size(); ++seg) {
    const double a = edges[seg], b = edges[seg + 1];
    const int panels =
        std::max(1, static_cast<int>(std::lround(opts.outer_panels * (b - a) / total_len)));
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double pa = a + p * h;
      const double c = 0.5 * h, mid = pa + c;
      for (int i = 0; i < opts.panel_nodes; ++i) {
        const double x = mid + c * gl.nodes[i];
        if (x <= 0.0) continue;
        const double v = ex.minimize(x, params);
        const double integrand = std::max(0.0, 1.0 - std::exp(v));
        acc += c * gl.weights[i] * density(x) * integrand;
      }
    }
  }
  return std::clamp(acc, 0.0, 1.0);
}

/// Closed-form coverage lower bound under Rayleigh fading (m = 1).
inline double coverage_lb_rayleigh(double theta, double r0_km, const ChannelParams& ch,
                                   const GeometryConfig& cfg, const RegulationParams& params,
                                   int nodes = 64) {
  detail::require_bound_inputs(theta, r0_km, params);
  if (ch.m != 1) throw std::invalid_argument("Rayleigh bound requires m = 1");
  const double r_max = max_visible_spherical_radius(cfg);
  if (r0_km > r_max) return 0.0;
  const double loss_r0 = path_loss(r0_km, ch.alpha, cfg);
  const auto weight = [&](double r) {
    return std::log1p(theta * ch.gbar * path_loss(r, ch.alpha, cfg) / loss_r0);
  };
  const double a = a_ell_tilde(weight, params, r_max, nodes);
  const double value = std::exp(weight(r0_km) - theta * ch.wbar / loss_r0 - a);
  return std::clamp(value, 0.0, 1.0);
}

/// Sweeps a bound evaluator over a strictly increasing dB grid.
/// The evaluator receives the linear threshold 10^(dB/10).
template <class F>
CoverageCurve coverage_curve(const std::vector<double>& thetas_db, F&& evaluate) {
  if (thetas_db.empty()) throw std::invalid_argument("empty theta grid");
  for (std::size_t i = 1; i < thetas_db.size(); ++i)
    if (!(thetas_db[i] > thetas_db[i - 1]))
      throw std::invalid_argument("theta grid must be strictly increasing");
  CoverageCurve curve;
  curve.points.reserve(thetas_db.size());
  for (const double db : thetas_db)
    curve.points.push_back({db, evaluate(db_to_linear(db)), std::nullopt, std::nullopt});
  return curve;
}

struct ShiftFit {
  double shift_db;
  double linf_gap;
};

namespace detail {
inline double interp_curve(const CoverageCurve& c, double theta_db) {
  const auto& p = c.points;
  auto it = std::lower_bound(p.begin(), p.end(), theta_db,
                             [](const CurvePoint& a, double v) { return a.theta_db < v; });
  if (it == p.begin()) return it->coverage;
  if (it == p.end()) return (it - 1)->coverage;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double t = (theta_db - lo.theta_db) / (hi.theta_db - lo.theta_db);
  return t == 0.0 ? lo.coverage : lo.coverage + t * (hi.coverage - lo.coverage);
}
}  // namespace detail

/// Horizontal dB shift minimizing the worst absolute probability gap between
/// target(theta) and reference(theta - shift), compared on the overlapping
/// support with linear interpolation inside the reference grid.
inline ShiftFit fit_db_shift(const CoverageCurve& reference, const CoverageCurve& target) {
  if (reference.points.size() < 5 || target.points.size() < 5)
    throw std::invalid_argument("curves must have at least 5 points");
  const double ref_lo = reference.points.front().theta_db;
  const double ref_hi = reference.points.back().theta_db;
  const auto gap = [&](double delta) {
    double worst = -1.0;
    for (const CurvePoint& pt : target.points) {
      const double x = pt.theta_db - delta;
      if (x < ref_lo || x > ref_hi) continue;
      worst = std::max(worst, std::abs(pt.coverage - detail::interp_curve(reference, x)));
    }
    return worst < 0.0 ? std::numeric_limits<double>::infinity() : worst;
  };
  const GoldenResult g = golden_minimize(gap, -10.0, 10.0, 1e-12);
  if (!std::isfinite(g.value)) throw std::invalid_argument("curves do not overlap");
  return {g.arg, g.value};
}

}  // namespace leocov
