#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "leocov/geometry.hpp"

namespace leocov {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes by Newton iteration on the Legendre recurrence (symmetric pairs).
inline GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("node count must be >= 1");
  GaussLegendre gl;
  gl.nodes.resize(n);
  gl.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    gl.nodes[i] = -x;
    gl.nodes[n - 1 - i] = x;
    gl.weights[i] = gl.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  return gl;
}

/// Fixed-order Gauss-Legendre integral of f over [a, b].
template <class F>
double integrate_gl(F&& f, double a, double b, int nodes) {
  const GaussLegendre gl = gauss_legendre(nodes);
  const double c = 0.5 * (b - a), m = 0.5 * (a + b);
  double acc = 0.0;
  for (int i = 0; i < nodes; ++i) acc += gl.weights[i] * f(m + c * gl.nodes[i]);
  return c * acc;
}

struct GoldenResult {
  double arg;
  double value;
};

/// Golden-section minimization of f on [a, b] to interval width `tol`.
/// Returns the best evaluated point (endpoints included).
template <class F>
GoldenResult golden_minimize(F&& f, double a, double b, double tol) {
  const double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  double best_x = f1 < f2 ? x1 : x2;
  double best_f = std::min(f1, f2);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
    if (f1 < best_f) {
      best_f = f1;
      best_x = x1;
    }
    if (f2 < best_f) {
      best_f = f2;
      best_x = x2;
    }
  }
  return {best_x, best_f};
}

namespace detail {

/// Regularized upper incomplete gamma Q(m, z) for integer shape m >= 1,
/// via the finite series in log space (stable for large z).
inline double upper_gamma_regularized(int m, double z) {
  if (m < 1) throw std::invalid_argument("shape must be a positive integer");
  if (z <= 0.0) return 1.0;
  double log_fact = 0.0;  // log k!
  double max_log = -z;    // k = 0 term
  std::vector<double> logs(m);
  logs[0] = -z;
  for (int k = 1; k < m; ++k) {
    log_fact += std::log(static_cast<double>(k));
    logs[k] = -z + k * std::log(z) - log_fact;
    if (logs[k] > max_log) max_log = logs[k];
  }
  double acc = 0.0;
  for (int k = 0; k < m; ++k) acc += std::exp(logs[k] - max_log);
  const double v = std::exp(max_log) * acc;
  return v > 1.0 ? 1.0 : v;
}

}  // namespace detail

}  // namespace leocov
