#pragma once

// Quadrature rules with the Riemannian volume density folded into the
// weights, and a deterministic parallel integrator.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "chernlab/geometry.hpp"

namespace chernlab {

struct QuadratureRule {
  std::string manifold;
  std::vector<Point> nodes;
  std::vector<double> weights;
  int order = 0;  // nodes per direction used to build the rule

  std::size_t size() const { return nodes.size(); }
  double total_weight() const;
};

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw std::invalid_argument("Gauss-Legendre order must be positive");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

// Fixed-tree pairwise sum: the grouping depends only on the length.
inline double pairwise_sum(const double* v, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

inline double QuadratureRule::total_weight() const { return pairwise_sum(weights); }

inline int worker_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("CHERNLAB_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

// Calls fn(i) for i in [0, n) on up to worker_count() threads. Exceptions are
// rethrown on the calling thread (the first by index wins).
namespace detail {
inline bool& in_parallel_region() {
  thread_local bool flag = false;
  return flag;
}
}  // namespace detail

// Nested calls run serially on the calling worker.
template <class F>
void parallel_for(std::size_t n, F&& fn) {
  int workers = static_cast<int>(std::min<std::size_t>(worker_count(), std::max<std::size_t>(n, 1)));
  if (detail::in_parallel_region()) workers = 1;
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      detail::in_parallel_region() = true;
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// sum_i w_i f(x_i); result independent of the thread count.
template <class F>
double integrate_nodes(const QuadratureRule& rule, F&& f) {
  std::vector<double> terms(rule.size());
  parallel_for(rule.size(), [&](std::size_t i) { terms[i] = rule.weights[i] * f(rule.nodes[i]); });
  return pairwise_sum(terms);
}

// ---------------------------------------------------------------------------
// Rule builders. `density` returns the Riemannian volume density with respect
// to the chart measure the rule is built on.

// Trapezoid rule on [0, period_a) per real coordinate, n nodes each.
template <class Density>
QuadratureRule torus_rule(const std::string& name, const ChartSpec& chart, int n, Density density) {
  chart.validate();
  if (n < 1) throw std::invalid_argument("grid size must be positive");
  const int d = 2 * chart.m;
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(n);
  QuadratureRule r;
  r.manifold = name;
  r.order = n;
  r.nodes.resize(total);
  r.weights.resize(total);
  double cell = 1.0;
  for (int a = 0; a < d; ++a) cell *= chart.periods[a] / n;
  for (std::size_t idx = 0; idx < total; ++idx) {
    Point p(d);
    std::size_t rem = idx;
    for (int a = d - 1; a >= 0; --a) {
      p[a] = chart.periods[a] * static_cast<double>(rem % n) / n;
      rem /= n;
    }
    r.nodes[idx] = p;
  }
  parallel_for(total, [&](std::size_t i) { r.weights[i] = cell * density(r.nodes[i]); });
  return r;
}

// Round sphere of radius `radius` through z = cot(theta/2) e^{i phi}:
// Gauss-Legendre in cos(theta) times trapezoid in phi. Poles are never nodes.
struct SphereNodes {
  std::vector<cplx> z;
  std::vector<double> w;
};

inline SphereNodes sphere_nodes(int n_gl, int n_phi, double radius) {
  if (n_gl < 1 || n_phi < 1) throw std::invalid_argument("grid size must be positive");
  if (!(radius > 0)) throw std::invalid_argument("radius must be positive");
  std::vector<double> x, w;
  gauss_legendre(n_gl, x, w);
  SphereNodes s;
  for (int i = 0; i < n_gl; ++i) {
    // cot(theta/2) = sqrt((1 + c) / (1 - c)) with c = cos(theta).
    const double rho = std::sqrt((1.0 + x[i]) / (1.0 - x[i]));
    for (int k = 0; k < n_phi; ++k) {
      const double phi = 2.0 * std::numbers::pi * (k + 0.5) / n_phi;
      s.z.push_back(std::polar(rho, phi));
      s.w.push_back(w[i] * 2.0 * std::numbers::pi / n_phi * radius * radius);
    }
  }
  return s;
}

// Azimuthal node count paired with n Gauss-Legendre nodes. Integrands of the
// sphere suites have azimuthal frequency below 8, where the trapezoid rule is
// exact, so fewer azimuthal nodes suffice.
inline int azimuth_nodes(int n_gl) { return std::max(8, n_gl / 4); }

inline QuadratureRule sphere_rule(const std::string& name, int n_gl, double radius) {
  const auto s = sphere_nodes(n_gl, azimuth_nodes(n_gl), radius);
  QuadratureRule r;
  r.manifold = name;
  r.order = n_gl;
  for (std::size_t i = 0; i < s.z.size(); ++i) {
    Point p(2);
    p[0] = s.z[i].real();
    p[1] = s.z[i].imag();
    r.nodes.push_back(p);
    r.weights.push_back(s.w[i]);
  }
  return r;
}

inline QuadratureRule sphere_product_rule(const std::string& name, int n_gl, double r1, double r2) {
  const auto a = sphere_nodes(n_gl, azimuth_nodes(n_gl), r1);
  const auto b = sphere_nodes(n_gl, azimuth_nodes(n_gl), r2);
  QuadratureRule r;
  r.manifold = name;
  r.order = n_gl;
  r.nodes.reserve(a.z.size() * b.z.size());
  r.weights.reserve(a.z.size() * b.z.size());
  for (std::size_t i = 0; i < a.z.size(); ++i)
    for (std::size_t j = 0; j < b.z.size(); ++j) {
      Point p(4);
      p[0] = a.z[i].real();
      p[1] = a.z[i].imag();
      p[2] = b.z[j].real();
      p[3] = b.z[j].imag();
      r.nodes.push_back(p);
      r.weights.push_back(a.w[i] * b.w[j]);
    }
  return r;
}

// Shell 1 <= |z| < 2 in C^2 in Hopf coordinates
// z1 = r cos(eta) e^{i xi1}, z2 = r sin(eta) e^{i xi2}; Euclidean measure
// r^3 sin(eta) cos(eta) dr d eta d xi1 d xi2, Gauss-Legendre in r and
// sin^2(eta), trapezoid in the angles.
template <class Density>
QuadratureRule annulus_rule(const std::string& name, int n, Density density) {
  if (n < 1) throw std::invalid_argument("grid size must be positive");
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  const int n_ang = std::max(8, n / 2);
  QuadratureRule r;
  r.manifold = name;
  r.order = n;
  const double dang = 2.0 * std::numbers::pi / n_ang;
  for (int i = 0; i < n; ++i) {
    const double rad = 1.5 + 0.5 * x[i];
    const double wr = 0.5 * w[i] * rad * rad * rad;
    for (int j = 0; j < n; ++j) {
      const double s2 = 0.5 * (1.0 + x[j]);  // sin^2(eta)
      const double ws = 0.25 * w[j];          // d(sin^2 eta) / 2 over [0, 1]
      const double se = std::sqrt(s2), ce = std::sqrt(1.0 - s2);
      for (int a = 0; a < n_ang; ++a)
        for (int b = 0; b < n_ang; ++b) {
          const double xi1 = dang * (a + 0.5), xi2 = dang * (b + 0.5);
          Point p(4);
          p[0] = rad * ce * std::cos(xi1);
          p[1] = rad * ce * std::sin(xi1);
          p[2] = rad * se * std::cos(xi2);
          p[3] = rad * se * std::sin(xi2);
          r.nodes.push_back(p);
          r.weights.push_back(wr * ws * dang * dang);
        }
    }
  }
  parallel_for(r.size(), [&](std::size_t i) { r.weights[i] *= density(r.nodes[i]); });
  return r;
}

}  // namespace chernlab
