#pragma once

// Finite differences in the metric direction: the independent oracle for
// every variation formula. Space derivatives still come from jets; only the
// path parameter t is differenced.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "chernlab/linearization.hpp"

namespace chernlab {

struct FdResult {
  std::vector<double> value;           // Richardson-extrapolated derivative
  double error_estimate = 0;           // |extrapolated - finest stencil|, max norm
  std::vector<std::vector<double>> stencils;  // raw centred difference per dt
};

// Neville extrapolation to h -> 0 in the variable h = dt^2.
inline std::vector<double> richardson(const std::vector<std::vector<double>>& d, const std::vector<double>& dts) {
  const std::size_t k = d.size();
  std::vector<std::vector<double>> t = d;
  for (std::size_t level = 1; level < k; ++level)
    for (std::size_t i = k - 1; i >= level; --i) {
      const double hi = dts[i] * dts[i], lo = dts[i - level] * dts[i - level];
      for (std::size_t c = 0; c < t[i].size(); ++c) t[i][c] = (lo * t[i][c] - hi * t[i - 1][c]) / (lo - hi);
    }
  return t[k - 1];
}

inline double max_norm(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("size mismatch");
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Relative error with a unit floor on the reference scale.
inline double rel_error(const std::vector<double>& a, const std::vector<double>& ref) {
  return max_diff(a, ref) / std::max(1.0, max_norm(ref));
}

// Derivative of F(g_t) at t = 0. order 1 follows G + t eta; order 2 follows
// G exp(t G^{-1} eta) to second order (see metric_path).
template <class F>
FdResult fd_derivative(F&& f, const MetricJet& g, const PerturbationJet& eta, int order,
                       const std::vector<double>& dts) {
  if (order != 1 && order != 2) throw std::invalid_argument("finite-difference order must be 1 or 2");
  if (dts.empty()) throw std::invalid_argument("empty dt schedule");
  for (std::size_t i = 0; i < dts.size(); ++i)
    if (!(dts[i] > 0) || (i > 0 && !(dts[i] < dts[i - 1])))
      throw std::invalid_argument("dt schedule must be positive and decreasing");

  FdResult r;
  const std::vector<double> f0 = order == 2 ? f(g) : std::vector<double>{};
  for (double dt : dts) {
    const MetricJet gp = metric_path(g, eta, dt, order), gm = metric_path(g, eta, -dt, order);
    if (!is_positive_definite(values(gp)) || !is_positive_definite(values(gm)))
      throw std::domain_error("g_t is not positive definite at the requested dt");
    const std::vector<double> fp = f(gp), fm = f(gm);
    std::vector<double> d(fp.size());
    for (std::size_t c = 0; c < d.size(); ++c)
      d[c] = order == 1 ? (fp[c] - fm[c]) / (2.0 * dt) : (fp[c] - 2.0 * f0[c] + fm[c]) / (dt * dt);
    r.stencils.push_back(std::move(d));
  }
  r.value = richardson(r.stencils, dts);
  r.error_estimate = max_diff(r.value, r.stencils.back());
  return r;
}

// Flattening helpers for tensor-valued F.
inline std::vector<double> flatten(const CMat& m) {
  std::vector<double> v;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      v.push_back(m(i, j).real());
      v.push_back(m(i, j).imag());
    }
  return v;
}
inline std::vector<double> flatten(const OneFormValue& a) {
  std::vector<double> v;
  for (int k = 0; k < a.m; ++k) {
    v.push_back(a.c[k].real());
    v.push_back(a.c[k].imag());
  }
  return v;
}
inline std::vector<double> flatten(const RealVec& x) { return std::vector<double>(x.x.begin(), x.x.begin() + x.n); }
inline std::vector<double> flatten(double x) { return {x}; }

}  // namespace chernlab
