#pragma once

// Pointwise complex linear algebra of a Hermitian vector space.
//
// Coordinate model: z^k = x^k + i y^k, real coordinates ordered
// (x^1, y^1, ..., x^m, y^m), J d/dx = d/dy. A Hermitian metric is stored as
// the matrix G(j, i) = g(d/dz^i, d/dzbar^j), so the Euclidean metric
// dx^2 + dy^2 has G = 1/2. A real (1,1)-form alpha = alpha_{jbar i} i dz^i ^ dzbar^j
// is stored as the matrix A(j, i) = alpha_{jbar i}. An element h of Sym^{1,1}
// is stored through its lowered form eta = G H, where H is the matrix of h
// on T^{1,0}; with these conventions rho_g(h) has coefficient matrix eta.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "chernlab/small_matrix.hpp"
#include "chernlab/taylor.hpp"

namespace chernlab {

inline constexpr int kMaxDim = kMaxVars / 2;

enum class ChartKind { PeriodicTorus, Stereographic, LogAnnulus };

struct ChartSpec {
  int m = 1;
  ChartKind kind = ChartKind::PeriodicTorus;
  std::array<double, kMaxVars> periods{};  // per real coordinate, tori only

  void validate() const {
    if (m < 1 || m > kMaxDim) throw std::invalid_argument("complex dimension must be 1 or 2");
    if (kind == ChartKind::PeriodicTorus) {
      for (int a = 0; a < 2 * m; ++a)
        if (!(periods[a] > 0)) throw std::invalid_argument("torus periods must be positive");
    }
  }
};

// A point or tangent vector in real chart coordinates.
struct RealVec {
  int n = 0;
  std::array<double, kMaxVars> x{};

  RealVec() = default;
  explicit RealVec(int size) : n(size) {}
  double& operator[](int a) { return x[a]; }
  double operator[](int a) const { return x[a]; }

  // Components xi^k of the (1,0)-part: X = xi^k d_k + conj(xi^k) dbar_k.
  std::array<cplx, kMaxDim> holomorphic() const {
    std::array<cplx, kMaxDim> xi{};
    for (int k = 0; k < n / 2; ++k) xi[k] = cplx(x[2 * k], x[2 * k + 1]);
    return xi;
  }
  static RealVec from_holomorphic(int m, const std::array<cplx, kMaxDim>& xi) {
    RealVec v(2 * m);
    for (int k = 0; k < m; ++k) {
      v[2 * k] = xi[k].real();
      v[2 * k + 1] = xi[k].imag();
    }
    return v;
  }
  RealVec rotated() const {  // J X
    RealVec v(n);
    for (int k = 0; k < n / 2; ++k) {
      v[2 * k] = -x[2 * k + 1];
      v[2 * k + 1] = x[2 * k];
    }
    return v;
  }
};

using Point = RealVec;

struct Form11Value {
  CMat coeffs;
};

struct Sym11Value {
  CMat eta;
  CMat metric;

  int dim() const { return eta.rows(); }
  CMat endo() const { return inverse(metric) * eta; }
};

// A real one-form through its dz components alpha_k = alpha(d/dz^k).
struct OneFormValue {
  int m = 0;
  std::array<cplx, kMaxDim> c{};
};

struct RealEndoValue {
  RMat e;
};

struct Traces {
  double real_trace;
  double complex_trace;
};

inline void require_hermitian(const CMat& a, double tol = 1e-12) {
  const double scale = std::max(1.0, max_abs(a));
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (std::abs(a(i, j) - std::conj(a(j, i))) > tol * scale)
        throw std::invalid_argument("matrix is not Hermitian");
}

inline void require_metric(const CMat& g) {
  require_hermitian(g);
  if (!is_positive_definite(g)) throw std::domain_error("metric is not positive definite");
}

inline Form11Value rho(const CMat& g, const Sym11Value& h) {
  if (g.rows() != h.dim()) throw std::invalid_argument("dimension mismatch");
  return {h.eta};
}

inline Sym11Value rho_inv(const CMat& g, const Form11Value& a) {
  if (g.rows() != a.coeffs.rows()) throw std::invalid_argument("dimension mismatch");
  require_metric(g);
  return {a.coeffs, g};
}

inline Sym11Value identity_endo(const CMat& g) { return {g, g}; }

inline Traces traces(const Sym11Value& h) {
  const cplx t = h.endo().trace();
  const CMat H = h.endo();
  if (std::abs(t.imag()) > 1e-12 * std::max(1.0, max_abs(H)))
    throw std::invalid_argument("complex trace is not real: eta is not Hermitian");
  return {2.0 * t.real(), t.real()};
}

inline double trace_form(const CMat& g, const Form11Value& a) {
  if (g.rows() != a.coeffs.rows()) throw std::invalid_argument("dimension mismatch");
  return (inverse(g) * a.coeffs).trace().real();
}

inline double inner(const CMat& g, const Sym11Value& a, const Sym11Value& b) {
  if (a.dim() != b.dim() || a.dim() != g.rows()) throw std::invalid_argument("dimension mismatch");
  const CMat gi = inverse(g);
  return 2.0 * (gi * a.eta * gi * b.eta).trace().real();
}

inline double inner(const CMat& g, const OneFormValue& a, const OneFormValue& b) {
  if (a.m != b.m || a.m != g.rows()) throw std::invalid_argument("dimension mismatch");
  const CMat gi = inverse(g);
  cplx s = 0;
  for (int i = 0; i < a.m; ++i)
    for (int j = 0; j < a.m; ++j) s += gi(i, j) * a.c[i] * std::conj(b.c[j]);
  return 2.0 * s.real();
}

// ---------------------------------------------------------------------------
// Real-coordinate representations. Templated on the scalar so that jets of
// complex quantities convert to jets of real ones.

namespace detail {
inline double re_of(double x) { return x; }
inline double im_of(double) { return 0.0; }
inline double re_of(cplx x) { return x.real(); }
inline double im_of(cplx x) { return x.imag(); }
template <int N>
RJet<N> re_of(const CJet<N>& x) {
  return real(x);
}
template <int N>
RJet<N> im_of(const CJet<N>& x) {
  return imag(x);
}
}  // namespace detail

// Real metric g(d_a, d_b) from the Hermitian matrix G.
template <class S>
auto real_metric(const SmallMat<S>& G) {
  const int m = G.rows();
  using R = std::decay_t<decltype(detail::re_of(G(0, 0)))>;
  SmallMat<R> r(2 * m, 2 * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const R re = detail::re_of(G(j, i)) * 2.0;
      const R im = detail::im_of(G(j, i)) * 2.0;
      r(2 * i, 2 * j) = re;
      r(2 * i, 2 * j + 1) = im;
      r(2 * i + 1, 2 * j) = -im;
      r(2 * i + 1, 2 * j + 1) = re;
    }
  return r;
}

// Inverse of real_metric on J-invariant real metrics.
inline CMat complex_metric(const RMat& r) {
  const int m = r.rows() / 2;
  CMat G(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) G(j, i) = cplx(r(2 * i, 2 * j), r(2 * i, 2 * j + 1)) * 0.5;
  return G;
}

// Real 2m x 2m matrix (columns are images of d/dx^k, d/dy^k) of the real
// endomorphism whose restriction to T^{1,0} has matrix H.
template <class S>
auto real_endo(const SmallMat<S>& H) {
  const int m = H.rows();
  using R = std::decay_t<decltype(detail::re_of(H(0, 0)))>;
  SmallMat<R> r(2 * m, 2 * m);
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i) {
      const R re = detail::re_of(H(k, i));
      const R im = detail::im_of(H(k, i));
      r(2 * k, 2 * i) = re;
      r(2 * k, 2 * i + 1) = -im;
      r(2 * k + 1, 2 * i) = im;
      r(2 * k + 1, 2 * i + 1) = re;
    }
  return r;
}

// Restriction to T^{1,0} of a J-commuting real endomorphism.
inline CMat complex_endo(const RMat& r) {
  const int m = r.rows() / 2;
  CMat H(m, m);
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i) H(k, i) = cplx(r(2 * k, 2 * i), r(2 * k + 1, 2 * i));
  return H;
}

inline RMat complex_structure(int m) {
  RMat j(2 * m, 2 * m);
  for (int k = 0; k < m; ++k) {
    j(2 * k + 1, 2 * k) = 1.0;
    j(2 * k, 2 * k + 1) = -1.0;
  }
  return j;
}

inline RealEndoValue to_real(const Sym11Value& h) { return {real_endo(h.endo())}; }

// Real components alpha(d/dx^k), alpha(d/dy^k).
template <class S>
std::array<std::decay_t<decltype(detail::re_of(std::declval<S>()))>, kMaxVars> real_components(
    int m, const std::array<S, kMaxDim>& c) {
  std::array<std::decay_t<decltype(detail::re_of(std::declval<S>()))>, kMaxVars> r{};
  for (int k = 0; k < m; ++k) {
    r[2 * k] = detail::re_of(c[k]) * 2.0;
    r[2 * k + 1] = detail::im_of(c[k]) * -2.0;
  }
  return r;
}

inline OneFormValue one_form_from_real(int m, const std::array<double, kMaxVars>& r) {
  OneFormValue a{m, {}};
  for (int k = 0; k < m; ++k) a.c[k] = cplx(r[2 * k], -r[2 * k + 1]) * 0.5;
  return a;
}

inline double inner(const CMat& g, const RealEndoValue& a, const RealEndoValue& b) {
  const RMat gr = real_metric(g);
  if (a.e.rows() != gr.rows() || b.e.rows() != gr.rows()) throw std::invalid_argument("dimension mismatch");
  return (a.e * inverse(gr) * b.e.transpose() * gr).trace();
}
inline double inner(const CMat& g, const Sym11Value& a, const RealEndoValue& b) { return inner(g, to_real(a), b); }
inline double inner(const CMat& g, const RealEndoValue& a, const Sym11Value& b) { return inner(g, a, to_real(b)); }

// g(V, W) for real vectors.
inline double metric_pairing(const CMat& g, const RealVec& v, const RealVec& w) {
  const RMat gr = real_metric(g);
  double s = 0;
  for (int a = 0; a < v.n; ++a)
    for (int b = 0; b < w.n; ++b) s += gr(a, b) * v[a] * w[b];
  return s;
}

// Image under an endomorphism given by its T^{1,0} matrix.
inline RealVec apply_endo(const CMat& H, const RealVec& v) {
  const int m = H.rows();
  const auto xi = v.holomorphic();
  std::array<cplx, kMaxDim> out{};
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i) out[k] += H(k, i) * xi[i];
  return RealVec::from_holomorphic(m, out);
}

// alpha(X, Y) for the real (1,1)-form with coefficient matrix A.
inline double form_eval(const CMat& A, const RealVec& x, const RealVec& y) {
  const int m = A.rows();
  const auto xi = x.holomorphic();
  const auto up = y.holomorphic();
  cplx s = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) s += A(j, i) * (xi[i] * std::conj(up[j]) - up[i] * std::conj(xi[j]));
  return (cplx(0, 1) * s).real();
}

// alpha o h: (alpha o h)(X) = alpha(h X).
inline OneFormValue compose(const OneFormValue& a, const CMat& H) {
  OneFormValue r{a.m, {}};
  for (int j = 0; j < a.m; ++j)
    for (int l = 0; l < a.m; ++l) r.c[j] += a.c[l] * H(l, j);
  return r;
}

inline OneFormValue operator-(const OneFormValue& a, const OneFormValue& b) {
  OneFormValue r{a.m, {}};
  for (int k = 0; k < a.m; ++k) r.c[k] = a.c[k] - b.c[k];
  return r;
}
inline OneFormValue operator+(const OneFormValue& a, const OneFormValue& b) {
  OneFormValue r{a.m, {}};
  for (int k = 0; k < a.m; ++k) r.c[k] = a.c[k] + b.c[k];
  return r;
}

}  // namespace chernlab
