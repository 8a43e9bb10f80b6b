#pragma once

// Pointwise Chern and Levi-Civita calculus from metric jets.
//
// Chern quantities use complex indices: Gamma_i = G^{-1} d_i G holds
// Gamma^k_{ij} at (k, j); the curvature components
// Omega_{jbar i lbar k} = -G(l,k)_{,i jbar} + (G_{,jbar} G^{-1} G_{,i})(l, k)
// are stored as om[j][i](l, k). The curvature operator follows
// Omega(X, Y) = nabla_{[X,Y]} - [nabla_X, nabla_Y], so on T^{1,0}
// Omega(X, Y) = -sum (xi^i conj(v^j) - v^i conj(xi^j)) G^{-1} om[j][i].
// Levi-Civita quantities use real coordinates through real_metric.
//
// dd^c u(X, Y) = X(JY u) - Y(JX u) for commuting X, Y; its coefficient
// matrix is -2 u_{,i jbar}, which makes Tr^C(dd^c u) = Delta u + g(du, theta)
// with the nonnegative Laplacian Delta = d^* d.

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "chernlab/fields.hpp"
#include "chernlab/geometry.hpp"
#include "chernlab/small_matrix.hpp"

namespace chernlab {

inline constexpr const char* kConventionHeader =
    "ddc=eq-ddcu (Tr^C ddc u = Delta u + g(du,theta)); Delta=d*d>=0; "
    "Omega(X,Y)=nabla_[X,Y]-[nabla_X,nabla_Y]; G(j,i)=g(d_i,dbar_j), flat G=1/2";

namespace detail {

[[noreturn]] inline void crosscheck_failed(const std::string& what, double defect, double tol) {
  std::ostringstream os;
  os.precision(3);
  os << what << " cross-check failed: defect " << defect << " > " << tol;
  throw std::logic_error(os.str());
}

inline double rel_scale(double v) { return std::max(1.0, std::abs(v)); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Generic jet kernels. Each loses derivative orders as noted.

template <int N>
std::array<CJetMat<N - 1>, kMaxDim> christoffel_jets(const CJetMat<N>& G) {
  const int m = G.rows();
  const CJetMat<N - 1> Gi = inverse(truncate<N - 1>(G));
  std::array<CJetMat<N - 1>, kMaxDim> gam;
  for (int i = 0; i < m; ++i) gam[i] = Gi * dz(G, i);
  return gam;
}

template <int N>
using CurvatureJets = std::array<std::array<CJetMat<N>, kMaxDim>, kMaxDim>;

template <int N>
CurvatureJets<N - 2> curvature_jets(const CJetMat<N>& G) {
  const int m = G.rows();
  const CJetMat<N - 2> Gi = inverse(truncate<N - 2>(G));
  CurvatureJets<N - 2> om;
  for (int i = 0; i < m; ++i) {
    const auto dGi = dz(G, i);
    for (int j = 0; j < m; ++j) om[j][i] = dzb(G, j) * Gi * dGi - dzb(dGi, j);
  }
  return om;
}

// Coefficient matrix of the first Chern-Ricci form, S~(j, i) = tr(G^{-1} om[j][i]).
template <int N>
CJetMat<N - 2> ricci_form_jets(const CJetMat<N>& G) {
  const int m = G.rows();
  const CJetMat<N - 2> Gi = inverse(truncate<N - 2>(G));
  const auto om = curvature_jets(G);
  CJetMat<N - 2> st(m, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) st(j, i) = (Gi * om[j][i]).trace();
  return st;
}

// Lee form components theta_k = theta(d/dz^k).
template <int N>
std::array<CJet<N - 1>, kMaxDim> lee_jets(const CJetMat<N>& G) {
  const int m = G.rows();
  const auto gam = christoffel_jets(G);
  std::array<CJet<N - 1>, kMaxDim> th{};
  for (int k = 0; k < m; ++k) {
    CJet<N - 1> s = gam[k].trace();
    for (int i = 0; i < m; ++i) s -= gam[i](i, k);
    th[k] = s;
  }
  return th;
}

// Levi-Civita Christoffels, gamma[c](a, b) = Gamma^c_{ab}.
template <int N>
std::array<RJetMat<N - 1>, kMaxVars> lc_christoffel_jets(const RJetMat<N>& gr) {
  const int n = gr.rows();
  const RJetMat<N - 1> gi = inverse(truncate<N - 1>(gr));
  std::array<RJetMat<N - 1>, kMaxVars> dg;
  for (int e = 0; e < n; ++e) dg[e] = partial(gr, e);
  std::array<RJetMat<N - 1>, kMaxVars> gam;
  for (int c = 0; c < n; ++c) {
    gam[c] = RJetMat<N - 1>(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) {
        RJet<N - 1> s;
        for (int d = 0; d < n; ++d) s += gi(c, d) * (dg[a](d, b) + dg[b](d, a) - dg[d](a, b));
        gam[c](a, b) = s * 0.5;
        gam[c](b, a) = gam[c](a, b);
      }
  }
  return gam;
}

// tr^C h = Re tr(G^{-1} eta) as a jet.
template <int N, int M>
auto trace_c_jet(const CJetMat<N>& G, const CJetMat<M>& eta) {
  constexpr int K = N < M ? N : M;
  return real((inverse(truncate<K>(G)) * truncate<K>(eta)).trace());
}

// nabla_k A = d_k A + [Gamma_k, A] and nabla_kbar A = dbar_k A on an
// endomorphism field A of T^{1,0}.
template <int M, int K>
auto nabla_hol(const CJetMat<M>& A, const std::array<CJetMat<K>, kMaxDim>& gam, int k) {
  return dz(A, k) + commutator(gam[k], A);
}
template <int M>
auto nabla_antihol(const CJetMat<M>& A, int k) {
  return dzb(A, k);
}

// nabla_X A for a constant coordinate vector X.
template <int M, int K>
CJetMat<M - 1> nabla_dir(const CJetMat<M>& A, const std::array<CJetMat<K>, kMaxDim>& gam, const RealVec& X) {
  static_assert(K >= M - 1, "Christoffel jets too short");
  const int m = A.rows();
  const auto xi = X.holomorphic();
  CJetMat<M - 1> r(m, m);
  for (int k = 0; k < m; ++k) {
    if (xi[k] == cplx(0)) continue;
    r += nabla_hol(A, gam, k) * xi[k];
    r += nabla_antihol(A, k) * std::conj(xi[k]);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Value types.

struct ChernChristoffelValue {
  int m = 0;
  std::array<CMat, kMaxDim> gamma;  // gamma[i](k, j) = Gamma^k_{ij}
  cplx operator()(int k, int i, int j) const { return gamma[i](k, j); }
};

struct ChernCurvatureValue {
  int m = 0;
  std::array<std::array<CMat, kMaxDim>, kMaxDim> om;  // om[j][i](l, k)
  cplx operator()(int j, int i, int l, int k) const { return om[j][i](l, k); }
};

struct LCChristoffelValue {
  int n = 0;
  std::array<RMat, kMaxVars> gamma;  // gamma[c](a, b) = Gamma^c_{ab}
  double operator()(int c, int a, int b) const { return gamma[c](a, b); }
};

struct TorsionLeeValue {
  int m = 0;
  std::array<CMat, kMaxDim> torsion;  // torsion[k](i, j) = T^k_{ij}
  OneFormValue theta;
  double dstar_theta = 0;
  double frame_defect = 0;  // |theta - Tr^C(X _| d omega)| over coordinate vectors
};

struct ChernRicciValue {
  Form11Value s_tilde;
  Sym11Value s;
  double logdet_defect = 0;  // |S~ + d dbar log det G|, relative
};

struct LeviCivitaValue {
  double laplacian = 0;
  RealEndoValue hessian;  // g(Hess X, Y) = (D du)(X, Y)
  RMat hessian_form;      // (D du)(d_a, d_b)
  LCChristoffelValue christoffel;
};

struct DivergenceValue {
  OneFormValue delta_g;
  OneFormValue delta_nabla;
};

// ---------------------------------------------------------------------------
// Operations on metric 2-jets.

inline void require_metric_jet(const MetricJet& g) { require_metric(values(g)); }

inline ChernChristoffelValue chern_christoffel(const MetricJet& g) {
  require_metric_jet(g);
  const auto gam = christoffel_jets(truncate<1>(g));
  ChernChristoffelValue v;
  v.m = g.rows();
  for (int i = 0; i < v.m; ++i) v.gamma[i] = values(gam[i]);
  return v;
}

inline ChernCurvatureValue chern_curvature(const MetricJet& g) {
  require_metric_jet(g);
  const auto om = curvature_jets(g);
  ChernCurvatureValue v;
  v.m = g.rows();
  for (int j = 0; j < v.m; ++j)
    for (int i = 0; i < v.m; ++i) v.om[j][i] = values(om[j][i]);
  return v;
}

inline ChernRicciValue chern_ricci(const MetricJet& g) {
  require_metric_jet(g);
  const int m = g.rows();
  const CMat G = values(g);
  const CMat st = values(ricci_form_jets(g));
  // -d_i dbar_j log det G
  const RJet<2> ld = log(real(determinant(g)));
  CMat ref(m, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) ref(j, i) = -dz(dzb(ld, j), i).value();
  const double defect = max_abs(st - ref) / std::max(1.0, max_abs(ref));
  if (defect > 1e-10) detail::crosscheck_failed("Chern-Ricci vs log det", defect, 1e-10);
  ChernRicciValue v;
  v.s_tilde = {st};
  v.s = {st, G};
  v.logdet_defect = defect;
  return v;
}

// scal^Ch = 2 g^{k lbar} g^{i jbar} Omega_{jbar i lbar k}, checked against
// 2 Tr^C(S~).
inline double chern_scalar(const MetricJet& g) {
  require_metric_jet(g);
  const int m = g.rows();
  const CMat Gi = inverse(values(g));
  const auto om = chern_curvature(g);
  cplx s = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) s += Gi(k, l) * Gi(i, j) * om.om[j][i](l, k);
  const double loc = 2.0 * s.real();
  const double viaform = 2.0 * trace_form(values(g), chern_ricci(g).s_tilde);
  const double defect = std::abs(loc - viaform) / detail::rel_scale(loc);
  if (defect > 1e-11) detail::crosscheck_failed("locscal vs 2 Tr^C S~", defect, 1e-11);
  return loc;
}

// Tr^C of a real 2-form b(d_a, d_c) in real coordinates: (1/2) g^{ab} b_{ac} J^c_b.
inline double trace_c_real_form(const RMat& gr_inv, const RMat& b) {
  const int n = b.rows();
  const RMat J = complex_structure(n / 2);
  double s = 0;
  for (int a = 0; a < n; ++a)
    for (int bb = 0; bb < n; ++bb)
      for (int c = 0; c < n; ++c) s += gr_inv(a, bb) * b(a, c) * J(c, bb);
  return 0.5 * s;
}

inline TorsionLeeValue torsion_and_lee(const MetricJet& g) {
  require_metric_jet(g);
  const int m = g.rows();
  const int n = 2 * m;
  TorsionLeeValue v;
  v.m = m;
  const auto gam = christoffel_jets(g);
  for (int k = 0; k < m; ++k) {
    v.torsion[k] = CMat(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) v.torsion[k](i, j) = gam[i](k, j).value() - gam[j](k, i).value();
  }
  const auto th = lee_jets(g);
  v.theta.m = m;
  for (int k = 0; k < m; ++k) v.theta.c[k] = th[k].value();

  // d^* theta = -(1 / sqrt det) d_a (sqrt det g^{ab} theta_b)
  const RJetMat<1> gr = real_metric(truncate<1>(g));
  const auto thr = real_components(m, th);
  const RJet<1> sd = sqrt(determinant(gr));
  const RJetMat<1> gri = inverse(gr);
  double div = 0;
  for (int a = 0; a < n; ++a) {
    RJet<1> w;
    for (int b = 0; b < n; ++b) w += gri(a, b) * thr[b];
    div += partial(sd * w, a).value();
  }
  v.dstar_theta = -div / sd.value();

  // Frame definition theta(X) = Tr^C(X _| d omega), omega_ab = g(J d_a, d_b).
  const RMat J = complex_structure(m);
  std::array<RMat, kMaxVars> dom;  // dom[e](a, b) = d_e omega_ab
  for (int e = 0; e < n; ++e) {
    dom[e] = RMat(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double s = 0;
        for (int c = 0; c < n; ++c) s += J(c, a) * gr(c, b).d(e);
        dom[e](a, b) = s;
      }
  }
  const RMat gi = values(gri);
  const auto threal = real_components(m, v.theta.c);
  double defect = 0, scale = 1.0;
  for (int e = 0; e < n; ++e) {
    RMat b(n, n);
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c) b(a, c) = dom[e](a, c) - dom[a](e, c) + dom[c](e, a);
    const double frame = trace_c_real_form(gi, b);
    defect = std::max(defect, std::abs(frame - threal[e]));
    scale = std::max(scale, std::abs(threal[e]));
  }
  v.frame_defect = defect / scale;
  if (v.frame_defect > 1e-10) detail::crosscheck_failed("Lee form vs Tr^C(X _| d omega)", v.frame_defect, 1e-10);
  return v;
}

// dd^c u with coefficient matrix -2 u_{,i jbar}.
inline Form11Value ddc_scalar(const ScalarJet& u) {
  const int m = u.nvars() / 2;
  CMat A(m, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) A(j, i) = -2.0 * dz(dzb(u, j), i).value();
  return {A};
}
inline Form11Value ddc_scalar(const ScalarJet& u, const Point&) { return ddc_scalar(u); }

inline LCChristoffelValue lc_christoffel(const MetricJet& g) {
  const auto gam = lc_christoffel_jets(real_metric(truncate<1>(g)));
  LCChristoffelValue v;
  v.n = 2 * g.rows();
  for (int c = 0; c < v.n; ++c) v.gamma[c] = values(gam[c]);
  return v;
}

namespace detail {

inline LeviCivitaValue levi_civita_from(const LCChristoffelValue& lc, const RMat& gi, const ScalarJet& u) {
  const int n = lc.n;
  LeviCivitaValue v;
  v.christoffel = lc;
  RMat hc(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double s = u.d(a, b);
      for (int c = 0; c < n; ++c) s -= lc(c, a, b) * u.d(c);
      hc(a, b) = s;
    }
  v.hessian_form = hc;
  v.hessian = {gi * hc};
  double lap = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) lap -= gi(a, b) * hc(a, b);
  v.laplacian = lap;
  return v;
}

}  // namespace detail

inline LeviCivitaValue levi_civita(const MetricJet& g, const ScalarJet& u) {
  require_metric_jet(g);
  return detail::levi_civita_from(lc_christoffel(g), inverse(real_metric(values(g))), u);
}

// Riemannian scalar curvature from the Levi-Civita connection; independent
// of every Chern formula above.
inline double riemannian_scalar(const MetricJet& g) {
  const int n = 2 * g.rows();
  const auto gam = lc_christoffel_jets(real_metric(g));
  const RMat gi = inverse(real_metric(values(g)));
  auto G = [&](int a, int b, int c) { return gam[a](b, c).value(); };
  auto dG = [&](int e, int a, int b, int c) { return gam[a](b, c).d(e); };
  double scal = 0;
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d) {
      double ric = 0;  // R^a_{bad}
      for (int a = 0; a < n; ++a) {
        double r = dG(a, a, d, b) - dG(d, a, a, b);
        for (int e = 0; e < n; ++e) r += G(a, a, e) * G(e, d, b) - G(a, d, e) * G(e, a, b);
        ric += r;
      }
      scal += gi(b, d) * ric;
    }
  return scal;
}

// Lowered perturbation jets to endomorphism jets H = G^{-1} eta.
template <int N>
CJetMat<N> endo_jets(const CJetMat<N>& G, const CJetMat<N>& eta) {
  return inverse(G) * eta;
}

namespace detail {

template <int K>
DivergenceValue divergences_from(const CJetMat<1>& Gi, const std::array<CJetMat<K>, kMaxDim>& gam,
                                 const LCChristoffelValue& lc, const PerturbationJet& eta) {
  const int m = Gi.rows();
  const int n = 2 * m;
  const CJetMat<1> H = Gi * truncate<1>(eta);
  DivergenceValue v;

  // delta^nabla h_j = sum_k (nabla_k H)(k, j)
  v.delta_nabla.m = m;
  for (int k = 0; k < m; ++k) {
    const CMat nk = values(nabla_hol(H, gam, k));
    for (int j = 0; j < m; ++j) v.delta_nabla.c[j] += nk(k, j);
  }

  // delta_g h(d_b) = sum_c (D_c E)(c, b) in real coordinates
  const auto E = real_endo(H);
  const RMat Ev = values(E);
  std::array<double, kMaxVars> r{};
  for (int b = 0; b < n; ++b) {
    double s = 0;
    for (int c = 0; c < n; ++c) {
      s += E(c, b).d(c);
      for (int d = 0; d < n; ++d) s += lc(c, c, d) * Ev(d, b) - Ev(c, d) * lc(d, c, b);
    }
    r[b] = s;
  }
  v.delta_g = one_form_from_real(m, r);
  return v;
}

}  // namespace detail

inline DivergenceValue divergences(const MetricJet& g, const PerturbationJet& eta) {
  require_metric_jet(g);
  const auto g1 = truncate<1>(g);
  return detail::divergences_from(inverse(g1), christoffel_jets(g1), lc_christoffel(g), eta);
}

// Chern covariant derivatives of h along constant coordinate vectors:
// nabla_X H, and nabla_X (nabla_Y H).
inline CMat chern_cov_deriv(const MetricJet& g, const PerturbationJet& eta, const RealVec& X) {
  require_metric_jet(g);
  const auto H = endo_jets(truncate<1>(g), truncate<1>(eta));
  return values(nabla_dir(H, christoffel_jets(truncate<1>(g)), X));
}

inline CMat chern_cov_deriv(const MetricJet& g, const PerturbationJet& eta, const RealVec& X, const RealVec& Y) {
  require_metric_jet(g);
  const auto H = endo_jets(g, eta);
  const auto gam = christoffel_jets(g);
  return values(nabla_dir(nabla_dir(H, gam, Y), gam, X));
}

// Omega(X, Y) restricted to T^{1,0}.
inline CMat curvature_endo(const MetricJet& g, const RealVec& X, const RealVec& Y) {
  const int m = g.rows();
  const auto om = chern_curvature(g);
  const CMat Gi = inverse(values(g));
  const auto xi = X.holomorphic(), up = Y.holomorphic();
  CMat r(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const cplx c = xi[i] * std::conj(up[j]) - up[i] * std::conj(xi[j]);
      if (c != cplx(0)) r -= (Gi * om.om[j][i]) * c;
    }
  return r;
}

// || S - (scal / 2m) Id || in the inner(g) norm.
inline double fce_residual(const MetricJet& g) {
  const int m = g.rows();
  const CMat G = values(g);
  const auto ric = chern_ricci(g);
  const double scal = chern_scalar(g);
  const Sym11Value d{ric.s_tilde.coeffs - G * cplx(scal / (2.0 * m)), G};
  return std::sqrt(std::max(0.0, inner(G, d, d)));
}

// max |d S~| from a metric 3-jet; zero for Kahler metrics.
inline double ricci_form_closedness(const CJetMat<3>& g) {
  const int m = g.rows();
  const auto st = ricci_form_jets(g);
  double mx = 0;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k) mx = std::max(mx, std::abs(dz(st(j, i), k).value() - dz(st(j, k), i).value()));
  return mx;
}

// ---------------------------------------------------------------------------
// Pointwise quantities shared by several operators at one point. Building
// this once per quadrature node avoids recomputing Christoffels, the Lee form
// and the Chern-Ricci form in every operator.

struct MetricGeometry {
  MetricJet g;
  CMat G;
  CJetMat<2> Gi;
  std::array<CJetMat<1>, kMaxDim> gamma;  // Chern Christoffel jets
  LCChristoffelValue lc;
  RMat gr_inv;
  TorsionLeeValue lee;
  ChernRicciValue ricci;

  explicit MetricGeometry(const MetricJet& gj)
      : g(gj), G(values(gj)), Gi(inverse(gj)), lc(lc_christoffel(gj)), gr_inv(inverse(real_metric(G))),
        lee(torsion_and_lee(gj)), ricci(chern_ricci(gj)) {
    for (int i = 0; i < G.rows(); ++i) gamma[i] = truncate<1>(Gi) * dz(truncate<2>(g), i);
  }

  int dim() const { return G.rows(); }

  // tr^C h = Re tr(G^{-1} eta), diagonal entries only.
  ScalarJet trace_c(const PerturbationJet& eta) const {
    const int m = dim();
    CJet<2> t;
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l) t += Gi(k, l) * eta(l, k);
    return real(t);
  }
  CJetMat<2> endo(const PerturbationJet& eta) const { return Gi * eta; }
  LeviCivitaValue levi_civita(const ScalarJet& u) const { return detail::levi_civita_from(lc, gr_inv, u); }
  DivergenceValue divergences(const PerturbationJet& eta) const {
    return detail::divergences_from(truncate<1>(Gi), gamma, lc, eta);
  }
};

// fce residual from a prepared geometry and its scal^Ch.
inline double fce_residual(const MetricGeometry& geo, double scal) {
  const Sym11Value d{geo.ricci.s_tilde.coeffs - geo.G * cplx(scal / (2.0 * geo.dim())), geo.G};
  return std::sqrt(std::max(0.0, inner(geo.G, d, d)));
}

}  // namespace chernlab
