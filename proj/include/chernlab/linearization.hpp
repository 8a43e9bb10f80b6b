#pragma once

// Variations along g_t = g((Id + t h) ., ..), the operators gamma and
// gamma^*, the second variation of scal^Ch and the obstruction integral.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "chernlab/chern.hpp"
#include "chernlab/manifolds.hpp"

namespace chernlab {

struct VariationInput {
  MetricJet g;
  PerturbationJet h1;
  std::optional<PerturbationJet> h2;
  std::optional<ScalarJet> u;
  Point point;

  const PerturbationJet& second() const { return h2 ? *h2 : h1; }
  const ScalarJet& scalar() const {
    if (!u) throw std::invalid_argument("variation needs a scalar field u");
    return *u;
  }
};

inline VariationInput make_input(const ManifoldSpec& s, const MatrixField& h, const Point& p) {
  VariationInput in;
  in.g = s.metric_jet(p);
  in.h1 = h.eval2(p);
  in.point = p;
  return in;
}

namespace detail {

inline CMat metric_value(const VariationInput& in) { return values(in.g); }

inline Sym11Value sym(const CMat& G, const CMat& eta) { return {eta, G}; }

inline OneFormValue differential(const ScalarJet& f) {
  OneFormValue a{f.nvars() / 2, {}};
  for (int k = 0; k < a.m; ++k) a.c[k] = dz(f, k).value();
  return a;
}

inline ScalarJet trace_c(const MetricJet& g, const PerturbationJet& eta) { return trace_c_jet(g, eta); }

// Real trace tr^R h = 2 Re tr(H), assembled from the real endomorphism.
inline ScalarJet trace_r_endo(const CJetMat<2>& H) {
  const auto E = real_endo(H);
  RJet<2> t;
  for (int a = 0; a < E.rows(); ++a) t += E(a, a);
  return t;
}
inline ScalarJet trace_r(const MetricJet& g, const PerturbationJet& eta) { return trace_r_endo(endo_jets(g, eta)); }

}  // namespace detail

// nabla'_X Y = xi^i (nabla_i H) v on T^{1,0}, equal to
// (1/2)[(nabla_X h)(Y) - (J o nabla_{JX} h)(Y)].
inline RealVec var_connection(const VariationInput& in, const RealVec& X, const RealVec& Y) {
  const int m = in.g.rows();
  const auto g1 = truncate<1>(in.g);
  const auto H = endo_jets(g1, truncate<1>(in.h1));
  const auto gam = christoffel_jets(g1);
  const auto xi = X.holomorphic(), up = Y.holomorphic();
  std::array<cplx, kMaxDim> out{};
  for (int i = 0; i < m; ++i) {
    if (xi[i] == cplx(0)) continue;
    const CMat nh = values(nabla_hol(H, gam, i));
    for (int k = 0; k < m; ++k)
      for (int j = 0; j < m; ++j) out[k] += xi[i] * nh(k, j) * up[j];
  }
  return RealVec::from_holomorphic(m, out);
}

// (Tr^C)'(a) = -1/2 g(h, rho^{-1}(a)).
inline double var_trace(const VariationInput& in, const Form11Value& a) {
  const CMat G = values(in.g);
  return -0.5 * inner(G, detail::sym(G, values(in.h1)), rho_inv(G, a));
}

// 2 Omega'(X, Y) = [Omega(X, Y), h] + J o (nabla_X nabla_{JY} h - nabla_Y nabla_{JX} h)
// for constant coordinate vectors X, Y; matrix on T^{1,0}.
inline CMat var_curvature(const VariationInput& in, const RealVec& X, const RealVec& Y) {
  const CMat H = values(endo_jets(in.g, in.h1));
  const CMat om = curvature_endo(in.g, X, Y);
  const CMat a = chern_cov_deriv(in.g, in.h1, X, Y.rotated());
  const CMat b = chern_cov_deriv(in.g, in.h1, Y, X.rotated());
  return (commutator(om, H) + (a - b) * cplx(0, 1)) * cplx(0.5);
}

// S~' = 1/2 dd^c(tr^C h).
inline Form11Value var_ricci_form(const VariationInput& in) {
  const auto f = detail::trace_c(in.g, in.h1);
  return {ddc_scalar(f).coeffs * cplx(0.5)};
}

// theta' = d(tr^C h) - delta^nabla h.
inline OneFormValue var_lee(const VariationInput& in) {
  const auto f = detail::trace_c(in.g, in.h1);
  return detail::differential(f) - divergences(in.g, in.h1).delta_nabla;
}

// Delta' u = g(Hess u, h) + g(du, delta_g h) - g(du, d tr^C h).
inline double var_laplacian(const VariationInput& in) {
  const ScalarJet& u = in.scalar();
  const CMat G = values(in.g);
  const auto lc = levi_civita(in.g, u);
  const auto du = detail::differential(u);
  const auto div = divergences(in.g, in.h1);
  const auto df = detail::differential(detail::trace_c(in.g, in.h1));
  return inner(G, lc.hessian, detail::sym(G, values(in.h1))) + inner(G, du, div.delta_g) - inner(G, du, df);
}

// g(S' X, Y) = -g((h o S) X, Y) + 1/2 dd^c(tr^C h)(X, JY).
inline double var_ricci_endo(const VariationInput& in, const RealVec& X, const RealVec& Y) {
  const CMat G = values(in.g);
  const CMat H = values(endo_jets(in.g, in.h1));
  const CMat S = chern_ricci(in.g).s.endo();
  const auto ddc = ddc_scalar(detail::trace_c(in.g, in.h1));
  return -metric_pairing(G, apply_endo(H * S, X), Y) + 0.5 * form_eval(ddc.coeffs, X, Y.rotated());
}

// g(alpha, beta)' = -g(alpha o h, beta).
inline double var_pairing(const VariationInput& in, const OneFormValue& a, const OneFormValue& b) {
  const CMat G = values(in.g);
  return -inner(G, compose(a, values(endo_jets(in.g, in.h1))), b);
}

// g(A, B)' for g-symmetric endomorphisms A, B held fixed: tr(h [A, B]) = 0.
inline double var_endo_pairing(const VariationInput&, const Sym11Value&, const Sym11Value&) { return 0.0; }

struct GammaValue {
  double value = 0;        // Delta f + g(df, theta) - g(h, S), f = tr^C h
  double real_form = 0;    // 1/2 (Delta tr^R h + g(d tr^R h, theta)) - g(h, S)
};

inline GammaValue gamma_both(const MetricGeometry& geo, const PerturbationJet& eta) {
  const CMat& G = geo.G;
  const auto f = geo.trace_c(eta);
  const auto fr = detail::trace_r_endo(geo.endo(eta));
  const auto& theta = geo.lee.theta;
  const double hs = inner(G, detail::sym(G, values(eta)), geo.ricci.s);
  GammaValue v;
  v.value = geo.levi_civita(f).laplacian + inner(G, detail::differential(f), theta) - hs;
  v.real_form = 0.5 * (geo.levi_civita(fr).laplacian + inner(G, detail::differential(fr), theta)) - hs;
  return v;
}
inline GammaValue gamma_both(const VariationInput& in) { return gamma_both(MetricGeometry(in.g), in.h1); }

// gamma_g(h) = (scal^Ch)'_g(h); both printed forms must agree.
inline double gamma(const MetricGeometry& geo, const PerturbationJet& eta) {
  const auto v = gamma_both(geo, eta);
  const double defect = std::abs(v.value - v.real_form) / std::max(1.0, std::abs(v.value));
  if (defect > 1e-12) detail::crosscheck_failed("gamma tr^C vs tr^R form", defect, 1e-12);
  return v.value;
}
inline double gamma(const VariationInput& in) { return gamma(MetricGeometry(in.g), in.h1); }

// gamma^*(u) = 1/2 (Delta u - g(du, theta) + (d^* theta) u) Id - u S.
inline Sym11Value gamma_star(const MetricGeometry& geo, const ScalarJet& u) {
  const CMat& G = geo.G;
  const double uval = u.value();
  const double c = 0.5 * (geo.levi_civita(u).laplacian - inner(G, detail::differential(u), geo.lee.theta) +
                          geo.lee.dstar_theta * uval);
  return {G * cplx(c) - geo.ricci.s_tilde.coeffs * cplx(uval), G};
}
inline Sym11Value gamma_star(const MetricJet& g, const ScalarJet& u) { return gamma_star(MetricGeometry(g), u); }
inline Sym11Value gamma_star(const VariationInput& in) { return gamma_star(in.g, in.scalar()); }

// Riemannian Ricci endomorphism from the Levi-Civita connection.
inline RMat riemannian_ricci_endo(const MetricJet& g) {
  const int n = 2 * g.rows();
  const auto gam = lc_christoffel_jets(real_metric(g));
  const RMat gi = inverse(real_metric(values(g)));
  auto G = [&](int a, int b, int c) { return gam[a](b, c).value(); };
  auto dG = [&](int e, int a, int b, int c) { return gam[a](b, c).d(e); };
  RMat ric(n, n);
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d) {
      double s = 0;
      for (int a = 0; a < n; ++a) {
        s += dG(a, a, d, b) - dG(d, a, a, b);
        for (int e = 0; e < n; ++e) s += G(a, a, e) * G(e, d, b) - G(a, d, e) * G(e, a, b);
      }
      ric(b, d) = s;
    }
  return gi * ric;
}

struct SecondVariationValue {
  double general = 0;              // slin2
  std::optional<double> kahler;    // slin2K, Kahler inputs only
};

// (scal^Ch)''(h1, h2) =
//   g(Hess f1, h2) + g(df1, delta_g h2 - delta^nabla h2) - g(df1, theta o h2)
//   + g(h1, h2 o S) - 1/2 g(h1, rho^{-1}(dd^c f2)),   f_i = tr^C h_i.
inline SecondVariationValue second_var_both(const MetricGeometry& geo, const PerturbationJet& e1,
                                            const PerturbationJet& e2, bool kahler) {
  const CMat& G = geo.G;
  const auto f1 = geo.trace_c(e1);
  const auto f2 = geo.trace_c(e2);
  const CMat H2 = values(geo.endo(e2));
  const Sym11Value h1{values(e1), G}, h2{values(e2), G};
  const auto lc1 = geo.levi_civita(f1);
  const auto df1 = detail::differential(f1);
  const auto div2 = geo.divergences(e2);
  const CMat S = geo.ricci.s.endo();
  const auto ddc2 = ddc_scalar(f2);

  SecondVariationValue v;
  v.general = inner(G, lc1.hessian, h2) + inner(G, df1, div2.delta_g - div2.delta_nabla) -
              inner(G, df1, compose(geo.lee.theta, H2)) + inner(G, to_real(h1), RealEndoValue{real_endo(H2 * S)}) -
              0.5 * inner(G, h1, rho_inv(G, ddc2));
  if (kahler) {
    const auto lc2 = geo.levi_civita(f2);
    const RMat ric = riemannian_ricci_endo(geo.g);
    v.kahler = inner(G, lc1.hessian, h2) + inner(G, h1, lc2.hessian) +
               inner(G, to_real(h1), RealEndoValue{real_endo(H2) * ric});
  }
  return v;
}
inline SecondVariationValue second_var_both(const VariationInput& in, bool kahler) {
  return second_var_both(MetricGeometry(in.g), in.h1, in.second(), kahler);
}

inline double second_var(const MetricGeometry& geo, const PerturbationJet& e1, const PerturbationJet& e2,
                         bool kahler) {
  const auto v = second_var_both(geo, e1, e2, kahler);
  if (v.kahler) {
    const double defect = std::abs(v.general - *v.kahler) / std::max(1.0, std::abs(v.general));
    if (defect > 1e-10) detail::crosscheck_failed("slin2 vs Kahler form", defect, 1e-10);
  }
  return v.general;
}

inline double second_var(const VariationInput& in, bool kahler) {
  return second_var(MetricGeometry(in.g), in.h1, in.second(), kahler);
}

// ---------------------------------------------------------------------------
// Metric paths. The first-order path is the eta-path G + t eta. Second
// derivatives use G exp(t H) to second order, G + t eta + t^2/2 eta G^{-1} eta,
// along which the printed second variation holds (see README).

inline MetricJet metric_path(const MetricJet& g, const PerturbationJet& eta, double t, int order) {
  MetricJet r = g + eta * cplx(t);
  if (order >= 2) r += eta * inverse(g) * eta * cplx(0.5 * t * t);
  return r;
}

// ---------------------------------------------------------------------------
// Obstruction integral.

struct ObstructionReport {
  std::string manifold;
  std::string u_description;
  std::string h_description;
  double value = 0;
  int quadrature_order = 0;
  std::size_t nodes = 0;
  double estimated_error = 0;  // |I(n) - I(n/2)|
  double gamma_star_residual = 0;
  double gamma_residual = 0;
  double seconds = 0;
  bool quotable() const { return estimated_error < 1e-4 * std::max(1.0, std::abs(value)); }
};

struct KernelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

struct ObstructionSums {
  double integral = 0;
  double gs_max = 0;
  double g_max = 0;
};

// Per-node callback sharing the geometry already built for the integrand.
using NodeHook = std::function<void(std::size_t, const MetricGeometry&, const ScalarJet&)>;

inline ObstructionSums obstruction_sums(const ManifoldSpec& s, const QuadratureRule& rule, const ScalarField& u,
                                        const MatrixField& h, bool validate, const NodeHook& hook = {}) {
  const std::size_t n = rule.size();
  std::vector<double> terms(n), gs(n), gm(n);
  parallel_for(n, [&](std::size_t i) {
    const Point& p = rule.nodes[i];
    const MetricGeometry geo(s.metric_jet(p));
    const PerturbationJet eta = h.eval2(p);
    const ScalarJet uj = u.eval2(p);
    if (hook) hook(i, geo, uj);
    if (validate) {
      const Sym11Value gsu = gamma_star(geo, uj);
      gs[i] = std::sqrt(std::max(0.0, inner(gsu.metric, gsu, gsu)));
      gm[i] = std::abs(gamma(geo, eta));
    }
    terms[i] = rule.weights[i] * uj.value() * second_var(geo, eta, eta, s.is_kahler);
  });
  ObstructionSums r;
  r.integral = pairwise_sum(terms);
  if (validate) {
    r.gs_max = *std::max_element(gs.begin(), gs.end());
    r.g_max = *std::max_element(gm.begin(), gm.end());
  }
  return r;
}

}  // namespace detail

// Quadrature of u (scal^Ch)''(h, h) with u in ker gamma^* and h in ker gamma.
inline ObstructionReport obstruction(const ManifoldSpec& s, const QuadratureRule& rule, const ScalarField& u,
                                     const MatrixField& h, const std::string& u_desc, const std::string& h_desc,
                                     double kernel_tol = 1e-8, bool estimate_error = true,
                                     const detail::NodeHook& hook = {},
                                     const std::function<void()>& before_kernel_check = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  if (rule.manifold != s.name) throw std::invalid_argument("quadrature rule built for " + rule.manifold);
  ObstructionReport r;
  r.manifold = s.name;
  r.u_description = u_desc;
  r.h_description = h_desc;
  r.quadrature_order = rule.order;
  r.nodes = rule.size();
  const auto full = detail::obstruction_sums(s, rule, u, h, true, hook);
  if (before_kernel_check) before_kernel_check();
  r.gamma_star_residual = full.gs_max;
  r.gamma_residual = full.g_max;
  if (full.gs_max > kernel_tol || full.g_max > kernel_tol) {
    std::ostringstream os;
    os.precision(3);
    os << "kernel validation failed on " << s.name << ": max |gamma*(u)| = " << full.gs_max
       << ", max |gamma(h)| = " << full.g_max << " (tol " << kernel_tol << ")";
    throw KernelError(os.str());
  }
  r.value = full.integral;
  if (estimate_error && s.quadrature && rule.order >= 2) {
    const auto coarse = detail::obstruction_sums(s, s.rule(rule.order / 2), u, h, false);
    r.estimated_error = std::abs(full.integral - coarse.integral);
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline constexpr double kWitnessValue = 128.0 * std::numbers::pi * std::numbers::pi / 3.0;

struct WitnessReport {
  ObstructionReport obstruction;
  double lambda = 0;           // constant scal^Ch of g_o
  double scal_residual = 0;    // max |scal - lambda|
  double fce_residual = 0;     // max fce residual
  double eigen_residual = 0;   // max |Delta u - (lambda / m) u|
};

// Built-in CP^1 x CP^1 scenario: u = height of the first factor,
// h = (1 + u)(Id_1 + (-Id_2)). Validation failures throw.
inline WitnessReport instability_witness(int n_gl = 32, double u_shift = 0.0, bool estimate_error = true) {
  const auto s = fs_product();
  const auto rule = s.rule(n_gl);
  const auto u = height_function(u_shift);
  const auto h = named_perturbation(s, "witness");
  WitnessReport w;
  w.lambda = *s.scal;

  const std::size_t n = rule.size();
  std::vector<double> sr(n), fr(n), er(n);
  auto hook = [&](std::size_t i, const MetricGeometry& geo, const ScalarJet& uj) {
    const double scal = chern_scalar(geo.g);
    sr[i] = std::abs(scal - w.lambda);
    fr[i] = fce_residual(geo, scal);
    er[i] = std::abs(geo.levi_civita(uj).laplacian - (w.lambda / s.dim()) * uj.value());
  };
  auto check = [&] {
    w.scal_residual = *std::max_element(sr.begin(), sr.end());
    w.fce_residual = *std::max_element(fr.begin(), fr.end());
    w.eigen_residual = *std::max_element(er.begin(), er.end());
    auto fail = [](const std::string& what, double v, double tol) {
      std::ostringstream os;
      os.precision(3);
      os << "witness validation failed: " << what << " residual " << v << " > " << tol;
      throw KernelError(os.str());
    };
    if (w.scal_residual > 1e-9) fail("scal^Ch = lambda", w.scal_residual, 1e-9);
    if (w.fce_residual > 1e-9) fail("first-Chern-Einstein", w.fce_residual, 1e-9);
    if (w.eigen_residual > 1e-8) fail("Delta u = (lambda/m) u", w.eigen_residual, 1e-8);
  };

  std::ostringstream ud;
  ud << "height of first factor" << (u_shift != 0.0 ? " + " + std::to_string(u_shift) : std::string());
  w.obstruction = obstruction(s, rule, *u, *h, ud.str(), "(1+u)(Id_1 - Id_2)", 1e-8, estimate_error, hook, check);
  return w;
}

}  // namespace chernlab
