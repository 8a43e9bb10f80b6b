#pragma once

// Check registry and suite runner. Every check compares an implementation
// against an independent oracle (finite differences, closed forms, a second
// formula) and fills one CheckReport per (check, manifold).

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "chernlab/fd.hpp"
#include "chernlab/report.hpp"

namespace chernlab {

struct SuiteConfig {
  std::vector<std::string> manifolds = manifold_names();  // "all" expands to the zoo
  std::vector<std::string> checks;                        // empty: every registered check
  std::uint64_t seed = 42;
  std::vector<double> dts{1e-2, 1e-3};
  int samples = 20;
  int torus_grid = 64;   // trapezoid nodes per direction, complex dimension 1
  int torus4_grid = 16;  // complex dimension 2
  int sphere_grid = 32;  // Gauss-Legendre nodes per sphere factor
  std::map<std::string, double> tolerances;

  void validate() const {
    if (manifolds.empty()) throw std::invalid_argument("nothing to run: empty manifold list");
    if (dts.empty()) throw std::invalid_argument("empty dt schedule");
    for (std::size_t i = 0; i < dts.size(); ++i)
      if (!(dts[i] > 0) || (i > 0 && !(dts[i] < dts[i - 1])))
        throw std::invalid_argument("dt schedule must be positive and decreasing");
    for (int n : {torus_grid, torus4_grid, sphere_grid})
      if (n < 2 || (n & (n - 1)) != 0) throw std::invalid_argument("grid sizes must be powers of two");
    if (samples < 1) throw std::invalid_argument("samples must be positive");
  }

  int grid_for(const ManifoldSpec& s) const {
    if (s.chart.kind == ChartKind::PeriodicTorus) return s.dim() == 1 ? torus_grid : torus4_grid;
    return sphere_grid;
  }
};

struct CheckContext {
  const SuiteConfig& cfg;
  const ManifoldSpec& spec;
  CounterRng rng;
};

struct CheckDef {
  std::string name;
  std::string description;
  CheckMode mode = CheckMode::Relative;
  double tol = 0;
  std::function<bool(const ManifoldSpec&)> applies;
  std::function<void(CheckContext&, CheckReport&)> run;
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Running maxima that keep NaN visible.
struct ErrAcc {
  double abs = 0, rel = 0;
  int n = 0;
  void push(double a, double r) {
    abs = std::isnan(a) || std::isnan(abs) ? std::nan("") : std::max(abs, a);
    rel = std::isnan(r) || std::isnan(rel) ? std::nan("") : std::max(rel, r);
  }
  void add(const std::vector<double>& a, const std::vector<double>& ref) {
    push(max_diff(a, ref), rel_error(a, ref));
    ++n;
  }
  void add(double a, double ref) { add(std::vector<double>{a}, std::vector<double>{ref}); }
  void put(CheckReport& r) const {
    r.max_abs_err = abs;
    r.max_rel_err = rel;
    r.samples = n;
  }
};

inline RealVec random_vec(CounterRng& rng, int n) {
  RealVec v(n);
  for (int a = 0; a < n; ++a) v[a] = rng.uniform(-1.0, 1.0);
  return v;
}

inline OneFormValue random_one_form(CounterRng& rng, int m) {
  OneFormValue a{m, {}};
  for (int k = 0; k < m; ++k) a.c[k] = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  return a;
}

inline CMat random_hermitian(CounterRng& rng, int m) {
  CMat a(m, m);
  for (int i = 0; i < m; ++i) {
    a(i, i) = rng.uniform(-1.0, 1.0);
    for (int j = i + 1; j < m; ++j) {
      a(i, j) = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
      a(j, i) = std::conj(a(i, j));
    }
  }
  return a;
}

inline RealVec mul(const RMat& a, const RealVec& v) {
  RealVec r(v.n);
  for (int i = 0; i < v.n; ++i)
    for (int j = 0; j < v.n; ++j) r[i] += a(i, j) * v[j];
  return r;
}

struct Draw {
  Point p;
  MatrixFieldPtr h;
  ScalarFieldPtr u;
  VariationInput in;
  RealVec X, Y;
  CMat G;
};

inline Draw draw(CheckContext& c) {
  Draw d;
  d.p = c.spec.sample(c.rng);
  d.h = random_perturbation(c.spec, c.rng);
  d.u = random_scalar(c.spec, c.rng);
  d.in = make_input(c.spec, *d.h, d.p);
  d.in.u = d.u->eval2(d.p);
  d.X = random_vec(c.rng, 2 * c.spec.dim());
  d.Y = random_vec(c.rng, 2 * c.spec.dim());
  d.G = values(d.in.g);
  return d;
}

using Tensor = std::vector<double>;
using MetricFn = std::function<Tensor(const MetricJet&)>;

// Shared loop of the finite-difference checks: `setup` returns the analytic
// value and the functional F(g_t) for one random draw.
template <class Setup>
void fd_sampled(CheckContext& c, CheckReport& r, int order, Setup setup) {
  ErrAcc acc;
  double est = 0;
  for (int k = 0; k < c.cfg.samples; ++k) {
    Draw d = draw(c);
    auto [analytic, F] = setup(d);
    const auto fd = fd_derivative(F, d.in.g, d.in.h1, order, c.cfg.dts);
    acc.add(analytic, fd.value);
    est = std::max(est, fd.error_estimate);
  }
  acc.put(r);
  r.params["fd_error_estimate"] = est;
  r.params["dt_min"] = c.cfg.dts.back();
}

inline bool always(const ManifoldSpec&) { return true; }
inline bool kahler_only(const ManifoldSpec& s) { return s.is_kahler; }
inline bool has_scal(const ManifoldSpec& s) { return s.scal.has_value(); }
inline bool named(const ManifoldSpec& s, std::initializer_list<const char*> names) {
  for (const char* n : names)
    if (s.name == n) return true;
  return false;
}
inline bool kahler_einstein(const ManifoldSpec& s) { return named(s, {"cp1", "cp1xcp1"}); }
// Closed manifolds whose adjointness integrands the default grids resolve:
// the Hopf shell is not closed, and the potential torus metric is not
// band-limited, so 16^4 nodes leave a ~1e-6 quadrature error there.
inline bool adjointness_target(const ManifoldSpec& s) {
  return s.quadrature && s.chart.kind != ChartKind::LogAnnulus && s.name.rfind("kahler_torus", 0) != 0;
}
inline bool non_flat(const ManifoldSpec& s) { return s.name.rfind("flat_torus", 0) != 0; }

inline double witness_value_at(int n_gl) { return instability_witness(n_gl, 0.0, false).obstruction.value; }

}  // namespace detail

// <gamma h, u> - <h, gamma^* u> over random band-limited pairs, relative to
// ||h|| ||u||.
inline CheckReport adjointness_test(const ManifoldSpec& spec, const QuadratureRule& rule, std::uint64_t seed,
                                    int n_fields) {
  if (!spec.quadrature) throw std::invalid_argument(spec.name + " has no quadrature rule");
  if (rule.manifold != spec.name) throw std::invalid_argument("quadrature rule built for " + rule.manifold);
  CheckReport r;
  r.check = "adjointness";
  r.manifold = spec.name;
  r.seed = seed;
  r.samples = n_fields;
  r.mode = CheckMode::Relative;
  CounterRng rng(seed, detail::fnv1a("adjointness/" + spec.name));
  const std::size_t n = rule.size();
  std::vector<double> t1(n), t2(n), th(n), tu(n);
  for (int f = 0; f < n_fields; ++f) {
    const auto h = random_perturbation(spec, rng);
    const auto u = random_scalar(spec, rng);
    parallel_for(n, [&](std::size_t i) {
      const Point& p = rule.nodes[i];
      const MetricGeometry geo(spec.metric_jet(p));
      const PerturbationJet eta = h->eval2(p);
      const ScalarJet uj = u->eval2(p);
      const CMat& G = geo.G;
      const Sym11Value hv{values(eta), G};
      const double w = rule.weights[i], uv = uj.value();
      t1[i] = w * gamma(geo, eta) * uv;
      t2[i] = w * inner(G, hv, gamma_star(geo, uj));
      th[i] = w * inner(G, hv, hv);
      tu[i] = w * uv * uv;
    });
    const double a = pairwise_sum(t1), b = pairwise_sum(t2);
    const double norm = std::sqrt(pairwise_sum(th) * pairwise_sum(tu));
    const double defect = std::abs(a - b);
    r.max_abs_err = std::max(r.max_abs_err, defect);
    r.max_rel_err = std::max(r.max_rel_err, norm > 0 ? defect / norm : defect);
  }
  r.params["grid"] = rule.order;
  r.params["nodes"] = static_cast<double>(n);
  return r;
}

inline double default_adjointness_tol(const ManifoldSpec& s) {
  if (s.chart.kind == ChartKind::Stereographic) return 1e-6;
  return s.dim() == 1 ? 1e-8 : 1e-7;
}

inline int default_adjointness_pairs(const ManifoldSpec& s) {
  return s.chart.kind == ChartKind::PeriodicTorus && s.dim() == 1 ? 10 : 5;
}

std::vector<CheckReport> run_suite(const SuiteConfig& cfg);

// ---------------------------------------------------------------------------
// Registry.

inline const std::vector<CheckDef>& check_registry() {
  using namespace detail;
  static const std::vector<CheckDef> reg = [] {
    std::vector<CheckDef> v;
    auto add = [&](std::string name, std::string desc, CheckMode mode, double tol,
                   std::function<bool(const ManifoldSpec&)> applies,
                   std::function<void(CheckContext&, CheckReport&)> run) {
      v.push_back({std::move(name), std::move(desc), mode, tol, std::move(applies), std::move(run)});
    };
    constexpr auto Rel = CheckMode::Relative;
    constexpr auto Abs = CheckMode::Absolute;
    constexpr auto Neg = CheckMode::Negative;

    // ---- complex linear algebra
    add("rho_roundtrip", "rho(rho_inv(a)) = a and rho_inv(rho(h)) = h", Rel, 1e-13, always,
        [](CheckContext& c, CheckReport& r) {
          ErrAcc acc;
          for (int k = 0; k < c.cfg.samples; ++k) {
            const CMat G = c.spec.metric_value(c.spec.sample(c.rng));
            const Form11Value a{random_hermitian(c.rng, c.spec.dim())};
            const Sym11Value h{random_hermitian(c.rng, c.spec.dim()), G};
            acc.add(flatten(rho(G, rho_inv(G, a)).coeffs), flatten(a.coeffs));
            acc.add(flatten(rho_inv(G, rho(G, h)).endo()), flatten(h.endo()));
          }
          acc.put(r);
        });
    add("trace_relation", "tr^R h = 2 tr^C h and tr^C h = Tr^C(rho(h))", Rel, 1e-11, always,
        [](CheckContext& c, CheckReport& r) {
          ErrAcc acc;
          for (int k = 0; k < c.cfg.samples; ++k) {
            const CMat G = c.spec.metric_value(c.spec.sample(c.rng));
            const Sym11Value h{random_hermitian(c.rng, c.spec.dim()), G};
            const Traces t = traces(h);
            acc.add(to_real(h).e.trace(), 2.0 * t.complex_trace);
            acc.add(trace_form(G, rho(G, h)), t.complex_trace);
          }
          acc.put(r);
        });
    add("inner_positive", "g(h, k) symmetric and g(h, h) > 0 on Sym^{1,1}", Rel, 1e-13, always,
        [](CheckContext& c, CheckReport& r) {
          ErrAcc acc;
          for (int k = 0; k < c.cfg.samples; ++k) {
            const CMat G = c.spec.metric_value(c.spec.sample(c.rng));
            const Sym11Value a{random_hermitian(c.rng, c.spec.dim()), G};
            const Sym11Value b{random_hermitian(c.rng, c.spec.dim()), G};
            acc.add(inner(G, a, b), inner(G, b, a));
            if (!(inner(G, a, a) > 0)) acc.push(INFINITY, INFINITY);
          }
          acc.put(r);
        });
    add("inner_rho_identity", "g(h, rho^{-1} a) = 2 Re h^{i jbar} a_{jbar i}", Rel, 1e-13, always,
        [](CheckContext& c, CheckReport& r) {
          ErrAcc acc;
          const int m = c.spec.dim();
          for (int k = 0; k < c.cfg.samples; ++k) {
            const CMat G = c.spec.metric_value(c.spec.sample(c.rng));
            const CMat Gi = inverse(G);
            const CMat eta = random_hermitian(c.rng, m);
            const Form11Value a{random_hermitian(c.rng, m)};
            cplx s = 0;  // raised h^{i jbar} = g^{i kbar} h_{kbar l} g^{l jbar}
            for (int i = 0; i < m; ++i)
              for (int j = 0; j < m; ++j)
                for (int kk = 0; kk < m; ++kk)
                  for (int l = 0; l < m; ++l) s += Gi(i, kk) * eta(kk, l) * Gi(l, j) * a.coeffs(j, i);
            acc.add(inner(G, Sym11Value{eta, G}, rho_inv(G, a)), 2.0 * s.real());
          }
          acc.put(r);
        });

    // ---- jets and quadrature
    add("jet_hermitian", "every partial of the metric matrix is Hermitian", Abs, 1e-12, always,
        [](CheckContext& c, CheckReport& r) {
          ErrAcc acc;
          for (int k = 0; k < c.cfg.samples; ++k) {
            const MetricJet g = c.spec.metric_jet(c.spec.sample(c.rng));
            double mx = 0;
            for (int i = 0; i < g.rows(); ++i)
              for (int j = 0; j < g.cols(); ++j)
                for (int q = 0; q < g(i, j).size(); ++q)
                  mx = std::max(mx, std::abs(g(i, j)[q] - std::conj(g(j, i)[q])));
            acc.push(mx, mx);
            ++acc.n;
          }
          acc.put(r);
        });
    add("jet_leibniz", "jets of f g and exp f follow the product and chain rules", Rel, 1e-12, always,
        [](CheckContext& c, CheckReport& r) {
          ErrAcc acc;
          const int n = 2 * c.spec.dim();
          for (int k = 0; k < c.cfg.samples; ++k) {
            const Point p = c.spec.sample(c.rng);
            const auto f = random_scalar(c.spec, c.rng)->eval2(p);
            const auto g = random_scalar(c.spec, c.rng)->eval2(p);
            const auto fg = f * g;
            const auto ef = exp(f);
            Tensor got, ref;
            for (int a = 0; a < n; ++a) {
              got.push_back(fg.d(a));
              ref.push_back(f.d(a) * g.value() + f.value() * g.d(a));
              got.push_back(ef.d(a));
              ref.push_back(ef.value() * f.d(a));
              for (int b = 0; b < n; ++b) {
                got.push_back(fg.d(a, b));
                ref.push_back(f.d(a, b) * g.value() + f.d(a) * g.d(b) + f.d(b) * g.d(a) + f.value() * g.d(a, b));
                got.push_back(ef.d(a, b));
                ref.push_back(ef.value() * (f.d(a, b) + f.d(a) * f.d(b)));
              }
            }
            acc.add(got, ref);
          }
          acc.put(r);
        });
    add("volume", "quadrature volume against the closed form", Rel, 1e-8,
        [](const ManifoldSpec& s) { return s.quadrature && s.volume.has_value(); },
        [](CheckContext& c, CheckReport& r) {
          const int n = c.cfg.grid_for(c.spec);
          const double v = c.spec.rule(n).total_weight();
          const double coarse = c.spec.rule(n / 2).total_weight();
          r.max_abs_err = std::abs(v - *c.spec.volume);
          r.max_rel_err = std::max(r.max_abs_err, std::abs(v - coarse)) / *c.spec.volume;
          r.samples = 1;
          r.params["grid"] = n;
          r.params["volume"] = v;
        });
    add("quadrature_examples", "int cos^2 x = 2 pi^2 on the flat torus, int 1 = 4 pi, int u^2 = 4 pi/3 on CP^1", Abs,
        1e-10, [](const ManifoldSpec& s) { return named(s, {"flat_torus_1", "cp1"}); },
        [](CheckContext& c, CheckReport& r) {
          const double pi = std::numbers::pi;
          ErrAcc acc;
          if (c.spec.name == "flat_torus_1") {
            const auto rule = c.spec.rule(c.cfg.torus_grid);
            acc.add(integrate_nodes(rule, [](const Point& p) { return std::cos(p[0]) * std::cos(p[0]); }),
                    2.0 * pi * pi);
          } else {
            const auto rule = c.spec.rule(c.cfg.sphere_grid);
            const auto u = height_function();
            acc.add(rule.total_weight(), 4.0 * pi);
            acc.add(integrate_nodes(rule, [&](const Point& p) { return std::pow(u->eval2(p).value(), 2); }),
                    4.0 * pi / 3.0);
          }
          acc.put(r);
        });
    add("quadrature_convergence", "error at least halves per grid doubling until roundoff", Rel, 1.0,
        [](const ManifoldSpec& s) { return named(s, {"flat_torus_1", "cp1", "cp1xcp1"}); },
        [](CheckContext& c, CheckReport& r) {
          // smooth, not band-limited: exp(cos x + sin y), exp(n3), exp(n3 + n3')
          const double pi = std::numbers::pi;
          const auto height = [](double x, double y) {
            const double q = x * x + y * y;
            return (q - 1.0) / (q + 1.0);
          };
          std::function<double(const Point&)> f;
          double exact = 0;
          if (c.spec.name == "flat_torus_1") {
            f = [](const Point& p) { return std::exp(std::cos(p[0]) + std::sin(p[1])); };
            exact = std::pow(2.0 * pi * std::cyl_bessel_i(0.0, 1.0), 2);
          } else if (c.spec.name == "cp1") {
            f = [&](const Point& p) { return std::exp(height(p[0], p[1])); };
            exact = 2.0 * pi * (std::exp(1.0) - std::exp(-1.0));
          } else {
            f = [&](const Point& p) { return std::exp(height(p[0], p[1]) + height(p[2], p[3])); };
            exact = std::pow(2.0 * pi * (std::exp(1.0) - std::exp(-1.0)), 2);
          }
          const double floor = 1e-13 * std::abs(exact);
          double prev = -1, worst = 0;
          for (int n = 2; n <= 16; n *= 2) {
            const double err = std::abs(integrate_nodes(c.spec.rule(n), f) - exact);
            if (prev >= 0) worst = std::max(worst, err / std::max(0.5 * prev, floor));
            prev = err;
            r.params["err_n" + std::to_string(n)] = err;
          }
          r.max_abs_err = prev;
          r.max_rel_err = worst;
          r.samples = 4;
        });

    // ---- Chern calculus identities
    add("chern_lapl", "Tr^C(dd^c u) = Delta u + g(du, theta)", Abs, 1e-10, always,
        [](CheckContext& c, CheckReport& r) {
          ErrAcc acc;
          for (int k = 0; k < 50; ++k) {
            const Point p = c.spec.sample(c.rng);
            const MetricJet g = c.spec.metric_jet(p);
            const CMat G = values(g);
            const ScalarJet u = random_scalar(c.spec, c.rng)->eval2(p);
            const double lhs = trace_form(G, ddc_scalar(u));
            const double rhs = levi_civita(g, u).laplacian +
                               inner(G, differential(u), torsion_and_lee(g).theta);
            acc.add(lhs, rhs);
          }
          acc.put(r);
        });
    add("ddc_kahler", "dd^c u(X, Y) = g(Hess u X, JY) - g(Hess u JX, Y) on Kahler metrics", Abs, 1e-10,
        kahler_only, [](CheckContext& c, CheckReport& r) {
          ErrAcc acc;
          for (int k = 0; k < c.cfg.samples; ++k) {
            const Point p = c.spec.sample(c.rng);
            const MetricJet g = c.spec.metric_jet(p);
            const CMat G = values(g);
            const ScalarJet u = random_scalar(c.spec, c.rng)->eval2(p);
            const RMat hess = levi_civita(g, u).hessian.e;
            const RealVec X = random_vec(c.rng, 2 * c.spec.dim()), Y = random_vec(c.rng, 2 * c.spec.dim());
            const double lhs = form_eval(ddc_scalar(u).coeffs, X, Y);
            const double rhs =
                metric_pairing(G, mul(hess, X), Y.rotated()) - metric_pairing(G, mul(hess, X.rotated()), Y);
            acc.add(lhs, rhs);
          }
          acc.put(r);
        });
    add("kahler_specializations", "theta = 0, d^* theta = 0, delta_g = delta^nabla, d S~ = 0", Abs, 1e-10,
        kahler_only, [](CheckContext& c, CheckReport& r) {
          ErrAcc acc;
          for (int k = 0; k < c.cfg.samples; ++k) {
            const Point p = c.spec.sample(c.rng);
            const MetricJet g = c.spec.metric_jet(p);
            const auto tl = torsion_and_lee(g);
            const auto eta = random_perturbation(c.spec, c.rng)->eval2(p);
            const auto div = divergences(g, eta);
            acc.add(flatten(tl.theta), Tensor(2 * c.spec.dim(), 0.0));
            acc.add(tl.dstar_theta, 0.0);
            acc.add(flatten(div.delta_g), flatten(div.delta_nabla));
            acc.add(ricci_form_closedness(c.spec.metric->eval3(p)), 0.0);
          }
          acc.put(r);
        });
    add("lc_scalar", "scal^Ch equals the Levi-Civita scalar curvature on Kahler metrics", Rel, 1e-9, kahler_only,
        [](CheckContext& c, CheckReport& r) {
          ErrAcc acc;
          for (int k = 0; k < c.cfg.samples; ++k) {
            const MetricJet g = c.spec.metric_jet(c.spec.sample(c.rng));
            acc.add(chern_scalar(g), riemannian_scalar(g));
          }
          acc.put(r);
        });
    add("locscal", "2 g^{k lbar} g^{i jbar} Omega_{jbar i lbar k} = 2 Tr^C S~", Rel, 1e-11, always,
        [](CheckContext& c, CheckReport& r) {
          ErrAcc acc;
          const int m = c.spec.dim();
          for (int k = 0; k < c.cfg.samples; ++k) {
            const MetricJet g = c.spec.metric_jet(c.spec.sample(c.rng));
            const CMat G = values(g), Gi = inverse(G);
            const auto om = chern_curvature(g);
            cplx s = 0;
            for (int i = 0; i < m; ++i)
              for (int j = 0; j < m; ++j)
                for (int kk = 0; kk < m; ++kk)
                  for (int l = 0; l < m; ++l) s += Gi(kk, l) * Gi(i, j) * om.om[j][i](l, kk);
            acc.add(2.0 * s.real(), 2.0 * trace_form(G, chern_ricci(g).s_tilde));
          }
          acc.put(r);
        });
    add("ricci_logdet", "S~ = -d dbar log det G", Rel, 1e-10, always, [](CheckContext& c, CheckReport& r) {
      ErrAcc acc;
      for (int k = 0; k < c.cfg.samples; ++k) {
        const MetricJet g = c.spec.metric_jet(c.spec.sample(c.rng));
        const RJet<2> ld = log(real(determinant(g)));
        const int m = g.rows();
        CMat ref(m, m);
        for (int j = 0; j < m; ++j)
          for (int i = 0; i < m; ++i) ref(j, i) = -dz(dzb(ld, j), i).value();
        acc.add(flatten(values(ricci_form_jets(g))), flatten(ref));
      }
      acc.put(r);
    });
    add("curvature_symmetry", "conj(Omega_{jbar i lbar k}) = Omega_{ibar j kbar l}", Rel, 1e-12, always,
        [](CheckContext& c, CheckReport& r) {
          ErrAcc acc;
          const int m = c.spec.dim();
          for (int k = 0; k < c.cfg.samples; ++k) {
            const auto om = chern_curvature(c.spec.metric_jet(c.spec.sample(c.rng)));
            Tensor a, b;
            for (int i = 0; i < m; ++i)
              for (int j = 0; j < m; ++j)
                for (int kk = 0; kk < m; ++kk)
                  for (int l = 0; l < m; ++l) {
                    const cplx x = std::conj(om.om[j][i](l, kk)), y = om.om[i][j](kk, l);
                    a.insert(a.end(), {x.real(), x.imag()});
                    b.insert(b.end(), {y.real(), y.imag()});
                  }
            acc.add(a, b);
          }
          acc.put(r);
        });
    add("ricci_identity", "[nabla_X, nabla_Y] h = -[Omega(X, Y), h] for coordinate fields", Rel, 1e-10, always,
        [](CheckContext& c, CheckReport& r) {
          ErrAcc acc;
          for (int k = 0; k < c.cfg.samples; ++k) {
            Draw d = draw(c);
            const CMat H = values(endo_jets(d.in.g, d.in.h1));
            const CMat lhs = chern_cov_deriv(d.in.g, d.in.h1, d.X, d.Y) - chern_cov_deriv(d.in.g, d.in.h1, d.Y, d.X);
            const CMat rhs = commutator(curvature_endo(d.in.g, d.X, d.Y), H) * cplx(-1.0);
            acc.add(flatten(lhs), flatten(rhs));
          }
          acc.put(r);
        });
    add("dertrace", "tr^C(nabla_X h) = X(tr^C h)", Abs, 1e-11, always, [](CheckContext& c, CheckReport& r) {
      ErrAcc acc;
      for (int k = 0; k < c.cfg.samples; ++k) {
        Draw d = draw(c);
        const cplx t = chern_cov_deriv(d.in.g, d.in.h1, d.X).trace();
        const auto f = trace_c_jet(d.in.g, d.in.h1);
        double xf = 0;
        for (int a = 0; a < d.X.n; ++a) xf += d.X[a] * f.d(a);
        acc.add(Tensor{t.real(), t.imag()}, Tensor{xf, 0.0});
      }
      acc.put(r);
    });
    add("lee_frame", "theta from Christoffel traces = Tr^C(X _| d omega)", Rel, 1e-10, always,
        [](CheckContext& c, CheckReport& r) {
          ErrAcc acc;
          for (int k = 0; k < c.cfg.samples; ++k) {
            const double defect = torsion_and_lee(c.spec.metric_jet(c.spec.sample(c.rng))).frame_defect;
            acc.push(defect, defect);
            ++acc.n;
          }
          acc.put(r);
        });
    add("divergence_golden", "delta_g(cos x Id) = delta^nabla(cos x Id) = -sin x dx on the flat torus", Abs, 1e-12,
        [](const ManifoldSpec& s) { return s.name == "flat_torus_1"; },
        [](CheckContext& c, CheckReport& r) {
          ErrAcc acc;
          const auto h = named_perturbation(c.spec, "cos_identity");
          for (int k = 0; k < c.cfg.samples; ++k) {
            const Point p = c.spec.sample(c.rng);
            const auto div = divergences(c.spec.metric_jet(p), h->eval2(p));
            const Tensor ref{-0.5 * std::sin(p[0]), 0.0};
            acc.add(flatten(div.delta_g), ref);
            acc.add(flatten(div.delta_nabla), ref);
          }
          acc.put(r);
        });

    // ---- golden values
    add("golden_scal", "scal^Ch equals its closed-form constant at 100 points", Abs, 1e-10, has_scal,
        [](CheckContext& c, CheckReport& r) {
          ErrAcc acc;
          for (int k = 0; k < 100; ++k) acc.add(chern_scalar(c.spec.metric_jet(c.spec.sample(c.rng))), *c.spec.scal);
          acc.put(r);
        });
    add("hopf_lee", "theta_i = -zbar_i / |z|^2 on the Hopf surface", Abs, 1e-11,
        [](const ManifoldSpec& s) { return s.name == "hopf"; },
        [](CheckContext& c, CheckReport& r) {
          ErrAcc acc;
          for (int k = 0; k < c.cfg.samples; ++k) {
            const Point p = c.spec.sample(c.rng);
            const auto z = p.holomorphic();
            const double r2 = std::norm(z[0]) + std::norm(z[1]);
            const OneFormValue ref{2, {-std::conj(z[0]) / r2, -std::conj(z[1]) / r2}};
            acc.add(flatten(torsion_and_lee(c.spec.metric_jet(p)).theta), flatten(ref));
          }
          acc.put(r);
        });
    add("fce_golden", "first-Chern-Einstein residual vanishes on Kahler-Einstein metrics", Abs, 1e-11,
        kahler_einstein, [](CheckContext& c, CheckReport& r) {
          ErrAcc acc;
          for (int k = 0; k < c.cfg.samples; ++k) acc.add(fce_residual(c.spec.metric_jet(c.spec.sample(c.rng))), 0.0);
          acc.put(r);
        });
    add("fce_positive", "Hopf first-Chern-Einstein residual exceeds 0.5 (error = shortfall)", Abs, 0.0,
        [](const ManifoldSpec& s) { return s.name == "hopf"; },
        [](CheckContext& c, CheckReport& r) {
          double lo = INFINITY;
          for (int k = 0; k < c.cfg.samples; ++k)
            lo = std::min(lo, fce_residual(c.spec.metric_jet(c.spec.sample(c.rng))));
          r.max_abs_err = r.max_rel_err = std::max(0.0, 0.5 - lo);
          r.params["min_residual"] = lo;
          r.samples = c.cfg.samples;
        });

    // ---- first variations against finite differences
    add("fd_gamma", "gamma(h) = (scal^Ch)'(h)", Rel, 1e-6, always, [](CheckContext& c, CheckReport& r) {
      fd_sampled(c, r, 1, [](Draw& d) {
        return std::pair{flatten(gamma(d.in)), MetricFn([](const MetricJet& g) { return flatten(chern_scalar(g)); })};
      });
    });
    add("fd_connection", "nabla'_X Y", Rel, 1e-6, always, [](CheckContext& c, CheckReport& r) {
      fd_sampled(c, r, 1, [](Draw& d) {
        const RealVec X = d.X, Y = d.Y;
        MetricFn F = [X, Y](const MetricJet& g) {
          const auto cs = chern_christoffel(g);
          const auto xi = X.holomorphic(), up = Y.holomorphic();
          std::array<cplx, kMaxDim> o{};
          for (int i = 0; i < cs.m; ++i)
            for (int k = 0; k < cs.m; ++k)
              for (int j = 0; j < cs.m; ++j) o[k] += xi[i] * cs(k, i, j) * up[j];
          return flatten(RealVec::from_holomorphic(cs.m, o));
        };
        return std::pair{flatten(var_connection(d.in, X, Y)), F};
      });
    });
    add("fd_trace", "(Tr^C)'(a) = -1/2 g(h, rho^{-1} a)", Rel, 1e-6, always, [](CheckContext& c, CheckReport& r) {
      fd_sampled(c, r, 1, [&c](Draw& d) {
        const Form11Value a{random_hermitian(c.rng, c.spec.dim())};
        MetricFn F = [a](const MetricJet& g) { return flatten(trace_form(values(g), a)); };
        return std::pair{flatten(var_trace(d.in, a)), F};
      });
    });
    add("fd_curvature", "Omega'(X, Y)", Rel, 1e-6, always, [](CheckContext& c, CheckReport& r) {
      fd_sampled(c, r, 1, [](Draw& d) {
        const RealVec X = d.X, Y = d.Y;
        MetricFn F = [X, Y](const MetricJet& g) { return flatten(curvature_endo(g, X, Y)); };
        return std::pair{flatten(var_curvature(d.in, X, Y)), F};
      });
    });
    add("fd_ricci_form", "S~' = 1/2 dd^c tr^C h", Rel, 1e-6, always, [](CheckContext& c, CheckReport& r) {
      fd_sampled(c, r, 1, [](Draw& d) {
        MetricFn F = [](const MetricJet& g) { return flatten(chern_ricci(g).s_tilde.coeffs); };
        return std::pair{flatten(var_ricci_form(d.in).coeffs), F};
      });
    });
    add("fd_lee", "theta' = d tr^C h - delta^nabla h", Rel, 1e-6, always, [](CheckContext& c, CheckReport& r) {
      fd_sampled(c, r, 1, [](Draw& d) {
        MetricFn F = [](const MetricJet& g) { return flatten(torsion_and_lee(g).theta); };
        return std::pair{flatten(var_lee(d.in)), F};
      });
    });
    add("fd_laplacian", "Delta' u", Rel, 1e-6, always, [](CheckContext& c, CheckReport& r) {
      fd_sampled(c, r, 1, [](Draw& d) {
        const ScalarJet u = *d.in.u;
        MetricFn F = [u](const MetricJet& g) { return flatten(levi_civita(g, u).laplacian); };
        return std::pair{flatten(var_laplacian(d.in)), F};
      });
    });
    add("fd_ricci_endo", "g(S' X, Y)", Rel, 1e-6, always, [](CheckContext& c, CheckReport& r) {
      fd_sampled(c, r, 1, [](Draw& d) {
        const RealVec X = d.X, Y = d.Y;
        const CMat G = d.G;
        MetricFn F = [X, Y, G](const MetricJet& g) {
          return flatten(metric_pairing(G, apply_endo(chern_ricci(g).s.endo(), X), Y));
        };
        return std::pair{flatten(var_ricci_endo(d.in, X, Y)), F};
      });
    });
    add("fd_pairing", "g(alpha, beta)' = -g(alpha o h, beta)", Rel, 1e-6, always,
        [](CheckContext& c, CheckReport& r) {
          fd_sampled(c, r, 1, [&c](Draw& d) {
            const auto a = random_one_form(c.rng, c.spec.dim()), b = random_one_form(c.rng, c.spec.dim());
            MetricFn F = [a, b](const MetricJet& g) { return flatten(inner(values(g), a, b)); };
            return std::pair{flatten(var_pairing(d.in, a, b)), F};
          });
        });
    add("fd_endo_pairing", "g(A, B)' = 0 for fixed g-symmetric A, B", Rel, 1e-6, always,
        [](CheckContext& c, CheckReport& r) {
          fd_sampled(c, r, 1, [&c](Draw& d) {
            const Sym11Value A{random_hermitian(c.rng, c.spec.dim()), d.G};
            const Sym11Value B{random_hermitian(c.rng, c.spec.dim()), d.G};
            const RealEndoValue a = to_real(A), b = to_real(B);
            MetricFn F = [a, b](const MetricJet& g) { return flatten(inner(values(g), a, b)); };
            return std::pair{flatten(var_endo_pairing(d.in, A, B)), F};
          });
        });
    add("fd_zero_direction", "finite differences along h = 0 vanish exactly", Abs, 0.0, always,
        [](CheckContext& c, CheckReport& r) {
          ErrAcc acc;
          for (int k = 0; k < c.cfg.samples; ++k) {
            const MetricJet g = c.spec.metric_jet(c.spec.sample(c.rng));
            const PerturbationJet zero = g * cplx(0.0);
            auto F = [](const MetricJet& gt) { return flatten(chern_scalar(gt)); };
            acc.add(fd_derivative(F, g, zero, 1, c.cfg.dts).value, Tensor{0.0});
            acc.add(fd_derivative(F, g, zero, 2, c.cfg.dts).value, Tensor{0.0});
          }
          acc.put(r);
        });

    // ---- second variation
    add("fd_second_var", "(scal^Ch)''(h, h) against the second-order path difference", Rel, 1e-4, always,
        [](CheckContext& c, CheckReport& r) {
          fd_sampled(c, r, 2, [&c](Draw& d) {
            return std::pair{flatten(second_var(d.in, c.spec.is_kahler)),
                             MetricFn([](const MetricJet& g) { return flatten(chern_scalar(g)); })};
          });
        });
    add("second_var_linear_path", "along G + t eta the second derivative is slin2(h, h) - gamma(h o h)", Rel, 1e-4,
        always, [](CheckContext& c, CheckReport& r) {
          ErrAcc acc;
          for (int k = 0; k < c.cfg.samples; ++k) {
            Draw d = draw(c);
            const double f0 = chern_scalar(d.in.g);
            std::vector<Tensor> st;
            for (double dt : c.cfg.dts) {
              const double fp = chern_scalar(metric_path(d.in.g, d.in.h1, dt, 1));
              const double fm = chern_scalar(metric_path(d.in.g, d.in.h1, -dt, 1));
              st.push_back({(fp - 2.0 * f0 + fm) / (dt * dt)});
            }
            VariationInput sq = d.in;  // h o h, lowered: eta G^{-1} eta
            sq.h1 = d.in.h1 * inverse(d.in.g) * d.in.h1;
            acc.add(second_var(d.in, c.spec.is_kahler) - gamma(sq), richardson(st, c.cfg.dts)[0]);
          }
          acc.put(r);
        });
    add("slin2_kahler", "general second variation equals the Kahler form", Rel, 1e-10, kahler_only,
        [](CheckContext& c, CheckReport& r) {
          ErrAcc acc;
          for (int k = 0; k < c.cfg.samples; ++k) {
            Draw d = draw(c);
            const auto v = second_var_both(d.in, true);
            acc.add(v.general, *v.kahler);
          }
          acc.put(r);
        });
    add("closed_cos_case", "(scal)''(cos x Id, cos x Id) = -2 cos^2 x on the flat torus", Abs, 1e-5,
        [](const ManifoldSpec& s) { return s.name == "flat_torus_1"; },
        [](CheckContext& c, CheckReport& r) {
          ErrAcc acc;
          const auto h = named_perturbation(c.spec, "cos_identity");
          for (int k = 0; k < c.cfg.samples; ++k) {
            const Point p = c.spec.sample(c.rng);
            const VariationInput in = make_input(c.spec, *h, p);
            const double ref = -2.0 * std::cos(p[0]) * std::cos(p[0]);
            acc.add(second_var(in, true), ref);
            auto F = [](const MetricJet& g) { return flatten(chern_scalar(g)); };
            acc.add(fd_derivative(F, in.g, in.h1, 2, c.cfg.dts).value[0], ref);
          }
          acc.put(r);
        });

    // ---- structural properties of the variations
    add("gamma_linearity", "gamma(a h1 + b h2) = a gamma(h1) + b gamma(h2)", Rel, 1e-12, always,
        [](CheckContext& c, CheckReport& r) {
          ErrAcc acc;
          for (int k = 0; k < c.cfg.samples; ++k) {
            Draw d = draw(c);
            const auto h2 = random_perturbation(c.spec, c.rng)->eval2(d.p);
            const double a = c.rng.uniform(-2.0, 2.0), b = c.rng.uniform(-2.0, 2.0);
            VariationInput i2 = d.in, mix = d.in;
            i2.h1 = h2;
            mix.h1 = d.in.h1 * cplx(a) + h2 * cplx(b);
            acc.add(gamma(mix), a * gamma(d.in) + b * gamma(i2));
          }
          acc.put(r);
        });
    add("gamma_chain", "gamma = 2 (Tr^C)'(S~) + 2 Tr^C(S~')", Rel, 1e-10, always,
        [](CheckContext& c, CheckReport& r) {
          ErrAcc acc;
          for (int k = 0; k < c.cfg.samples; ++k) {
            Draw d = draw(c);
            const Form11Value st = chern_ricci(d.in.g).s_tilde;
            acc.add(gamma(d.in), 2.0 * var_trace(d.in, st) + 2.0 * trace_form(d.G, var_ricci_form(d.in)));
          }
          acc.put(r);
        });
    add("ke_gamma", "gamma(h) = 1/2 (Delta tr^R h - (lambda/m) tr^R h) on Kahler-Einstein metrics", Rel, 1e-10,
        kahler_einstein, [](CheckContext& c, CheckReport& r) {
          ErrAcc acc;
          const double lm = *c.spec.scal / c.spec.dim();
          for (int k = 0; k < c.cfg.samples; ++k) {
            Draw d = draw(c);
            const ScalarJet tr = trace_c_jet(d.in.g, d.in.h1) * 2.0;
            acc.add(gamma(d.in), 0.5 * (levi_civita(d.in.g, tr).laplacian - lm * tr.value()));
            const Sym11Value gs = gamma_star(d.in);
            const double coef = 0.5 * (levi_civita(d.in.g, *d.in.u).laplacian - lm * d.in.u->value());
            acc.add(flatten(gs.endo()), flatten(CMat::identity(c.spec.dim()) * cplx(coef)));
          }
          acc.put(r);
        });
    add("curvature_variation_skew", "Omega' stays skew for g_t: eta E + G E' anti-Hermitian", Rel, 1e-10, always,
        [](CheckContext& c, CheckReport& r) {
          ErrAcc acc;
          for (int k = 0; k < c.cfg.samples; ++k) {
            Draw d = draw(c);
            const CMat M =
                values(d.in.h1) * curvature_endo(d.in.g, d.X, d.Y) + d.G * var_curvature(d.in, d.X, d.Y);
            acc.add(flatten(M + M.adjoint()), flatten(M * cplx(0.0)));
          }
          acc.put(r);
        });

    // ---- finite-difference sanity and negative controls
    add("fd_error_model", "raw stencil error shrinks ~dt^2 from 1e-2 to 1e-3 (|log10 ratio - 2|)", Abs, 1.0,
        always, [](CheckContext& c, CheckReport& r) {
          const std::vector<double> dts{1e-2, 1e-3};
          double e1 = 0, e2 = 0;
          for (int k = 0; k < c.cfg.samples; ++k) {
            Draw d = draw(c);
            const auto fd = fd_derivative([](const MetricJet& g) { return flatten(chern_scalar(g)); }, d.in.g,
                                          d.in.h1, 1, dts);
            const double ref = gamma(d.in);
            e1 = std::max(e1, std::abs(fd.stencils[0][0] - ref));
            e2 = std::max(e2, std::abs(fd.stencils[1][0] - ref));
          }
          const double ratio = e1 / e2;
          r.max_abs_err = r.max_rel_err = std::abs(std::log10(ratio) - 2.0);
          r.params["err_dt_1e-2"] = e1;
          r.params["err_dt_1e-3"] = e2;
          r.params["ratio"] = ratio;
          r.samples = c.cfg.samples;
        });
    // On flat tori every metric derivative scales exactly with t, so tiny dt
    // is not roundoff-limited there.
    add("fd_roundoff_control", "negative control: dt = 1e-12 is roundoff-dominated", Neg, 1e-6, non_flat,
        [](CheckContext& c, CheckReport& r) {
          ErrAcc acc;
          for (int k = 0; k < c.cfg.samples; ++k) {
            Draw d = draw(c);
            const auto fd = fd_derivative([](const MetricJet& g) { return flatten(chern_scalar(g)); }, d.in.g,
                                          d.in.h1, 1, {1e-12});
            acc.add(flatten(gamma(d.in)), fd.value);
          }
          acc.put(r);
        });
    add("wrong_formula_control", "negative control: gamma with the sign of g(h, S) flipped is rejected", Neg, 1e-6,
        non_flat,
        [](CheckContext& c, CheckReport& r) {
          ErrAcc acc;
          for (int k = 0; k < c.cfg.samples; ++k) {
            Draw d = draw(c);
            const double hs = inner(d.G, Sym11Value{values(d.in.h1), d.G}, chern_ricci(d.in.g).s);
            const auto fd = fd_derivative([](const MetricJet& g) { return flatten(chern_scalar(g)); }, d.in.g,
                                          d.in.h1, 1, c.cfg.dts);
            acc.add(flatten(gamma(d.in) + 2.0 * hs), fd.value);
          }
          acc.put(r);
        });

    // ---- global checks
    add("adjointness", "<gamma h, u> = <h, gamma^* u> in L^2", Rel, 0.0, adjointness_target,
        [](CheckContext& c, CheckReport& r) {
          const int n = c.cfg.grid_for(c.spec);
          const auto rep = adjointness_test(c.spec, c.spec.rule(n), c.cfg.seed, default_adjointness_pairs(c.spec));
          r.max_abs_err = rep.max_abs_err;
          r.max_rel_err = rep.max_rel_err;
          r.samples = rep.samples;
          r.params = rep.params;
        });
    add("witness", "obstruction integral on CP^1 x CP^1 equals 128 pi^2 / 3", Rel, 1e-6,
        [](const ManifoldSpec& s) { return s.name == "cp1xcp1"; },
        [](CheckContext& c, CheckReport& r) {
          const auto w = instability_witness(c.cfg.sphere_grid);
          r.max_abs_err = std::abs(w.obstruction.value - kWitnessValue);
          r.max_rel_err = r.max_abs_err / kWitnessValue;
          r.samples = static_cast<int>(w.obstruction.nodes);
          r.params["value"] = w.obstruction.value;
          r.params["gamma_star_residual"] = w.obstruction.gamma_star_residual;
          r.params["gamma_residual"] = w.obstruction.gamma_residual;
          r.params["eigen_residual"] = w.eigen_residual;
          r.params["fce_residual"] = w.fce_residual;
          r.params["lambda"] = w.lambda;
          r.params["grid"] = c.cfg.sphere_grid;
        });
    add("witness_grid_doubling", "obstruction integral stable under grid doubling", Rel, 1e-9,
        [](const ManifoldSpec& s) { return s.name == "cp1xcp1"; },
        [](CheckContext& c, CheckReport& r) {
          const double a = witness_value_at(c.cfg.sphere_grid), b = witness_value_at(2 * c.cfg.sphere_grid);
          r.max_abs_err = std::abs(a - b);
          r.max_rel_err = r.max_abs_err / std::abs(a);
          r.samples = 2;
          r.params["value"] = a;
          r.params["value_doubled"] = b;
        });
    add("witness_control", "constant traceless h integrates to zero", Abs, 1e-8,
        [](const ManifoldSpec& s) { return s.name == "cp1xcp1"; },
        [](CheckContext& c, CheckReport& r) {
          const auto rep = obstruction(c.spec, c.spec.rule(c.cfg.sphere_grid), *height_function(),
                                       *named_perturbation(c.spec, "traceless"), "height", "Id_1 - Id_2");
          r.max_abs_err = r.max_rel_err = std::abs(rep.value);
          r.samples = static_cast<int>(rep.nodes);
          r.params["value"] = rep.value;
        });
    add("witness_non_kernel", "negative control: u + 0.1 is refused by kernel validation", Neg, 1e-8,
        [](const ManifoldSpec& s) { return s.name == "cp1xcp1"; },
        [](CheckContext& c, CheckReport& r) {
          const auto u = height_function(0.1);
          bool refused = false;
          try {
            obstruction(c.spec, c.spec.rule(8), *u, *named_perturbation(c.spec, "witness"), "height + 0.1", "witness");
          } catch (const KernelError& e) {
            refused = true;
            r.note = e.what();
          }
          double res = 0;
          for (int k = 0; k < c.cfg.samples; ++k) {
            const Point p = c.spec.sample(c.rng);
            const Sym11Value gs = gamma_star(c.spec.metric_jet(p), u->eval2(p));
            res = std::max(res, std::sqrt(std::max(0.0, inner(gs.metric, gs, gs))));
          }
          r.max_abs_err = res;
          r.max_rel_err = refused ? res : 0.0;
          r.samples = c.cfg.samples;
        });
    add("stability_flat", "flat-torus obstruction with u = 1 and constant-trace h vanishes", Abs, 1e-10,
        [](const ManifoldSpec& s) { return named(s, {"flat_torus_1", "flat_torus_2"}); },
        [](CheckContext& c, CheckReport& r) {
          const auto one = make_scalar_field([](const auto& x) { return detail::constant_like(x, 1.0); });
          const auto h = named_perturbation(c.spec, c.spec.dim() == 2 ? "traceless" : "identity");
          const auto rep = obstruction(c.spec, c.spec.rule(8), *one, *h, "1", "constant trace");
          r.max_abs_err = r.max_rel_err = std::abs(rep.value);
          r.samples = static_cast<int>(rep.nodes);
        });
    add("determinism", "two runs of a sub-suite give identical JSONL", Abs, 0.0,
        [](const ManifoldSpec& s) { return s.name == "hopf"; },
        [](CheckContext& c, CheckReport& r) {
          SuiteConfig sub;
          sub.manifolds = {"hopf", "cp1"};
          sub.checks = {"fd_gamma", "fd_lee", "chern_lapl", "adjointness"};
          sub.seed = c.cfg.seed;
          sub.samples = 5;
          auto render = [&] {
            std::vector<std::string> lines;
            for (const auto& rep : run_suite(sub)) lines.push_back(to_jsonl(rep, false));
            return lines;
          };
          const auto a = render(), b = render();
          int diff = a.size() == b.size() ? 0 : 1;
          for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) diff += a[i] != b[i];
          r.max_abs_err = r.max_rel_err = diff;
          r.samples = static_cast<int>(a.size());
        });
    return v;
  }();
  return reg;
}

inline std::vector<std::string> check_names() {
  std::vector<std::string> out;
  for (const auto& c : check_registry()) out.push_back(c.name);
  return out;
}

inline const CheckDef& find_check(const std::string& name) {
  for (const auto& c : check_registry())
    if (c.name == name) return c;
  std::string valid;
  for (const auto& c : check_registry()) valid += (valid.empty() ? "" : ", ") + c.name;
  throw std::invalid_argument("unknown check '" + name + "' (valid: " + valid + ")");
}

inline CheckReport run_check(const CheckDef& def, const SuiteConfig& cfg, const ManifoldSpec& spec) {
  CheckReport r;
  r.check = def.name;
  r.manifold = spec.name;
  r.seed = cfg.seed;
  r.mode = def.mode;
  r.tol = def.name == "adjointness" ? default_adjointness_tol(spec) : def.tol;
  if (auto it = cfg.tolerances.find(def.name); it != cfg.tolerances.end()) r.tol = it->second;
  const auto t0 = std::chrono::steady_clock::now();
  CheckContext ctx{cfg, spec, CounterRng(cfg.seed, detail::fnv1a(def.name + "/" + spec.name))};
  bool failed = false;
  try {
    def.run(ctx, r);
  } catch (const std::exception& e) {
    failed = true;
    r.note = std::string("error: ") + e.what();
    r.max_abs_err = r.max_rel_err = std::nan("");
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.finalize();
  if (failed) r.pass = false;
  return r;
}

// Reports are ordered by check (config order, else registry order), then by
// manifold (config order); checks that do not apply to a manifold are skipped.
inline std::vector<CheckReport> run_suite(const SuiteConfig& cfg_in) {
  SuiteConfig cfg = cfg_in;
  std::vector<std::string> mans;
  for (const auto& m : cfg.manifolds) {
    if (m == "all")
      mans.insert(mans.end(), manifold_names().begin(), manifold_names().end());
    else
      mans.push_back(m);
  }
  cfg.manifolds = mans;
  cfg.validate();
  std::vector<ManifoldSpec> specs;
  for (const auto& m : cfg.manifolds) specs.push_back(make_manifold(m));

  std::vector<const CheckDef*> defs;
  if (cfg.checks.empty())
    for (const auto& c : check_registry()) defs.push_back(&c);
  else
    for (const auto& n : cfg.checks) defs.push_back(&find_check(n));
  for (const auto& [name, tol] : cfg.tolerances) find_check(name);

  std::vector<std::pair<const CheckDef*, const ManifoldSpec*>> tasks;
  for (const auto* d : defs)
    for (const auto& s : specs)
      if (d->applies(s)) tasks.emplace_back(d, &s);
  if (tasks.empty()) throw std::invalid_argument("nothing to run: no check applies to the selected manifolds");

  std::vector<CheckReport> out(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t i) { out[i] = run_check(*tasks[i].first, cfg, *tasks[i].second); });
  return out;
}

}  // namespace chernlab
