#pragma once

// The manifold zoo: one chart per manifold, closed-form metrics, point
// samplers, quadrature rules and reference values.

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chernlab/fields.hpp"
#include "chernlab/quadrature.hpp"

namespace chernlab {

struct ManifoldSpec {
  std::string name;
  ChartSpec chart;
  MatrixFieldPtr metric;
  bool is_kahler = false;
  std::optional<double> scal;    // constant Chern-scalar curvature, when known
  std::optional<double> volume;  // total volume of the quadrature domain
  std::function<bool(const Point&)> in_domain;
  std::function<Point(CounterRng&)> sample;
  std::function<QuadratureRule(int)> quadrature;  // empty for pointwise-only manifolds

  int dim() const { return chart.m; }

  MetricJet metric_jet(const Point& p) const {
    if (p.n != 2 * chart.m || !in_domain(p)) throw std::domain_error("point outside chart domain of " + name);
    return metric->eval2(p);
  }
  CMat metric_value(const Point& p) const { return values(metric_jet(p)); }
  QuadratureRule rule(int n) const {
    if (!quadrature) throw std::invalid_argument(name + " has no quadrature rule");
    return quadrature(n);
  }
};

namespace detail {

template <int N>
RJet<N> constant_like(const Coords<N>& x, double c) {
  RJet<N> r(c);
  r.set_nvars(x[0].nvars());
  return r;
}

template <int N>
RJet<N> norm2(const Coords<N>& x, int from, int to) {
  RJet<N> s = constant_like(x, 0.0);
  for (int a = from; a < to; ++a) s += x[a] * x[a];
  return s;
}

inline double gaussian(CounterRng& rng) {
  const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Stereographic chart point of the sphere with cos(theta) in [-0.9, 0.9].
inline cplx sample_sphere_chart(CounterRng& rng) {
  const double c = rng.uniform(-0.9, 0.9);
  const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return std::polar(std::sqrt((1.0 + c) / (1.0 - c)), phi);
}

inline double sqrt_det_real(const CMat& G) { return std::sqrt(determinant(real_metric(G))); }

}  // namespace detail

// max |d omega| over the sample, from first jets of the metric.
inline double d_omega_max(const MetricJet& G) {
  const auto gr = real_metric(G);
  const int n = gr.rows();
  const RMat J = complex_structure(n / 2);
  // omega_ab = g(J d_a, d_b) = sum_c J(c, a) g_cb
  std::array<RMat, kMaxVars> dom;
  for (int e = 0; e < n; ++e) {
    dom[e] = RMat(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double s = 0;
        for (int c = 0; c < n; ++c) s += J(c, a) * gr(c, b).d(e);
        dom[e](a, b) = s;
      }
  }
  double mx = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        mx = std::max(mx, std::abs(dom[a](b, c) - dom[b](a, c) + dom[c](a, b)));
  return mx;
}

namespace detail {

inline void finish(ManifoldSpec& s, std::uint64_t seed = 7) {
  // Kahler flag from the numerical test on a fixed sample.
  CounterRng rng(seed, 0x4b61686c6572ULL);
  double mx = 0;
  for (int i = 0; i < 32; ++i) {
    const Point p = s.sample(rng);
    const CMat g = s.metric_value(p);
    require_metric(g);
    mx = std::max(mx, d_omega_max(s.metric_jet(p)));
  }
  s.is_kahler = mx <= 1e-10;
}

inline ManifoldSpec torus_base(std::string name, int m) {
  ManifoldSpec s;
  s.name = std::move(name);
  s.chart.m = m;
  s.chart.kind = ChartKind::PeriodicTorus;
  for (int a = 0; a < 2 * m; ++a) s.chart.periods[a] = 2.0 * std::numbers::pi;
  s.chart.validate();
  s.in_domain = [](const Point& p) {
    for (int a = 0; a < p.n; ++a)
      if (!std::isfinite(p[a])) return false;
    return true;
  };
  const ChartSpec chart = s.chart;
  s.sample = [chart](CounterRng& rng) {
    Point p(2 * chart.m);
    for (int a = 0; a < p.n; ++a) p[a] = rng.uniform(0.0, chart.periods[a]);
    return p;
  };
  return s;
}

template <class Spec>
void attach_torus_rule(Spec& s) {
  const ChartSpec chart = s.chart;
  const MatrixFieldPtr metric = s.metric;
  const std::string name = s.name;
  s.quadrature = [chart, metric, name](int n) {
    return torus_rule(name, chart, n, [&](const Point& p) { return sqrt_det_real(values(metric->eval2(p))); });
  };
}

}  // namespace detail

// Flat torus C^m / (2 pi Z)^{2m}, G = 1/2.
inline ManifoldSpec flat_torus(int m) {
  auto s = detail::torus_base("flat_torus_" + std::to_string(m), m);
  s.metric = make_matrix_field(m, [m](const auto& x) {
    constexpr int N = std::decay_t<decltype(x[0])>::order;
    CJetMat<N> G(m, m);
    for (int i = 0; i < m; ++i) G(i, i) = detail::constant_like(x, 0.5).template cast<cplx>();
    return G;
  });
  s.scal = 0.0;
  s.volume = std::pow(2.0 * std::numbers::pi, 2 * m);
  detail::attach_torus_rule(s);
  detail::finish(s);
  return s;
}

// Conformal factor presets u = sum_a eps_a cos(x^a + c_a), separable so the
// volume has a closed form in Bessel functions.
struct ConformalPreset {
  std::array<double, kMaxVars> eps{};
  std::array<double, kMaxVars> shift{};
};

inline ConformalPreset default_conformal(int m) {
  ConformalPreset c;
  if (m == 1) {
    c.eps = {0.1, 0.0, 0.0, 0.0};
  } else {
    c.eps = {0.1, 0.07, 0.05, 0.08};
    c.shift = {0.0, 0.4, 1.1, -0.7};
  }
  return c;
}

// G = (1/2) e^{2u} Id.
inline ManifoldSpec conformal_torus(int m, const ConformalPreset& c) {
  auto s = detail::torus_base("conformal_torus_" + std::to_string(m), m);
  s.metric = make_matrix_field(m, [m, c](const auto& x) {
    constexpr int N = std::decay_t<decltype(x[0])>::order;
    RJet<N> u = detail::constant_like(x, 0.0);
    for (int a = 0; a < 2 * m; ++a)
      if (c.eps[a] != 0.0) u += cos(x[a] + c.shift[a]) * c.eps[a];
    const CJet<N> f = (exp(u * 2.0) * 0.5).template cast<cplx>();
    CJetMat<N> G(m, m);
    for (int i = 0; i < m; ++i) G(i, i) = f;
    return G;
  });
  double vol = 1.0;
  for (int a = 0; a < 2 * m; ++a) vol *= 2.0 * std::numbers::pi * std::cyl_bessel_i(0.0, 2.0 * m * c.eps[a]);
  s.volume = vol;
  detail::attach_torus_rule(s);
  detail::finish(s);
  return s;
}

// Potential presets phi = sum_n a_n cos(p_n . x + c_n).
struct PotentialPreset {
  struct Term {
    double a;
    std::array<double, kMaxVars> p;
    double c;
  };
  std::vector<Term> terms;
};

inline PotentialPreset default_potential(int m) {
  PotentialPreset p;
  if (m == 1) {
    p.terms = {{0.12, {1, 1, 0, 0}, 0.0}, {0.05, {0, 2, 0, 0}, 0.5}};
  } else {
    p.terms = {{0.15, {1, 0, 0, 1}, 0.0}, {0.1, {0, 2, -1, 0}, 0.3}, {0.04, {1, 1, 1, 0}, -0.2}};
  }
  return p;
}

// G = 1/2 Id + d dbar phi; Kahler with the flat volume.
inline ManifoldSpec kahler_potential_torus(int m, const PotentialPreset& pot) {
  auto s = detail::torus_base("kahler_torus_" + std::to_string(m), m);
  s.metric = make_matrix_field(m, [m, pot](const auto& x) {
    constexpr int N = std::decay_t<decltype(x[0])>::order;
    CJetMat<N> G(m, m);
    for (int i = 0; i < m; ++i) G(i, i) = detail::constant_like(x, 0.5).template cast<cplx>();
    for (const auto& t : pot.terms) {
      RJet<N> th = detail::constant_like(x, t.c);
      for (int a = 0; a < 2 * m; ++a)
        if (t.p[a] != 0.0) th += x[a] * t.p[a];
      const RJet<N> cs = cos(th) * (-t.a);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          const cplx ki(0.5 * t.p[2 * i], -0.5 * t.p[2 * i + 1]);
          const cplx kj(0.5 * t.p[2 * j], -0.5 * t.p[2 * j + 1]);
          G(j, i) += cs * (ki * std::conj(kj));
        }
    }
    return G;
  });
  s.volume = std::pow(2.0 * std::numbers::pi, 2 * m);
  detail::attach_torus_rule(s);
  detail::finish(s);
  return s;
}

// Hopf surface metric delta / |z|^2 on C^2 \ {0}; the quadrature domain is
// the fundamental shell 1 <= |z| < 2.
inline ManifoldSpec hopf_surface() {
  ManifoldSpec s;
  s.name = "hopf";
  s.chart.m = 2;
  s.chart.kind = ChartKind::LogAnnulus;
  s.metric = make_matrix_field(2, [](const auto& x) {
    constexpr int N = std::decay_t<decltype(x[0])>::order;
    const CJet<N> f = recip(detail::norm2(x, 0, 4)).template cast<cplx>();
    CJetMat<N> G(2, 2);
    G(0, 0) = f;
    G(1, 1) = f;
    return G;
  });
  s.in_domain = [](const Point& p) {
    const double r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3];
    return std::isfinite(r2) && r2 > 0.0;
  };
  s.sample = [](CounterRng& rng) {
    Point p(4);
    double r2 = 0;
    while (r2 < 1e-6) {
      r2 = 0;
      for (int a = 0; a < 4; ++a) {
        p[a] = detail::gaussian(rng);
        r2 += p[a] * p[a];
      }
    }
    const double rad = rng.uniform(1.0, 2.0) / std::sqrt(r2);
    for (int a = 0; a < 4; ++a) p[a] *= rad;
    return p;
  };
  s.scal = 4.0;
  s.volume = 8.0 * std::numbers::pi * std::numbers::pi * std::log(2.0);
  s.quadrature = [](int n) {
    return annulus_rule("hopf", n, [](const Point& p) {
      const double r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3];
      return 4.0 / (r2 * r2);
    });
  };
  detail::finish(s);
  return s;
}

namespace detail {
template <int N>
CJet<N> fs_factor(const Coords<N>& x, int k, double radius) {
  const RJet<N> q = x[2 * k] * x[2 * k] + x[2 * k + 1] * x[2 * k + 1] + 1.0;
  return (recip(q * q) * (2.0 * radius * radius)).template cast<cplx>();
}
}  // namespace detail

// Round sphere of radius r through stereographic coordinates,
// G = 2 r^2 / (1 + |z|^2)^2.
inline ManifoldSpec fubini_study_cp1(double radius = 1.0) {
  if (!(radius > 0)) throw std::invalid_argument("radius must be positive");
  ManifoldSpec s;
  s.name = radius == 1.0 ? "cp1" : "cp1_r" + std::to_string(radius);
  s.chart.m = 1;
  s.chart.kind = ChartKind::Stereographic;
  s.metric = make_matrix_field(1, [radius](const auto& x) {
    constexpr int N = std::decay_t<decltype(x[0])>::order;
    CJetMat<N> G(1, 1);
    G(0, 0) = detail::fs_factor(x, 0, radius);
    return G;
  });
  s.in_domain = [](const Point& p) { return std::isfinite(p[0]) && std::isfinite(p[1]); };
  s.sample = [](CounterRng& rng) {
    const cplx z = detail::sample_sphere_chart(rng);
    Point p(2);
    p[0] = z.real();
    p[1] = z.imag();
    return p;
  };
  s.scal = 2.0 / (radius * radius);
  s.volume = 4.0 * std::numbers::pi * radius * radius;
  const std::string name = s.name;
  s.quadrature = [name, radius](int n) { return sphere_rule(name, n, radius); };
  detail::finish(s);
  return s;
}

// CP^1 x CP^1 with the product of unit round metrics: Kahler-Einstein,
// S = Id, scal = 4.
inline ManifoldSpec fs_product() {
  ManifoldSpec s;
  s.name = "cp1xcp1";
  s.chart.m = 2;
  s.chart.kind = ChartKind::Stereographic;
  s.metric = make_matrix_field(2, [](const auto& x) {
    constexpr int N = std::decay_t<decltype(x[0])>::order;
    CJetMat<N> G(2, 2);
    G(0, 0) = detail::fs_factor(x, 0, 1.0);
    G(1, 1) = detail::fs_factor(x, 1, 1.0);
    return G;
  });
  s.in_domain = [](const Point& p) {
    for (int a = 0; a < 4; ++a)
      if (!std::isfinite(p[a])) return false;
    return true;
  };
  s.sample = [](CounterRng& rng) {
    const cplx z1 = detail::sample_sphere_chart(rng), z2 = detail::sample_sphere_chart(rng);
    Point p(4);
    p[0] = z1.real();
    p[1] = z1.imag();
    p[2] = z2.real();
    p[3] = z2.imag();
    return p;
  };
  s.scal = 4.0;
  s.volume = 16.0 * std::numbers::pi * std::numbers::pi;
  s.quadrature = [](int n) { return sphere_product_rule("cp1xcp1", n, 1.0, 1.0); };
  detail::finish(s);
  return s;
}

inline const std::vector<std::string>& manifold_names() {
  static const std::vector<std::string> names = {"flat_torus_1", "flat_torus_2", "conformal_torus_1",
                                                 "conformal_torus_2", "kahler_torus_2", "hopf",
                                                 "cp1", "cp1xcp1"};
  return names;
}

inline ManifoldSpec make_manifold(const std::string& name) {
  if (name == "flat_torus_1") return flat_torus(1);
  if (name == "flat_torus_2") return flat_torus(2);
  if (name == "conformal_torus_1") return conformal_torus(1, default_conformal(1));
  if (name == "conformal_torus_2") return conformal_torus(2, default_conformal(2));
  if (name == "kahler_torus_1") return kahler_potential_torus(1, default_potential(1));
  if (name == "kahler_torus_2") return kahler_potential_torus(2, default_potential(2));
  if (name == "hopf") return hopf_surface();
  if (name == "cp1") return fubini_study_cp1(1.0);
  if (name == "cp1xcp1") return fs_product();
  std::string valid;
  for (const auto& n : manifold_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown manifold '" + name + "' (valid: " + valid + ", kahler_torus_1)");
}

// ---------------------------------------------------------------------------
// Band-limited random fields.

// Polynomial of degree <= 2 in the unit-sphere embedding coordinates of each
// sphere factor, n(z) = (2 Re z, 2 Im z, |z|^2 - 1) / (1 + |z|^2).
struct SpherePolynomial {
  int factors = 1;
  std::vector<double> coeff;  // 10^factors entries

  static constexpr int kMonomials = 10;  // 1, n1, n2, n3, n1^2, n1n2, n1n3, n2^2, n2n3, n3^2

  static SpherePolynomial random(CounterRng& rng, int factors, double amplitude) {
    SpherePolynomial p;
    p.factors = factors;
    const int n = factors == 1 ? kMonomials : kMonomials * kMonomials;
    for (int i = 0; i < n; ++i) p.coeff.push_back(rng.uniform(-amplitude, amplitude));
    return p;
  }

  template <int N>
  static std::array<RJet<N>, kMonomials> monomials(const Coords<N>& x, int k) {
    const RJet<N> q = x[2 * k] * x[2 * k] + x[2 * k + 1] * x[2 * k + 1];
    const RJet<N> inv = recip(q + 1.0);
    const RJet<N> n1 = x[2 * k] * inv * 2.0, n2 = x[2 * k + 1] * inv * 2.0, n3 = (q - 1.0) * inv;
    const RJet<N> one = detail::constant_like(x, 1.0);
    return {one, n1, n2, n3, n1 * n1, n1 * n2, n1 * n3, n2 * n2, n2 * n3, n3 * n3};
  }

  template <int N>
  RJet<N> operator()(const Coords<N>& x) const {
    RJet<N> s = detail::constant_like(x, 0.0);
    const auto a = monomials(x, 0);
    if (factors == 1) {
      for (int i = 0; i < kMonomials; ++i) s += a[i] * coeff[i];
      return s;
    }
    const auto b = monomials(x, 1);
    for (int i = 0; i < kMonomials; ++i) {
      RJet<N> t = detail::constant_like(x, 0.0);
      for (int j = 0; j < kMonomials; ++j) t += b[j] * coeff[i * kMonomials + j];
      s += a[i] * t;
    }
    return s;
  }
};

// Random scalar field suited to the manifold's quadrature.
inline ScalarFieldPtr random_scalar(const ManifoldSpec& s, CounterRng& rng, double amplitude = 0.5) {
  if (s.chart.kind == ChartKind::Stereographic) {
    auto p = SpherePolynomial::random(rng, s.dim(), amplitude);
    return make_scalar_field([p](const auto& x) { return p(x); });
  }
  auto f = FourierSum::random(rng, 2 * s.dim(), 3, s.chart.kind == ChartKind::LogAnnulus ? 2 : 4, amplitude);
  f.constant = rng.uniform(-amplitude, amplitude);
  return make_scalar_field([f](const auto& x) { return f(x); });
}

// Random h in Sym^{1,1}. On tori and Hopf eta is a band-limited Hermitian
// matrix field; on sphere factors h = diag(a_1, ..., a_m) with a_k sphere
// polynomials (smooth global sections).
inline MatrixFieldPtr random_perturbation(const ManifoldSpec& s, CounterRng& rng, double amplitude = 0.3) {
  const int m = s.dim();
  if (s.chart.kind == ChartKind::Stereographic) {
    std::vector<SpherePolynomial> diag;
    for (int k = 0; k < m; ++k) diag.push_back(SpherePolynomial::random(rng, m, amplitude));
    return endo_perturbation(s.metric, [m, diag](const auto& x) {
      constexpr int N = std::decay_t<decltype(x[0])>::order;
      CJetMat<N> H(m, m);
      for (int k = 0; k < m; ++k) H(k, k) = diag[k](x).template cast<cplx>();
      return H;
    });
  }
  const int harm = s.chart.kind == ChartKind::LogAnnulus ? 2 : 4;
  std::vector<FourierSum> parts;
  for (int i = 0; i < m * m; ++i) {
    auto f = FourierSum::random(rng, 2 * m, 2, harm, amplitude);
    f.constant = rng.uniform(-amplitude, amplitude);
    parts.push_back(f);
  }
  return make_matrix_field(m, [m, parts](const auto& x) {
    constexpr int N = std::decay_t<decltype(x[0])>::order;
    CJetMat<N> E(m, m);
    int idx = 0;
    for (int i = 0; i < m; ++i) E(i, i) = parts[idx++](x).template cast<cplx>();
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        const CJet<N> re = parts[idx++](x).template cast<cplx>();
        const CJet<N> im = parts[idx++](x) * cplx(0, 1);
        E(i, j) = re + im;
        E(j, i) = re - im;
      }
    return E;
  });
}

// Named perturbation presets, written as endomorphisms H of T^{1,0}.
inline const std::vector<std::string>& perturbation_names() {
  static const std::vector<std::string> names = {"zero", "identity", "cos_identity", "traceless", "witness"};
  return names;
}

inline MatrixFieldPtr named_perturbation(const ManifoldSpec& s, const std::string& name) {
  const int m = s.dim();
  if (name == "zero")
    return endo_perturbation(s.metric, [m](const auto& x) {
      constexpr int N = std::decay_t<decltype(x[0])>::order;
      return CJetMat<N>(m, m);
    });
  if (name == "identity")
    return endo_perturbation(s.metric, [m](const auto& x) {
      constexpr int N = std::decay_t<decltype(x[0])>::order;
      return CJetMat<N>::identity(m);
    });
  if (name == "cos_identity")
    return endo_perturbation(s.metric, [m](const auto& x) {
      constexpr int N = std::decay_t<decltype(x[0])>::order;
      CJetMat<N> H(m, m);
      const CJet<N> c = cos(x[0]).template cast<cplx>();
      for (int k = 0; k < m; ++k) H(k, k) = c;
      return H;
    });
  if (name == "traceless" || name == "witness") {
    if (m != 2) throw std::invalid_argument("preset '" + name + "' needs complex dimension 2");
    const bool witness = name == "witness";
    return endo_perturbation(s.metric, [witness](const auto& x) {
      constexpr int N = std::decay_t<decltype(x[0])>::order;
      RJet<N> f = detail::constant_like(x, 1.0);
      if (witness) {
        // 1 + height of the first factor
        const RJet<N> q = x[0] * x[0] + x[1] * x[1];
        f = f + (q - 1.0) / (q + 1.0);
      }
      CJetMat<N> H(2, 2);
      H(0, 0) = f.template cast<cplx>();
      H(1, 1) = -f.template cast<cplx>();
      return H;
    });
  }
  std::string valid;
  for (const auto& n : perturbation_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown perturbation '" + name + "' (valid: " + valid + ")");
}

// Height function of the first sphere factor, (|z1|^2 - 1) / (|z1|^2 + 1).
inline ScalarFieldPtr height_function(double shift = 0.0) {
  return make_scalar_field([shift](const auto& x) {
    const auto q = x[0] * x[0] + x[1] * x[1];
    return (q - 1.0) / (q + 1.0) + shift;
  });
}

}  // namespace chernlab
