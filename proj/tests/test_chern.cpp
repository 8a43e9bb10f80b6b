// Chern connection, curvature, Ricci forms, Lee form and Levi-Civita
// quantities against closed forms.

#include <gtest/gtest.h>

#include <numbers>

#include "test_util.hpp"

using namespace chernlab;
using namespace testutil;

namespace {

ScalarFieldPtr cos_x() {
  return make_scalar_field([](const auto& x) { return cos(x[0]); });
}

double norm2(const Point& p) {
  double s = 0;
  for (int a = 0; a < p.n; ++a) s += p[a] * p[a];
  return s;
}

cplx zc(const Point& p, int k) { return {p[2 * k], p[2 * k + 1]}; }

}  // namespace

TEST(Chern, FlatTorusVanishes) {
  const auto s = flat_torus(2);
  const auto g = s.metric_jet(pt({0.1, 0.2, 0.3, 0.4}));
  const auto gam = chern_christoffel(g);
  const auto om = chern_curvature(g);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(max_abs(gam.gamma[i]), 0.0);
    for (int j = 0; j < 2; ++j) EXPECT_EQ(max_abs(om.om[j][i]), 0.0);
  }
  const auto ric = chern_ricci(g);
  EXPECT_EQ(max_abs(ric.s_tilde.coeffs), 0.0);
  EXPECT_EQ(chern_scalar(g), 0.0);
  EXPECT_EQ(fce_residual(g), 0.0);
}

TEST(Chern, HopfChristoffelSymbols) {
  const auto s = hopf_surface();
  EXPECT_NEAR(std::abs(chern_christoffel(s.metric_jet(pt({1, 0, 0, 0}))).gamma[0](0, 0) + 1.0), 0.0, 1e-14);
  CounterRng rng(20);
  for (int n = 0; n < 10; ++n) {
    const Point p = s.sample(rng);
    const auto gam = chern_christoffel(s.metric_jet(p));
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j) {
          const cplx ref = k == j ? -std::conj(zc(p, i)) / norm2(p) : cplx(0.0);
          EXPECT_NEAR(std::abs(gam(k, i, j) - ref), 0.0, 1e-13);
        }
  }
}

TEST(Chern, ConformalCurveChristoffel) {
  // G = 1/2 e^{2u}, u = 0.1 cos x: Gamma = 2 d_z u = -0.1 sin x
  const auto s = conformal_torus(1, default_conformal(1));
  for (double x : {0.3, 1.7, 4.0}) {
    const auto gam = chern_christoffel(s.metric_jet(pt({x, 2.2})));
    EXPECT_NEAR(std::abs(gam(0, 0, 0) - cplx(-0.1 * std::sin(x))), 0.0, 1e-14);
  }
}

TEST(Chern, SphereCurvatureAtOrigin) {
  const auto g = fubini_study_cp1(1.0).metric_jet(pt({0, 0}));
  EXPECT_NEAR(std::abs(chern_curvature(g).om[0][0](0, 0) - 4.0), 0.0, 1e-13);
}

TEST(Chern, HopfRicciForm) {
  const auto s = hopf_surface();
  CounterRng rng(21);
  for (int n = 0; n < 10; ++n) {
    const Point p = s.sample(rng);
    const auto ric = chern_ricci(s.metric_jet(p));
    const double r2 = norm2(p);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const cplx ref = 2.0 * ((i == j ? 1.0 : 0.0) / r2 - std::conj(zc(p, i)) * zc(p, j) / (r2 * r2));
        EXPECT_NEAR(std::abs(ric.s_tilde.coeffs(j, i) - ref), 0.0, 1e-12);
      }
    EXPECT_LE(ric.logdet_defect, 1e-10);
  }
  const auto at1 = chern_ricci(s.metric_jet(pt({1, 0, 0, 0}))).s_tilde.coeffs;
  EXPECT_NEAR(std::abs(at1(0, 0)), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(at1(1, 1) - 2.0), 0.0, 1e-13);
}

TEST(Chern, SphereRicciIsIdentity) {
  const auto s = fubini_study_cp1(1.0);
  CounterRng rng(22);
  for (int n = 0; n < 10; ++n) {
    const auto ric = chern_ricci(s.metric_jet(s.sample(rng)));
    EXPECT_NEAR(std::abs(ric.s.endo()(0, 0) - 1.0), 0.0, 1e-12);
  }
}

TEST(Chern, ScalarCurvatureGoldenValues) {
  CounterRng rng(23);
  for (const char* name : {"hopf", "cp1", "cp1xcp1", "flat_torus_1", "flat_torus_2"}) {
    const auto s = make_manifold(name);
    for (int n = 0; n < 100; ++n) EXPECT_NEAR(chern_scalar(s.metric_jet(s.sample(rng))), *s.scal, 1e-10) << name;
  }
}

TEST(Chern, HopfLeeForm) {
  const auto s = hopf_surface();
  EXPECT_NEAR(std::abs(torsion_and_lee(s.metric_jet(pt({1, 0, 0, 0}))).theta.c[0] + 1.0), 0.0, 1e-14);
  CounterRng rng(24);
  double first = 0;
  for (int n = 0; n < 10; ++n) {
    const Point p = s.sample(rng);
    const auto tl = torsion_and_lee(s.metric_jet(p));
    for (int i = 0; i < 2; ++i) EXPECT_NEAR(std::abs(tl.theta.c[i] + std::conj(zc(p, i)) / norm2(p)), 0.0, 1e-11);
    EXPECT_LE(tl.frame_defect, 1e-10);
    // d^* theta is constant on the Hopf surface
    if (n == 0) first = tl.dstar_theta;
    EXPECT_NEAR(tl.dstar_theta, first, 1e-10);
    // T^k_{ij} = Gamma^k_{ij} - Gamma^k_{ji}
    const auto gam = chern_christoffel(s.metric_jet(p));
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          EXPECT_NEAR(std::abs(tl.torsion[k](i, j) - (gam(k, i, j) - gam(k, j, i))), 0.0, 1e-14);
  }
  EXPECT_NE(first, 0.0);
}

TEST(Chern, KahlerInputsHaveNoLeeForm) {
  CounterRng rng(25);
  for (const char* name : {"cp1", "cp1xcp1", "kahler_torus_2", "flat_torus_2"}) {
    const auto s = make_manifold(name);
    for (int n = 0; n < 10; ++n) {
      const auto tl = torsion_and_lee(s.metric_jet(s.sample(rng)));
      for (int k = 0; k < s.dim(); ++k) EXPECT_LE(std::abs(tl.theta.c[k]), 1e-12) << name;
      EXPECT_LE(std::abs(tl.dstar_theta), 1e-12) << name;
    }
  }
}

TEST(Chern, KahlerChristoffelSymmetric) {
  CounterRng rng(26);
  const auto s = make_manifold("kahler_torus_2");
  for (int n = 0; n < 10; ++n) {
    const auto gam = chern_christoffel(s.metric_jet(s.sample(rng)));
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_NEAR(std::abs(gam(k, i, j) - gam(k, j, i)), 0.0, 1e-12);
  }
}

TEST(Chern, CurvatureConjugationSymmetry) {
  CounterRng rng(27);
  for (const auto& name : manifold_names()) {
    const auto s = make_manifold(name);
    const int m = s.dim();
    for (int n = 0; n < 5; ++n) {
      const auto om = chern_curvature(s.metric_jet(s.sample(rng)));
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i)
          for (int l = 0; l < m; ++l)
            for (int k = 0; k < m; ++k) {
              const cplx a = std::conj(om(j, i, l, k)), b = om(i, j, k, l);
              EXPECT_LE(std::abs(a - b), 1e-12 * std::max(1.0, std::abs(b))) << name;
            }
    }
  }
}

TEST(Chern, FirstChernEinsteinResidual) {
  CounterRng rng(28);
  const auto c = fubini_study_cp1(1.0);
  for (int n = 0; n < 10; ++n) EXPECT_LE(fce_residual(c.metric_jet(c.sample(rng))), 1e-11);
  EXPECT_EQ(fce_residual(flat_torus(1).metric_jet(pt({1, 2}))), 0.0);
  EXPECT_GT(fce_residual(hopf_surface().metric_jet(pt({1, 0, 0, 0}))), 0.5);
}

// ---------------------------------------------------------------------------
// dd^c, Laplacian, Hessian, divergences

TEST(Ddc, ConstantsAndFlatCosine) {
  const auto g = flat_torus(1).metric_jet(pt({0.8, 0.1}));
  const auto one = make_scalar_field([](const auto& x) { return detail::constant_like(x, 3.0); });
  EXPECT_EQ(max_abs(ddc_scalar(one->eval2(pt({0.8, 0.1}))).coeffs), 0.0);
  const double tr = trace_form(values(g), ddc_scalar(cos_x()->eval2(pt({0.8, 0.1}))));
  EXPECT_NEAR(tr, std::cos(0.8), 1e-14);
}

TEST(Ddc, ChernLaplacianIdentity) {
  // Tr^C(dd^c u) = Delta u + g(du, theta) on every zoo manifold.
  CounterRng rng(29);
  for (const auto& name : manifold_names()) {
    const auto s = make_manifold(name);
    for (int n = 0; n < 50; ++n) {
      const Point p = s.sample(rng);
      const auto g = s.metric_jet(p);
      const auto u = random_scalar(s, rng)->eval2(p);
      const double lhs = trace_form(values(g), ddc_scalar(u));
      const double rhs =
          levi_civita(g, u).laplacian + inner(values(g), detail::differential(u), torsion_and_lee(g).theta);
      EXPECT_NEAR(lhs, rhs, 1e-10) << name;
    }
  }
}

TEST(Ddc, KahlerHessianForm) {
  // dd^c u(X, Y) = g(Hess u X, JY) - g(Hess u JX, Y)
  CounterRng rng(30);
  for (const char* name : {"cp1", "cp1xcp1", "kahler_torus_2"}) {
    const auto s = make_manifold(name);
    const int n = 2 * s.dim();
    for (int k = 0; k < 20; ++k) {
      const Point p = s.sample(rng);
      const auto g = s.metric_jet(p);
      const CMat G = values(g);
      const auto u = random_scalar(s, rng)->eval2(p);
      const RMat hess = levi_civita(g, u).hessian.e;
      RealVec X(n), Y(n);
      for (int a = 0; a < n; ++a) X[a] = rng.uniform(-1, 1), Y[a] = rng.uniform(-1, 1);
      auto apply = [&](const RealVec& v) {
        RealVec w(n);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) w[a] += hess(a, b) * v[b];
        return w;
      };
      const double lhs = form_eval(ddc_scalar(u).coeffs, X, Y);
      const double rhs = metric_pairing(G, apply(X), Y.rotated()) - metric_pairing(G, apply(X.rotated()), Y);
      EXPECT_NEAR(lhs, rhs, 1e-10) << name;
    }
  }
}

TEST(LeviCivita, FlatCosine) {
  const double x = 1.1;
  const Point p = pt({x, 0.4});
  const auto lc = levi_civita(flat_torus(1).metric_jet(p), cos_x()->eval2(p));
  EXPECT_NEAR(lc.laplacian, std::cos(x), 1e-14);
  EXPECT_NEAR(lc.hessian.e(0, 0), -std::cos(x), 1e-14);
  EXPECT_NEAR(lc.hessian.e(1, 1), 0.0, 1e-14);
  EXPECT_NEAR(lc.hessian.e(0, 1), 0.0, 1e-14);
}

TEST(LeviCivita, ConstantHasNoLaplacian) {
  const auto s = hopf_surface();
  const Point p = pt({0.5, 0.6, -0.7, 0.2});
  const auto one = make_scalar_field([](const auto& x) { return detail::constant_like(x, 2.0); });
  const auto lc = levi_civita(s.metric_jet(p), one->eval2(p));
  EXPECT_NEAR(lc.laplacian, 0.0, 1e-15);
  EXPECT_NEAR(max_abs(lc.hessian.e), 0.0, 1e-15);
}

TEST(LeviCivita, SphereHeightIsFirstEigenfunction) {
  CounterRng rng(31);
  const auto s = fubini_study_cp1(1.0);
  const auto u = height_function();
  for (int n = 0; n < 20; ++n) {
    const Point p = s.sample(rng);
    const auto uj = u->eval2(p);
    EXPECT_NEAR(levi_civita(s.metric_jet(p), uj).laplacian, 2.0 * uj.value(), 1e-11);
  }
}

TEST(LeviCivita, HessianSymmetricAndTraceIsMinusLaplacian) {
  CounterRng rng(32);
  for (const auto& name : manifold_names()) {
    const auto s = make_manifold(name);
    for (int n = 0; n < 10; ++n) {
      const Point p = s.sample(rng);
      const auto u = random_scalar(s, rng)->eval2(p);
      const auto lc = levi_civita(s.metric_jet(p), u);
      EXPECT_NEAR(lc.hessian.e.trace(), -lc.laplacian, 1e-11 * std::max(1.0, std::abs(lc.laplacian))) << name;
      const RMat& f = lc.hessian_form;
      for (int a = 0; a < f.rows(); ++a)
        for (int b = 0; b < f.cols(); ++b) EXPECT_NEAR(f(a, b), f(b, a), 1e-12) << name;
    }
  }
}

TEST(LeviCivita, ScalarCurvatureMatchesChernOnKahler) {
  CounterRng rng(33);
  for (const char* name : {"cp1", "cp1xcp1", "kahler_torus_2"}) {
    const auto s = make_manifold(name);
    for (int n = 0; n < 10; ++n) {
      const auto g = s.metric_jet(s.sample(rng));
      EXPECT_NEAR(riemannian_scalar(g), chern_scalar(g), 1e-9 * std::max(1.0, std::abs(chern_scalar(g)))) << name;
    }
  }
}

TEST(Divergence, FlatExamples) {
  const auto s = flat_torus(1);
  const double x = 0.9;
  const Point p = pt({x, 2.0});
  const auto cid = named_perturbation(s, "cos_identity")->eval2(p);
  const auto d = divergences(s.metric_jet(p), cid);
  // -sin x dx has dz component -sin(x) / 2
  EXPECT_NEAR(std::abs(d.delta_g.c[0] - cplx(-0.5 * std::sin(x))), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(d.delta_nabla.c[0] - cplx(-0.5 * std::sin(x))), 0.0, 1e-12);
  const auto id = divergences(s.metric_jet(p), named_perturbation(s, "identity")->eval2(p));
  EXPECT_EQ(std::abs(id.delta_g.c[0]), 0.0);
  EXPECT_EQ(std::abs(id.delta_nabla.c[0]), 0.0);
}

TEST(Divergence, IdentityIsDivergenceFreeOnHopf) {
  const auto s = hopf_surface();
  const Point p = pt({0.3, 1.2, -0.4, 0.1});
  const auto d = divergences(s.metric_jet(p), named_perturbation(s, "identity")->eval2(p));
  for (int k = 0; k < 2; ++k) {
    EXPECT_LE(std::abs(d.delta_g.c[k]), 1e-12);
    EXPECT_LE(std::abs(d.delta_nabla.c[k]), 1e-12);
  }
}

TEST(Divergence, ConnectionsAgreeOnKahler) {
  CounterRng rng(34);
  for (const char* name : {"cp1xcp1", "kahler_torus_2", "conformal_torus_1"}) {
    const auto s = make_manifold(name);
    for (int n = 0; n < 10; ++n) {
      const Point p = s.sample(rng);
      const auto d = divergences(s.metric_jet(p), random_perturbation(s, rng)->eval2(p));
      for (int k = 0; k < s.dim(); ++k) EXPECT_LE(std::abs(d.delta_g.c[k] - d.delta_nabla.c[k]), 1e-11) << name;
    }
  }
}

TEST(CovariantDerivative, IdentityIsParallel) {
  CounterRng rng(35);
  for (const auto& name : manifold_names()) {
    const auto s = make_manifold(name);
    const Point p = s.sample(rng);
    const auto g = s.metric_jet(p);
    RealVec X(2 * s.dim());
    for (int a = 0; a < X.n; ++a) X[a] = rng.uniform(-1, 1);
    EXPECT_LE(max_abs(chern_cov_deriv(g, named_perturbation(s, "identity")->eval2(p), X)), 1e-12) << name;
  }
}

TEST(CovariantDerivative, TraceCommutesWithDerivative) {
  // tr^C(nabla_X h) = X(tr^C h)
  CounterRng rng(36);
  for (const auto& name : manifold_names()) {
    const auto s = make_manifold(name);
    for (int n = 0; n < 20; ++n) {
      const Point p = s.sample(rng);
      const auto g = s.metric_jet(p);
      const auto eta = random_perturbation(s, rng)->eval2(p);
      RealVec X(2 * s.dim());
      for (int a = 0; a < X.n; ++a) X[a] = rng.uniform(-1, 1);
      const cplx lhs = chern_cov_deriv(g, eta, X).trace();
      const auto f = trace_c_jet(g, eta);
      double rhs = 0;
      for (int a = 0; a < X.n; ++a) rhs += X[a] * f.d(a);
      EXPECT_NEAR(lhs.real(), rhs, 1e-11) << name;
      EXPECT_NEAR(lhs.imag(), 0.0, 1e-11) << name;
    }
  }
}

TEST(CovariantDerivative, FlatIsPlainDerivative) {
  const auto s = flat_torus(1);
  const Point p = pt({0.7, 0.2});
  RealVec X(2);
  X[0] = 1.0;
  const CMat d = chern_cov_deriv(s.metric_jet(p), named_perturbation(s, "cos_identity")->eval2(p), X);
  EXPECT_NEAR(std::abs(d(0, 0) + std::sin(0.7)), 0.0, 1e-14);
}
