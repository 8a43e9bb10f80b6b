// First and second variations, gamma and its adjoint, finite-difference
// oracle plumbing and the obstruction integral.

#include <gtest/gtest.h>

#include <numbers>

#include "test_util.hpp"

using namespace chernlab;
using namespace testutil;

namespace {

constexpr double pi = std::numbers::pi;

VariationInput input(const ManifoldSpec& s, const std::string& preset, const Point& p) {
  return make_input(s, *named_perturbation(s, preset), p);
}

ScalarFieldPtr cos_x() {
  return make_scalar_field([](const auto& x) { return cos(x[0]); });
}

}  // namespace

// ---------------------------------------------------------------------------
// gamma and gamma^*

TEST(Gamma, FlatCosine) {
  const auto s = flat_torus(1);
  for (double x : {0.0, 0.6, 2.5}) EXPECT_NEAR(gamma(input(s, "cos_identity", pt({x, 1.0}))), std::cos(x), 1e-13);
}

TEST(Gamma, HopfIdentityIsMinusScal) {
  const auto s = hopf_surface();
  CounterRng rng(40);
  for (int n = 0; n < 10; ++n) EXPECT_NEAR(gamma(input(s, "identity", s.sample(rng))), -4.0, 1e-11);
}

TEST(Gamma, TracelessIsInKernelOnProduct) {
  const auto s = fs_product();
  CounterRng rng(41);
  for (int n = 0; n < 10; ++n) {
    const Point p = s.sample(rng);
    EXPECT_NEAR(gamma(input(s, "traceless", p)), 0.0, 1e-12);
    EXPECT_NEAR(gamma(input(s, "witness", p)), 0.0, 1e-11);
  }
}

TEST(Gamma, ZeroDirection) {
  const auto s = hopf_surface();
  EXPECT_EQ(gamma(input(s, "zero", pt({1, 0.5, 0, 0.2}))), 0.0);
}

TEST(Gamma, BothPrintedFormsAgree) {
  CounterRng rng(42);
  for (const auto& name : manifold_names()) {
    const auto s = make_manifold(name);
    for (int n = 0; n < 10; ++n) {
      const Point p = s.sample(rng);
      const auto v = gamma_both(make_input(s, *random_perturbation(s, rng), p));
      EXPECT_LE(std::abs(v.value - v.real_form), 1e-12 * std::max(1.0, std::abs(v.value))) << name;
    }
  }
}

TEST(Gamma, Linearity) {
  CounterRng rng(43);
  for (const auto& name : manifold_names()) {
    const auto s = make_manifold(name);
    for (int n = 0; n < 5; ++n) {
      const Point p = s.sample(rng);
      const MetricGeometry geo(s.metric_jet(p));
      const auto h1 = random_perturbation(s, rng)->eval2(p), h2 = random_perturbation(s, rng)->eval2(p);
      const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
      const double lhs = gamma(geo, h1 * cplx(a) + h2 * cplx(b));
      const double rhs = a * gamma(geo, h1) + b * gamma(geo, h2);
      EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::max(1.0, std::abs(rhs))) << name;
    }
  }
}

TEST(Gamma, KahlerEinsteinReduction) {
  // gamma(h) = 1/2 (Delta tr^R h - (lambda / m) tr^R h) on CP^1 x CP^1
  const auto s = fs_product();
  CounterRng rng(44);
  for (int n = 0; n < 10; ++n) {
    const Point p = s.sample(rng);
    const auto in = make_input(s, *random_perturbation(s, rng), p);
    const auto tr = detail::trace_r(in.g, in.h1);
    const double ref = 0.5 * (levi_civita(in.g, tr).laplacian - 2.0 * tr.value());
    EXPECT_NEAR(gamma(in), ref, 1e-10 * std::max(1.0, std::abs(ref)));
  }
}

TEST(GammaStar, FlatTorusIsHalfLaplacian) {
  const auto s = flat_torus(2);
  const Point p = pt({0.4, 1.0, 2.0, 3.0});
  const auto g = s.metric_jet(p);
  const auto gs = gamma_star(g, cos_x()->eval2(p));
  const CMat H = gs.endo();
  EXPECT_NEAR(std::abs(H(0, 0) - 0.5 * std::cos(0.4)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(H(1, 1) - 0.5 * std::cos(0.4)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(H(0, 1)), 0.0, 1e-14);
}

TEST(GammaStar, KahlerEinsteinForm) {
  const auto s = fs_product();
  CounterRng rng(45);
  for (int n = 0; n < 10; ++n) {
    const Point p = s.sample(rng);
    const auto u = random_scalar(s, rng)->eval2(p);
    const auto g = s.metric_jet(p);
    const double c = 0.5 * (levi_civita(g, u).laplacian - 2.0 * u.value());
    EXPECT_LE(max_abs(gamma_star(g, u).endo() - CMat::identity(2) * cplx(c)), 1e-11);
  }
}

TEST(GammaStar, HeightHarmonicIsInKernel) {
  const auto s = fs_product();
  const auto u = height_function();
  CounterRng rng(46);
  for (int n = 0; n < 20; ++n) {
    const Point p = s.sample(rng);
    const auto gs = gamma_star(s.metric_jet(p), u->eval2(p));
    EXPECT_LE(std::sqrt(std::max(0.0, inner(gs.metric, gs, gs))), 1e-9);
  }
}

TEST(GammaStar, GeometryCacheMatchesDirectPath) {
  CounterRng rng(47);
  for (const auto& name : manifold_names()) {
    const auto s = make_manifold(name);
    const Point p = s.sample(rng);
    const auto g = s.metric_jet(p);
    const auto u = random_scalar(s, rng)->eval2(p);
    VariationInput in;
    in.g = g;
    in.u = u;
    EXPECT_LE(max_abs(gamma_star(MetricGeometry(g), u).eta - gamma_star(in).eta), 1e-14) << name;
  }
}

// ---------------------------------------------------------------------------
// Intermediate variations: trivial cases

TEST(Variations, IdentityAndConstantDirections) {
  const auto s = hopf_surface();
  const Point p = pt({0.8, -0.2, 0.5, 0.9});
  const auto in = input(s, "identity", p);
  RealVec X(4), Y(4);
  X[0] = 0.3, X[3] = -1.0, Y[1] = 0.7, Y[2] = 0.2;
  for (int a = 0; a < 4; ++a) EXPECT_LE(std::abs(var_connection(in, X, Y)[a]), 1e-13);
  // tr^C Id constant: S~' = 0 and theta' = 0
  EXPECT_LE(max_abs(var_ricci_form(in).coeffs), 1e-13);
  for (int k = 0; k < 2; ++k) EXPECT_LE(std::abs(var_lee(in).c[k]), 1e-13);
  // h = Id: S' = -S
  const auto ric = chern_ricci(in.g);
  const RealVec SX = apply_endo(ric.s.endo(), X);
  EXPECT_NEAR(var_ricci_endo(in, X, Y), -metric_pairing(values(in.g), SX, Y), 1e-12);
  // (Tr^C)'(a) = -Tr^C(a) for h = Id
  CounterRng rng(48);
  const Form11Value a{random_hermitian(rng, 2)};
  EXPECT_NEAR(var_trace(in, a), -trace_form(values(in.g), a), 1e-13);
}

TEST(Variations, OmegaDirectionGivesMinusTrace) {
  const auto s = make_manifold("conformal_torus_2");
  CounterRng rng(49);
  const Point p = s.sample(rng);
  const auto in = make_input(s, *random_perturbation(s, rng), p);
  const CMat G = values(in.g);
  EXPECT_NEAR(var_trace(in, Form11Value{G}), -traces(Sym11Value{values(in.h1), G}).complex_trace, 1e-13);
}

TEST(Variations, TracelessRicciFormVariationVanishes) {
  const auto s = fs_product();
  const auto in = input(s, "traceless", pt({0.3, 0.2, -1.0, 0.4}));
  EXPECT_LE(max_abs(var_ricci_form(in).coeffs), 1e-13);
}

TEST(Variations, FlatConstantDirectionHasNoCurvatureVariation) {
  const auto s = flat_torus(2);
  const auto in = input(s, "traceless", pt({0.3, 0.2, 1.0, 0.4}));
  RealVec X(4), Y(4);
  X[0] = 1, Y[3] = 1;
  EXPECT_EQ(max_abs(var_curvature(in, X, Y)), 0.0);
}

TEST(Variations, SphereIdentityCurvatureVariationVanishes) {
  const auto s = fubini_study_cp1(1.0);
  const auto in = input(s, "identity", pt({0.3, -0.6}));
  RealVec X(2), Y(2);
  X[0] = 1, Y[1] = 1;
  EXPECT_LE(max_abs(var_curvature(in, X, Y)), 1e-12);
}

TEST(Variations, TracelessRicciEndoOnProduct) {
  // S = Id on CP^1 x CP^1: g(S' X, Y) = -g(h X, Y)
  const auto s = fs_product();
  const auto in = input(s, "traceless", pt({0.3, 0.2, -1.0, 0.4}));
  RealVec X(4), Y(4);
  X[0] = 0.5, X[2] = 1.0, Y[0] = -0.2, Y[3] = 0.8;
  const CMat H = Sym11Value{values(in.h1), values(in.g)}.endo();
  EXPECT_NEAR(var_ricci_endo(in, X, Y), -metric_pairing(values(in.g), apply_endo(H, X), Y), 1e-12);
}

TEST(Variations, LaplacianFlatCosine) {
  // h = Id, u = cos x: Delta' u = -Delta u = -cos x
  const auto s = flat_torus(1);
  const Point p = pt({0.9, 0.3});
  auto in = input(s, "identity", p);
  in.u = cos_x()->eval2(p);
  EXPECT_NEAR(var_laplacian(in), -std::cos(0.9), 1e-14);
  in.u = make_scalar_field([](const auto& x) { return detail::constant_like(x, 1.0); })->eval2(p);
  EXPECT_EQ(var_laplacian(in), 0.0);
  VariationInput no_u = input(s, "identity", p);
  EXPECT_THROW(var_laplacian(no_u), std::invalid_argument);
}

TEST(Variations, PairingFlatExamples) {
  const auto s = flat_torus(1);
  const double x = 0.7;
  const OneFormValue dx{1, {cplx(0.5)}};
  EXPECT_NEAR(var_pairing(input(s, "cos_identity", pt({x, 0.0})), dx, dx), -std::cos(x), 1e-15);
  EXPECT_EQ(var_pairing(input(s, "zero", pt({x, 0.0})), dx, dx), 0.0);
  EXPECT_EQ(var_endo_pairing(input(s, "cos_identity", pt({x, 0.0})), Sym11Value{}, Sym11Value{}), 0.0);
}

// ---------------------------------------------------------------------------
// Second variation

TEST(SecondVariation, FlatCosineClosedForm) {
  const auto s = flat_torus(1);
  for (double x : {0.2, 1.3, 3.0}) {
    const auto v = second_var_both(input(s, "cos_identity", pt({x, 0.5})), true);
    EXPECT_NEAR(v.general, -2 * std::cos(x) * std::cos(x), 1e-13);
    ASSERT_TRUE(v.kahler.has_value());
    EXPECT_NEAR(*v.kahler, v.general, 1e-13);
  }
}

TEST(SecondVariation, TracelessOnProductIsNormSquared) {
  const auto s = fs_product();
  CounterRng rng(50);
  for (int n = 0; n < 10; ++n) {
    const Point p = s.sample(rng);
    const auto in = input(s, "witness", p);
    const Sym11Value h{values(in.h1), values(in.g)};
    EXPECT_NEAR(second_var(in, true), inner(h.metric, h, h), 1e-10 * inner(h.metric, h, h));
  }
}

TEST(SecondVariation, ZeroDirection) {
  for (const auto& name : manifold_names()) {
    const auto s = make_manifold(name);
    CounterRng rng(51);
    EXPECT_EQ(second_var(input(s, "zero", s.sample(rng)), s.is_kahler), 0.0) << name;
  }
}

TEST(SecondVariation, KahlerFormAgrees) {
  CounterRng rng(52);
  for (const auto& name : manifold_names()) {
    const auto s = make_manifold(name);
    if (!s.is_kahler) continue;
    for (int n = 0; n < 10; ++n) {
      const Point p = s.sample(rng);
      const auto v = second_var_both(make_input(s, *random_perturbation(s, rng), p), true);
      EXPECT_LE(std::abs(v.general - *v.kahler), 1e-10 * std::max(1.0, std::abs(v.general))) << name;
    }
  }
}

// ---------------------------------------------------------------------------
// Finite-difference oracle

TEST(FiniteDifference, RichardsonIsExactForQuadraticError) {
  // D(dt) = 3 + 5 dt^2 extrapolates to 3
  const std::vector<double> dts{0.1, 0.05};
  const auto r = richardson({{3 + 5 * 0.01}, {3 + 5 * 0.0025}}, dts);
  EXPECT_NEAR(r[0], 3.0, 1e-14);
}

TEST(FiniteDifference, SpecExamples) {
  const auto s = flat_torus(1);
  const double x = 0.8;
  const auto in = input(s, "cos_identity", pt({x, 0.1}));
  auto scal = [](const MetricJet& g) { return std::vector<double>{chern_scalar(g)}; };
  const std::vector<double> dts{1e-2, 1e-3};
  EXPECT_NEAR(fd_derivative(scal, in.g, in.h1, 1, dts).value[0], std::cos(x), 1e-8);
  EXPECT_NEAR(fd_derivative(scal, in.g, in.h1, 2, dts).value[0], -2 * std::cos(x) * std::cos(x), 1e-5);
  const auto zero = input(s, "zero", pt({x, 0.1}));
  EXPECT_EQ(fd_derivative(scal, zero.g, zero.h1, 1, dts).value[0], 0.0);
  EXPECT_EQ(fd_derivative(scal, zero.g, zero.h1, 2, dts).value[0], 0.0);
}

TEST(FiniteDifference, GammaMatchesOnEveryManifold) {
  CounterRng rng(53);
  auto scal = [](const MetricJet& g) { return std::vector<double>{chern_scalar(g)}; };
  for (const auto& name : manifold_names()) {
    const auto s = make_manifold(name);
    for (int n = 0; n < 5; ++n) {
      const Point p = s.sample(rng);
      const auto in = make_input(s, *random_perturbation(s, rng), p);
      const auto fd = fd_derivative(scal, in.g, in.h1, 1, {1e-2, 1e-3});
      EXPECT_LE(rel_error({gamma(in)}, fd.value), 1e-6) << name;
    }
  }
}

TEST(FiniteDifference, RejectsBadSchedules) {
  const auto s = flat_torus(1);
  const auto in = input(s, "identity", pt({0, 0}));
  auto f = [](const MetricJet& g) { return std::vector<double>{chern_scalar(g)}; };
  EXPECT_THROW(fd_derivative(f, in.g, in.h1, 1, {}), std::invalid_argument);
  EXPECT_THROW(fd_derivative(f, in.g, in.h1, 1, {1e-3, 1e-2}), std::invalid_argument);
  EXPECT_THROW(fd_derivative(f, in.g, in.h1, 1, {0.0}), std::invalid_argument);
  EXPECT_THROW(fd_derivative(f, in.g, in.h1, 3, {1e-2}), std::invalid_argument);
  // g - 2 eta = -1/2 at dt = 2 along h = Id
  EXPECT_THROW(fd_derivative(f, in.g, in.h1, 1, {2.0}), std::domain_error);
}

TEST(FiniteDifference, SecondOrderPathIsTheMatrixExponential) {
  // h = Id: G exp(t Id) = e^t G, to second order 1 + t + t^2 / 2
  const auto s = flat_torus(1);
  const auto in = input(s, "identity", pt({0, 0}));
  const double t = 0.1;
  EXPECT_NEAR(values(metric_path(in.g, in.h1, t, 2))(0, 0).real(), 0.5 * (1 + t + t * t / 2), 1e-15);
  EXPECT_NEAR(values(metric_path(in.g, in.h1, t, 1))(0, 0).real(), 0.5 * (1 + t), 1e-15);
}

// ---------------------------------------------------------------------------
// Obstruction integral

TEST(Obstruction, FlatTorusStability) {
  const auto s = flat_torus(2);
  const auto one = make_scalar_field([](const auto& x) { return detail::constant_like(x, 1.0); });
  const auto r = obstruction(s, s.rule(8), *one, *named_perturbation(s, "traceless"), "1", "traceless");
  EXPECT_LE(std::abs(r.value), 1e-10);
  EXPECT_LE(r.gamma_residual, 1e-12);
}

TEST(Obstruction, WitnessValue) {
  const auto w = instability_witness(16);
  EXPECT_NEAR(w.obstruction.value / kWitnessValue, 1.0, 1e-6);
  EXPECT_NEAR(kWitnessValue, 128 * pi * pi / 3, 1e-12);
  EXPECT_EQ(w.lambda, 4.0);
  EXPECT_LE(w.fce_residual, 1e-9);
  EXPECT_LE(w.eigen_residual, 1e-8);
  EXPECT_LE(w.obstruction.gamma_residual, 1e-8);
  EXPECT_LE(w.obstruction.gamma_star_residual, 1e-8);
  EXPECT_TRUE(w.obstruction.quotable());
}

TEST(Obstruction, ConstantTracelessControlIntegratesToZero) {
  const auto s = fs_product();
  const auto r = obstruction(s, s.rule(16), *height_function(), *named_perturbation(s, "traceless"), "height",
                             "traceless", 1e-8, false);
  EXPECT_LE(std::abs(r.value), 1e-8);
}

TEST(Obstruction, RefusesNonKernelInputs) {
  EXPECT_THROW(instability_witness(8, 0.1), KernelError);
  const auto s = fs_product();
  // identity is not in ker gamma (gamma(Id) = -4)
  EXPECT_THROW(obstruction(s, s.rule(8), *height_function(), *named_perturbation(s, "identity"), "height", "Id"),
               KernelError);
}

TEST(Obstruction, RuleMustMatchManifold) {
  const auto s = fs_product();
  EXPECT_THROW(obstruction(s, flat_torus(2).rule(4), *height_function(), *named_perturbation(s, "traceless"), "", ""),
               std::invalid_argument);
}
