#pragma once

// Closed-form fields evaluated as jets at chart points.
//
// A field is a generic callable taking the seeded coordinate jets
// (x^1, y^1, ..., x^m, y^m) and returning a jet-valued scalar or matrix. The
// same callable is instantiated at every supported jet order, so spatial
// derivatives are exact to roundoff and never come from finite differences.

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chernlab/geometry.hpp"
#include "chernlab/small_matrix.hpp"
#include "chernlab/taylor.hpp"

namespace chernlab {

template <int N>
using Coords = std::array<RJet<N>, kMaxVars>;

// Pointwise 2-jets used throughout: metric matrix G, lowered perturbation
// eta = G H, scalar functions.
using MetricJet = CJetMat<2>;
using PerturbationJet = CJetMat<2>;
using ScalarJet = RJet<2>;

template <int N>
Coords<N> seed_coordinates(const Point& p) {
  Coords<N> v{};
  for (int a = 0; a < p.n; ++a) v[a] = RJet<N>::variable(p.n, a, p[a]);
  return v;
}

class MatrixField {
 public:
  explicit MatrixField(int m) : m_(m) {}
  virtual ~MatrixField() = default;

  int dim() const { return m_; }
  virtual CJetMat<2> eval2(const Point& p) const = 0;
  virtual CJetMat<3> eval3(const Point& p) const = 0;

  template <int N>
  CJetMat<N> eval(const Point& p) const {
    static_assert(N == 2 || N == 3, "fields provide jets of order 2 and 3");
    if constexpr (N == 2)
      return eval2(p);
    else
      return eval3(p);
  }

 private:
  int m_;
};

class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual RJet<2> eval2(const Point& p) const = 0;
  virtual RJet<3> eval3(const Point& p) const = 0;

  template <int N>
  RJet<N> eval(const Point& p) const {
    static_assert(N == 2 || N == 3, "fields provide jets of order 2 and 3");
    if constexpr (N == 2)
      return eval2(p);
    else
      return eval3(p);
  }
};

namespace detail {

template <class F>
class LambdaMatrixField final : public MatrixField {
 public:
  LambdaMatrixField(int m, F f) : MatrixField(m), f_(std::move(f)) {}
  CJetMat<2> eval2(const Point& p) const override { return f_(seed_coordinates<2>(p)); }
  CJetMat<3> eval3(const Point& p) const override { return f_(seed_coordinates<3>(p)); }

 private:
  F f_;
};

template <class F>
class LambdaScalarField final : public ScalarField {
 public:
  explicit LambdaScalarField(F f) : f_(std::move(f)) {}
  RJet<2> eval2(const Point& p) const override { return f_(seed_coordinates<2>(p)); }
  RJet<3> eval3(const Point& p) const override { return f_(seed_coordinates<3>(p)); }

 private:
  F f_;
};

}  // namespace detail

using MatrixFieldPtr = std::shared_ptr<const MatrixField>;
using ScalarFieldPtr = std::shared_ptr<const ScalarField>;

// `f` must be callable as f(const Coords<N>&) -> CJetMat<N> for N = 2, 3.
template <class F>
MatrixFieldPtr make_matrix_field(int m, F f) {
  return std::make_shared<detail::LambdaMatrixField<F>>(m, std::move(f));
}

// `f` must be callable as f(const Coords<N>&) -> RJet<N> for N = 2, 3.
template <class F>
ScalarFieldPtr make_scalar_field(F f) {
  return std::make_shared<detail::LambdaScalarField<F>>(std::move(f));
}

// A perturbation h in Sym^{1,1}, carried by its lowered form eta.
struct PerturbationSpec {
  std::string name;
  MatrixFieldPtr eta;
};

// Re-evaluates a matrix field on already-seeded coordinates. Used when one
// closed-form field is built from another.
template <int N>
CJetMat<N> metric_jet_from(const MatrixFieldPtr& f, const Coords<N>& x) {
  Point p(x[0].nvars());
  for (int a = 0; a < p.n; ++a) p[a] = x[a].value();
  return f->template eval<N>(p);
}

// Builds eta = G H from an endomorphism field H that is g-symmetric and
// J-commuting, so presets can be written as endomorphisms.
template <class F>
MatrixFieldPtr endo_perturbation(MatrixFieldPtr metric, F endo) {
  const int m = metric->dim();
  auto lowered = [metric, endo](const auto& x) {
    const auto G = metric_jet_from(metric, x);
    auto eta = G * endo(x);
    // Hermitian projection removes roundoff asymmetry.
    return (eta + eta.adjoint()) * 0.5;
  };
  return make_matrix_field(m, lowered);
}

// Jet of a matrix field with derivatives above `order` zeroed.
inline MetricJet jet_eval(const MatrixField& f, const Point& p, int order) {
  if (order < 0 || order > 2) throw std::invalid_argument("jet order must be 0, 1 or 2");
  MetricJet j = f.eval2(p);
  if (order < 2) {
    const int keep = detail::monomials(p.n).size_upto[order];
    for (int r = 0; r < j.rows(); ++r)
      for (int c = 0; c < j.cols(); ++c)
        for (int i = keep; i < j(r, c).size(); ++i) j(r, c)[i] = 0.0;
  }
  return j;
}

inline ScalarJet jet_eval(const ScalarField& f, const Point& p, int order) {
  if (order < 0 || order > 2) throw std::invalid_argument("jet order must be 0, 1 or 2");
  ScalarJet j = f.eval2(p);
  const int keep = detail::monomials(p.n).size_upto[order];
  for (int i = keep; i < j.size(); ++i) j[i] = 0.0;
  return j;
}

// ---------------------------------------------------------------------------
// Deterministic counter-based random numbers (SplitMix64 finaliser applied to
// seed and counter), reproducible per seed on every platform.

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  std::uint64_t next() { return mix(seed_ ^ mix(stream_ * 0xD1B54A32D192ED03ULL + counter_++)); }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }
  CounterRng split(std::uint64_t sub) const { return CounterRng(seed_, mix(stream_ + 0x9E3779B97F4A7C15ULL * (sub + 1))); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

// A band-limited trigonometric polynomial sum_k a_k cos(p_k . x) + b_k sin(p_k . x)
// with integer frequencies |p_k| <= max_harmonic per coordinate.
struct FourierSum {
  struct Mode {
    std::array<int, kMaxVars> freq{};
    double a = 0, b = 0;
  };
  std::vector<Mode> modes;
  double constant = 0;

  static FourierSum random(CounterRng& rng, int nvars, int n_modes, int max_harmonic, double amplitude) {
    FourierSum f;
    for (int i = 0; i < n_modes; ++i) {
      Mode md;
      for (int a = 0; a < nvars; ++a) md.freq[a] = rng.integer(-max_harmonic, max_harmonic);
      md.a = rng.uniform(-amplitude, amplitude);
      md.b = rng.uniform(-amplitude, amplitude);
      f.modes.push_back(md);
    }
    return f;
  }

  template <int N>
  RJet<N> operator()(const Coords<N>& x) const {
    RJet<N> s(constant);
    const int n = x[0].nvars();
    for (const auto& md : modes) {
      RJet<N> phase(0.0);
      for (int a = 0; a < n; ++a)
        if (md.freq[a] != 0) phase += x[a] * static_cast<double>(md.freq[a]);
      s += cos(phase) * md.a + sin(phase) * md.b;
    }
    return s;
  }
};

}  // namespace chernlab
