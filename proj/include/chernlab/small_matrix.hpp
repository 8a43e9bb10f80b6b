#pragma once

// Dense matrices of at most 4x4 entries with stack storage, generic over the
// scalar type so the same code runs on doubles, complex numbers and jets.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>

#include "chernlab/taylor.hpp"

namespace chernlab {

inline constexpr int kMatCap = 4;

inline double conj_of(double x) { return x; }
inline cplx conj_of(cplx x) { return std::conj(x); }
template <class T, int N>
auto conj_of(const Taylor<T, N>& x) {
  return conj(x);
}

inline double recip_of(double x) { return 1.0 / x; }
inline cplx recip_of(cplx x) { return 1.0 / x; }
template <class T, int N>
Taylor<T, N> recip_of(const Taylor<T, N>& x) {
  return recip(x);
}

template <class S>
class SmallMat;

template <class T>
struct is_small_mat : std::false_type {};
template <class S>
struct is_small_mat<SmallMat<S>> : std::true_type {};

template <class S>
class SmallMat {
 public:
  using scalar_type = S;

  SmallMat() : rows_(0), cols_(0) {}
  SmallMat(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0 || rows > kMatCap || cols > kMatCap) throw std::invalid_argument("matrix size");
    a_.fill(S{});
  }

  static SmallMat identity(int n) {
    SmallMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = S(1.0);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  S& operator()(int i, int j) { return a_[i * kMatCap + j]; }
  const S& operator()(int i, int j) const { return a_[i * kMatCap + j]; }

  template <class F>
  auto map(F&& f) const {
    using R = std::decay_t<decltype(f(std::declval<const S&>()))>;
    SmallMat<R> r(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(i, j) = f((*this)(i, j));
    return r;
  }

  SmallMat transpose() const {
    SmallMat r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  auto adjoint() const {
    auto r = transpose();
    for (int i = 0; i < r.rows(); ++i)
      for (int j = 0; j < r.cols(); ++j) r(i, j) = conj_of(r(i, j));
    return r;
  }

  S trace() const {
    S t{};
    for (int i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  SmallMat& operator+=(const SmallMat& o) {
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) (*this)(i, j) += o(i, j);
    return *this;
  }
  SmallMat& operator-=(const SmallMat& o) {
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) (*this)(i, j) -= o(i, j);
    return *this;
  }
  SmallMat operator-() const {
    SmallMat r = *this;
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(i, j) = -r(i, j);
    return r;
  }

 private:
  int rows_, cols_;
  std::array<S, kMatCap * kMatCap> a_;
};

using CMat = SmallMat<cplx>;
using RMat = SmallMat<double>;
template <int N>
using CJetMat = SmallMat<CJet<N>>;
template <int N>
using RJetMat = SmallMat<RJet<N>>;

template <class A, class B>
auto operator+(const SmallMat<A>& a, const SmallMat<B>& b) {
  using R = std::decay_t<decltype(a(0, 0) + b(0, 0))>;
  SmallMat<R> r(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) + b(i, j);
  return r;
}
template <class A, class B>
auto operator-(const SmallMat<A>& a, const SmallMat<B>& b) {
  using R = std::decay_t<decltype(a(0, 0) - b(0, 0))>;
  SmallMat<R> r(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) - b(i, j);
  return r;
}
template <class A, class B>
auto operator*(const SmallMat<A>& a, const SmallMat<B>& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product shape");
  using R = std::decay_t<decltype(a(0, 0) * b(0, 0))>;
  SmallMat<R> r(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) {
      R s{};
      for (int k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      r(i, j) = s;
    }
  return r;
}
template <class A, class S>
  requires(!is_small_mat<S>::value)
auto operator*(const SmallMat<A>& a, const S& s) {
  return a.map([&](const A& x) { return x * s; });
}
template <class A, class S>
  requires(!is_small_mat<S>::value)
auto operator*(const S& s, const SmallMat<A>& a) {
  return a.map([&](const A& x) { return x * s; });
}

template <class A, class B>
auto commutator(const SmallMat<A>& a, const SmallMat<B>& b) {
  return a * b - b * a;
}

// Gauss-Jordan inverse with pivoting on the magnitude of the constant term.
template <class S>
SmallMat<S> inverse(const SmallMat<S>& m) {
  const int n = m.rows();
  if (n != m.cols()) throw std::invalid_argument("inverse of non-square matrix");
  SmallMat<S> a = m;
  SmallMat<S> inv = SmallMat<S>::identity(n);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(value_of(a(col, col)));
    for (int r = col + 1; r < n; ++r) {
      const double v = std::abs(value_of(a(r, col)));
      if (v > best) best = v, piv = r;
    }
    if (!(best > 0.0) || !std::isfinite(best)) throw std::domain_error("singular matrix");
    if (piv != col) {
      for (int j = 0; j < n; ++j) {
        std::swap(a(col, j), a(piv, j));
        std::swap(inv(col, j), inv(piv, j));
      }
    }
    const S p = recip_of(a(col, col));
    for (int j = 0; j < n; ++j) {
      a(col, j) = a(col, j) * p;
      inv(col, j) = inv(col, j) * p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const S f = a(r, col);
      for (int j = 0; j < n; ++j) {
        a(r, j) = a(r, j) - f * a(col, j);
        inv(r, j) = inv(r, j) - f * inv(col, j);
      }
    }
  }
  return inv;
}

// Determinant by elimination; the result has the same scalar type.
template <class S>
S determinant(const SmallMat<S>& m) {
  const int n = m.rows();
  SmallMat<S> a = m;
  S det(1.0);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(value_of(a(col, col)));
    for (int r = col + 1; r < n; ++r) {
      const double v = std::abs(value_of(a(r, col)));
      if (v > best) best = v, piv = r;
    }
    if (!(best > 0.0)) return S{};
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
      det = -det;
    }
    det = det * a(col, col);
    const S p = recip_of(a(col, col));
    for (int r = col + 1; r < n; ++r) {
      const S f = a(r, col) * p;
      for (int j = col; j < n; ++j) a(r, j) = a(r, j) - f * a(col, j);
    }
  }
  return det;
}

// Constant terms of a jet-valued matrix.
template <class T, int N>
SmallMat<T> values(const SmallMat<Taylor<T, N>>& m) {
  return m.map([](const Taylor<T, N>& x) { return x.value(); });
}

template <class T, int N>
auto partial(const SmallMat<Taylor<T, N>>& m, int a) {
  return m.map([a](const Taylor<T, N>& x) { return partial(x, a); });
}
template <class T, int N>
auto dz(const SmallMat<Taylor<T, N>>& m, int k) {
  return m.map([k](const Taylor<T, N>& x) { return dz(x, k); });
}
template <class T, int N>
auto dzb(const SmallMat<Taylor<T, N>>& m, int k) {
  return m.map([k](const Taylor<T, N>& x) { return dzb(x, k); });
}
template <int M, class T, int N>
SmallMat<Taylor<T, M>> truncate(const SmallMat<Taylor<T, N>>& m) {
  return m.map([](const Taylor<T, N>& x) { return x.template truncate<M>(); });
}

inline double max_abs(const CMat& m) {
  double r = 0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r = std::max(r, std::abs(m(i, j)));
  return r;
}
inline double max_abs(const RMat& m) {
  double r = 0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r = std::max(r, std::abs(m(i, j)));
  return r;
}

// Cholesky-based test for a Hermitian positive definite matrix.
inline bool is_positive_definite(const CMat& m) {
  const int n = m.rows();
  CMat l(n, n);
  for (int j = 0; j < n; ++j) {
    double d = m(j, j).real();
    for (int k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > 0.0)) return false;
    l(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      cplx s = m(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / l(j, j);
    }
  }
  return true;
}

}  // namespace chernlab
