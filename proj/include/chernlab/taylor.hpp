#pragma once

// Truncated multivariate Taylor polynomials ("jets") for forward-mode
// differentiation of closed-form fields.
//
// A Taylor<T, N> holds the coefficients c_alpha = (d^alpha f)(x0) / alpha! of
// every monomial of total degree <= N in nv real variables. Coefficients are
// stored in graded-lexicographic order, so the index of a monomial does not
// depend on N and truncation to a lower order is a prefix copy.

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace chernlab {

using cplx = std::complex<double>;

inline constexpr int kMaxVars = 4;
inline constexpr int kMaxOrder = 4;

constexpr int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

namespace detail {

struct MonomialTable {
  struct ProductTerm {
    std::uint16_t a, b, out;
  };
  struct DerivTerm {
    std::uint16_t src, dst;
    double factor;
  };

  int nv = 0;
  std::vector<std::array<std::int8_t, kMaxVars>> exps;
  // size_upto[d]: number of monomials of degree <= d.
  std::array<int, kMaxOrder + 1> size_upto{};
  std::vector<ProductTerm> product;  // sorted by degree of `out`
  std::array<int, kMaxOrder + 1> product_upto{};
  std::array<std::vector<DerivTerm>, kMaxVars> deriv;  // sorted by degree of `src`
  std::array<std::array<int, kMaxOrder + 1>, kMaxVars> deriv_upto{};
  std::array<int, 625> index_of{};  // base-5 exponent key -> index

  static int key(const std::array<std::int8_t, kMaxVars>& e) {
    int k = 0;
    for (int i = kMaxVars - 1; i >= 0; --i) k = k * (kMaxOrder + 1) + e[i];
    return k;
  }

  int index(const std::array<std::int8_t, kMaxVars>& e) const { return index_of[key(e)]; }

  explicit MonomialTable(int nvars) : nv(nvars) {
    index_of.fill(-1);
    auto degree = [](const std::array<std::int8_t, kMaxVars>& e) {
      int d = 0;
      for (auto v : e) d += v;
      return d;
    };
    // Graded lexicographic enumeration.
    for (int d = 0; d <= kMaxOrder; ++d) {
      std::array<std::int8_t, kMaxVars> e{};
      emit(e, 0, d);
      size_upto[d] = static_cast<int>(exps.size());
    }
    for (std::size_t i = 0; i < exps.size(); ++i) index_of[key(exps[i])] = static_cast<int>(i);

    for (std::size_t a = 0; a < exps.size(); ++a) {
      for (std::size_t b = 0; b < exps.size(); ++b) {
        if (degree(exps[a]) + degree(exps[b]) > kMaxOrder) continue;
        std::array<std::int8_t, kMaxVars> s{};
        for (int v = 0; v < kMaxVars; ++v) s[v] = static_cast<std::int8_t>(exps[a][v] + exps[b][v]);
        product.push_back({static_cast<std::uint16_t>(a), static_cast<std::uint16_t>(b),
                           static_cast<std::uint16_t>(index(s))});
      }
    }
    std::stable_sort(product.begin(), product.end(),
                     [](const ProductTerm& x, const ProductTerm& y) { return x.out < y.out; });
    for (int d = 0; d <= kMaxOrder; ++d) {
      product_upto[d] = static_cast<int>(
          std::count_if(product.begin(), product.end(),
                        [&](const ProductTerm& t) { return t.out < size_upto[d]; }));
    }

    for (int v = 0; v < nv; ++v) {
      for (std::size_t k = 0; k < exps.size(); ++k) {
        if (exps[k][v] == 0) continue;
        auto e = exps[k];
        const double factor = e[v];
        --e[v];
        deriv[v].push_back({static_cast<std::uint16_t>(k), static_cast<std::uint16_t>(index(e)), factor});
      }
      for (int d = 0; d <= kMaxOrder; ++d) {
        deriv_upto[v][d] = static_cast<int>(
            std::count_if(deriv[v].begin(), deriv[v].end(),
                          [&](const DerivTerm& t) { return t.src < size_upto[d]; }));
      }
    }
  }

 private:
  void emit(std::array<std::int8_t, kMaxVars>& e, int var, int remaining) {
    if (var == nv - 1 || nv == 0) {
      if (nv == 0) {
        if (remaining == 0) exps.push_back(e);
        return;
      }
      e[var] = static_cast<std::int8_t>(remaining);
      exps.push_back(e);
      e[var] = 0;
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      e[var] = static_cast<std::int8_t>(k);
      emit(e, var + 1, remaining - k);
    }
    e[var] = 0;
  }
};

inline const MonomialTable& monomials(int nv) {
  static const std::array<MonomialTable, kMaxVars + 1> tables = {
      MonomialTable(0), MonomialTable(1), MonomialTable(2), MonomialTable(3), MonomialTable(4)};
  return tables[nv];
}

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};

// Complex product without the C99 Annex G inf/nan recovery (__muldc3), which
// dominates jet arithmetic otherwise. Jet coefficients are always finite.
template <class T>
inline T mul_plain(const T& a, const T& b) {
  if constexpr (is_complex<T>::value)
    return T(a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real());
  else
    return a * b;
}

}  // namespace detail

template <class T, int N>
class Taylor {
  static_assert(N >= 0 && N <= kMaxOrder, "unsupported jet order");

 public:
  using value_type = T;
  static constexpr int order = N;
  static constexpr int capacity = binomial(kMaxVars + N, N);

  Taylor() { c_.fill(T{}); }
  // Constants carry nv = 0 and mix with jets in any number of variables.
  Taylor(T constant) {  // NOLINT(google-explicit-constructor)
    c_.fill(T{});
    c_[0] = constant;
  }
  template <class U = T, class = std::enable_if_t<detail::is_complex<U>::value>>
  Taylor(double constant) : Taylor(T(constant)) {}  // NOLINT(google-explicit-constructor)

  static Taylor variable(int nv, int var, double at) {
    if (nv < 1 || nv > kMaxVars || var < 0 || var >= nv) throw std::invalid_argument("bad jet variable");
    Taylor t;
    t.nv_ = nv;
    t.c_[0] = T(at);
    if constexpr (N >= 1) t.c_[1 + var] = T(1);
    return t;
  }

  int nvars() const { return nv_; }
  int size() const { return detail::monomials(nv_).size_upto[N]; }
  const T& operator[](int i) const { return c_[i]; }
  T& operator[](int i) { return c_[i]; }
  const T& value() const { return c_[0]; }

  // Partial derivative values at the expansion point.
  T d(int a) const {
    static_assert(N >= 1);
    return nv_ == 0 ? T{} : c_[1 + a];
  }
  T d(int a, int b) const {
    static_assert(N >= 2);
    if (nv_ == 0) return T{};
    std::array<std::int8_t, kMaxVars> e{};
    ++e[a];
    ++e[b];
    const T c = c_[detail::monomials(nv_).index(e)];
    return a == b ? T(2) * c : c;
  }

  void set_nvars(int nv) { nv_ = nv; }

  template <int M>
  Taylor<T, M> truncate() const {
    static_assert(M <= N);
    Taylor<T, M> r;
    r.set_nvars(nv_);
    const int n = r.size();
    for (int i = 0; i < n; ++i) r[i] = c_[i];
    return r;
  }

  template <class U>
  Taylor<U, N> cast() const {
    Taylor<U, N> r;
    r.set_nvars(nv_);
    const int n = size();
    for (int i = 0; i < n; ++i) r[i] = U(c_[i]);
    return r;
  }

  Taylor operator-() const {
    Taylor r = *this;
    for (int i = 0, n = size(); i < n; ++i) r.c_[i] = -r.c_[i];
    return r;
  }

  Taylor& operator+=(const Taylor& o) {
    adopt(o);
    for (int i = 0, n = o.size(); i < n; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Taylor& operator-=(const Taylor& o) {
    adopt(o);
    for (int i = 0, n = o.size(); i < n; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Taylor& operator*=(const T& s) {
    for (int i = 0, n = size(); i < n; ++i) c_[i] = detail::mul_plain(c_[i], s);
    return *this;
  }
  Taylor& operator*=(const Taylor& o) {
    *this = mul(*this, o);
    return *this;
  }

  static Taylor mul(const Taylor& a, const Taylor& b) {
    if (a.nv_ == 0) return scaled(b, a.c_[0]);
    if (b.nv_ == 0) return scaled(a, b.c_[0]);
    assert(a.nv_ == b.nv_);
    Taylor r;
    r.nv_ = a.nv_;
    const auto& tab = detail::monomials(a.nv_);
    const int n = tab.product_upto[N];
    for (int k = 0; k < n; ++k) {
      const auto& t = tab.product[k];
      r.c_[t.out] += detail::mul_plain(a.c_[t.a], b.c_[t.b]);
    }
    return r;
  }

 private:
  static Taylor scaled(Taylor x, const T& s) {
    x *= s;
    return x;
  }
  void adopt(const Taylor& o) {
    if (nv_ == 0) nv_ = o.nv_;
    assert(o.nv_ == 0 || o.nv_ == nv_);
  }

  int nv_ = 0;
  std::array<T, capacity> c_;
};

template <class T>
struct is_taylor : std::false_type {};
template <class T, int N>
struct is_taylor<Taylor<T, N>> : std::true_type {};

// Mixed-order / mixed-type arithmetic promotes to the common coefficient
// type and truncates to the lower order.
template <class A, int N1, class B, int N2>
using TaylorResult = Taylor<decltype(A{} * B{}), (N1 < N2 ? N1 : N2)>;

template <class R, int M, class A, int N>
Taylor<R, M> convert(const Taylor<A, N>& x) {
  return x.template truncate<M>().template cast<R>();
}

template <class A, int N1, class B, int N2>
auto operator+(const Taylor<A, N1>& a, const Taylor<B, N2>& b) {
  using Out = TaylorResult<A, N1, B, N2>;
  Out r = convert<typename Out::value_type, Out::order>(a);
  r += convert<typename Out::value_type, Out::order>(b);
  return r;
}
template <class A, int N1, class B, int N2>
auto operator-(const Taylor<A, N1>& a, const Taylor<B, N2>& b) {
  using Out = TaylorResult<A, N1, B, N2>;
  Out r = convert<typename Out::value_type, Out::order>(a);
  r -= convert<typename Out::value_type, Out::order>(b);
  return r;
}
template <class A, int N1, class B, int N2>
auto operator*(const Taylor<A, N1>& a, const Taylor<B, N2>& b) {
  using Out = TaylorResult<A, N1, B, N2>;
  if constexpr (std::is_same_v<A, B> && N1 == N2) {
    return Out::mul(a, b);
  } else {
    return Out::mul(convert<typename Out::value_type, Out::order>(a),
                    convert<typename Out::value_type, Out::order>(b));
  }
}

template <class S>
concept ScalarConstant = std::is_arithmetic_v<S> || detail::is_complex<S>::value;

template <class A, int N, ScalarConstant S>
auto operator*(const Taylor<A, N>& a, S s) {
  using R = decltype(A{} * s);
  Taylor<R, N> r = a.template cast<R>();
  r *= R(s);
  return r;
}
template <class A, int N, ScalarConstant S>
auto operator*(S s, const Taylor<A, N>& a) {
  return a * s;
}
template <class A, int N, ScalarConstant S>
auto operator+(const Taylor<A, N>& a, S s) {
  using R = decltype(A{} + s);
  Taylor<R, N> r = a.template cast<R>();
  r[0] += R(s);
  return r;
}
template <class A, int N, ScalarConstant S>
auto operator+(S s, const Taylor<A, N>& a) {
  return a + s;
}
template <class A, int N, ScalarConstant S>
auto operator-(const Taylor<A, N>& a, S s) {
  return a + (-s);
}
template <class A, int N, ScalarConstant S>
auto operator-(S s, const Taylor<A, N>& a) {
  return (-a) + s;
}

namespace detail {

// Evaluates sum_k coeff[k] * (x - x0)^k by Horner's rule.
template <class T, int N>
Taylor<T, N> compose(const Taylor<T, N>& x, const std::array<T, N + 1>& coeff) {
  Taylor<T, N> delta = x;
  delta[0] = T{};
  Taylor<T, N> r(coeff[N]);
  for (int k = N - 1; k >= 0; --k) {
    r = Taylor<T, N>::mul(r, delta);
    r[0] += coeff[k];
  }
  return r;
}

}  // namespace detail

template <class T, int N>
Taylor<T, N> recip(const Taylor<T, N>& x) {
  std::array<T, N + 1> c;
  const T inv = T(1) / x.value();
  T p = inv;
  for (int k = 0; k <= N; ++k) {
    c[k] = (k % 2 == 0 ? p : -p);
    p *= inv;
  }
  return detail::compose(x, c);
}

template <class A, int N1, class B, int N2>
auto operator/(const Taylor<A, N1>& a, const Taylor<B, N2>& b) {
  return a * recip(b);
}
template <class A, int N, ScalarConstant S>
auto operator/(const Taylor<A, N>& a, S s) {
  return a * (1.0 / s);
}
template <class A, int N, ScalarConstant S>
auto operator/(S s, const Taylor<A, N>& a) {
  return recip(a) * s;
}

template <class T, int N>
Taylor<T, N> exp(const Taylor<T, N>& x) {
  std::array<T, N + 1> c;
  const T e = std::exp(x.value());
  double fact = 1.0;
  for (int k = 0; k <= N; ++k) {
    if (k > 0) fact *= k;
    c[k] = e / fact;
  }
  return detail::compose(x, c);
}

template <int N>
Taylor<double, N> log(const Taylor<double, N>& x) {
  std::array<double, N + 1> c;
  const double x0 = x.value();
  if (!(x0 > 0)) throw std::domain_error("log of non-positive jet");
  c[0] = std::log(x0);
  double p = 1.0;
  for (int k = 1; k <= N; ++k) {
    p /= x0;
    c[k] = (k % 2 == 1 ? 1.0 : -1.0) * p / k;
  }
  return detail::compose(x, c);
}

template <int N>
Taylor<double, N> sin(const Taylor<double, N>& x) {
  std::array<double, N + 1> c;
  const double s = std::sin(x.value()), co = std::cos(x.value());
  const double cyc[4] = {s, co, -s, -co};
  double fact = 1.0;
  for (int k = 0; k <= N; ++k) {
    if (k > 0) fact *= k;
    c[k] = cyc[k % 4] / fact;
  }
  return detail::compose(x, c);
}

template <int N>
Taylor<double, N> cos(const Taylor<double, N>& x) {
  std::array<double, N + 1> c;
  const double s = std::sin(x.value()), co = std::cos(x.value());
  const double cyc[4] = {co, -s, -co, s};
  double fact = 1.0;
  for (int k = 0; k <= N; ++k) {
    if (k > 0) fact *= k;
    c[k] = cyc[k % 4] / fact;
  }
  return detail::compose(x, c);
}

// x^p for real p, x > 0.
template <int N>
Taylor<double, N> pow(const Taylor<double, N>& x, double p) {
  std::array<double, N + 1> c;
  const double x0 = x.value();
  double coef = 1.0;  // binomial(p, k)
  for (int k = 0; k <= N; ++k) {
    c[k] = coef * std::pow(x0, p - k);
    coef *= (p - k) / (k + 1);
  }
  return detail::compose(x, c);
}

template <int N>
Taylor<double, N> sqrt(const Taylor<double, N>& x) {
  return pow(x, 0.5);
}

template <int N>
Taylor<double, N> real(const Taylor<cplx, N>& x) {
  Taylor<double, N> r;
  r.set_nvars(x.nvars());
  for (int i = 0, n = x.size(); i < n; ++i) r[i] = x[i].real();
  return r;
}
template <int N>
Taylor<double, N> imag(const Taylor<cplx, N>& x) {
  Taylor<double, N> r;
  r.set_nvars(x.nvars());
  for (int i = 0, n = x.size(); i < n; ++i) r[i] = x[i].imag();
  return r;
}
template <int N>
Taylor<cplx, N> conj(const Taylor<cplx, N>& x) {
  Taylor<cplx, N> r = x;
  for (int i = 0, n = x.size(); i < n; ++i) r[i] = std::conj(x[i]);
  return r;
}
template <int N>
const Taylor<double, N>& conj(const Taylor<double, N>& x) {
  return x;
}
template <int N>
Taylor<cplx, N> make_complex(const Taylor<double, N>& re, const Taylor<double, N>& im) {
  return re.template cast<cplx>() + im * cplx(0, 1);
}

// Real partial derivative with respect to variable a.
template <class T, int N>
Taylor<T, N - 1> partial(const Taylor<T, N>& f, int a) {
  static_assert(N >= 1);
  Taylor<T, N - 1> r;
  r.set_nvars(f.nvars());
  if (f.nvars() == 0) return r;
  const auto& tab = detail::monomials(f.nvars());
  const int n = tab.deriv_upto[a][N];
  for (int k = 0; k < n; ++k) {
    const auto& t = tab.deriv[a][k];
    r[t.dst] += f[t.src] * t.factor;
  }
  return r;
}

// Wirtinger derivatives in complex coordinates z^k = x^{2k} + i x^{2k+1}.
template <class T, int N>
Taylor<cplx, N - 1> dz(const Taylor<T, N>& f, int k) {
  return (partial(f, 2 * k).template cast<cplx>() - partial(f, 2 * k + 1) * cplx(0, 1)) * 0.5;
}
template <class T, int N>
Taylor<cplx, N - 1> dzb(const Taylor<T, N>& f, int k) {
  return (partial(f, 2 * k).template cast<cplx>() + partial(f, 2 * k + 1) * cplx(0, 1)) * 0.5;
}

template <int N>
using RJet = Taylor<double, N>;
template <int N>
using CJet = Taylor<cplx, N>;

// Uniform access to the constant term of scalars and jets.
inline double value_of(double x) { return x; }
inline cplx value_of(cplx x) { return x; }
template <class T, int N>
T value_of(const Taylor<T, N>& x) {
  return x.value();
}

}  // namespace chernlab
