#pragma once

#include <boost/rational.hpp>
#include <complex>
#include <cstdint>
#include <ostream>
#include <string>

namespace spinlab {

using Rational = boost::rational<long long>;

// Complex number over an exact field. std::complex<T> has unspecified
// behaviour for non-floating-point T, so we carry our own.
template <typename R>
struct Cx {
  R re{};
  R im{};

  Cx() = default;
  Cx(int v) : re(v), im(0) {}
  Cx(R r) : re(std::move(r)), im(0) {}
  Cx(R r, R i) : re(std::move(r)), im(std::move(i)) {}

  static Cx i() { return Cx(R(0), R(1)); }

  friend Cx operator+(const Cx& a, const Cx& b) { return {a.re + b.re, a.im + b.im}; }
  friend Cx operator-(const Cx& a, const Cx& b) { return {a.re - b.re, a.im - b.im}; }
  friend Cx operator-(const Cx& a) { return {-a.re, -a.im}; }
  friend Cx operator*(const Cx& a, const Cx& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend Cx operator/(const Cx& a, const Cx& b) {
    R d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
  }
  Cx& operator+=(const Cx& b) { return *this = *this + b; }
  Cx& operator-=(const Cx& b) { return *this = *this - b; }
  Cx& operator*=(const Cx& b) { return *this = *this * b; }
  friend bool operator==(const Cx& a, const Cx& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const Cx& a, const Cx& b) { return !(a == b); }

  friend std::ostream& operator<<(std::ostream& os, const Cx& z) {
    return os << "(" << z.re << (z.im < R(0) ? "" : "+") << z.im << "i)";
  }
};

using CRat = Cx<Rational>;
using CDbl = std::complex<double>;

inline Rational conj_of(const Rational& x) { return x; }
inline double conj_of(double x) { return x; }
inline CDbl conj_of(const CDbl& z) { return std::conj(z); }
template <typename R>
Cx<R> conj_of(const Cx<R>& z) { return {z.re, -z.im}; }

inline bool is_zero(const Rational& x) { return x == Rational(0); }
inline bool is_zero(double x) { return x == 0.0; }
inline bool is_zero(const CDbl& z) { return z == CDbl(0.0); }
template <typename R>
bool is_zero(const Cx<R>& z) { return is_zero(z.re) && is_zero(z.im); }

inline double to_dbl(const Rational& x) {
  return static_cast<double>(x.numerator()) / static_cast<double>(x.denominator());
}
inline double to_dbl(double x) { return x; }
inline CDbl to_cdbl(const Rational& x) { return CDbl(to_dbl(x), 0.0); }
inline CDbl to_cdbl(double x) { return CDbl(x, 0.0); }
inline CDbl to_cdbl(const CDbl& z) { return z; }
template <typename R>
CDbl to_cdbl(const Cx<R>& z) { return CDbl(to_dbl(z.re), to_dbl(z.im)); }

// |z|^2 as a double, for tolerance checks in numeric mode.
inline double abs2_dbl(const Rational& x) { double d = to_dbl(x); return d * d; }
inline double abs2_dbl(double x) { return x * x; }
inline double abs2_dbl(const CDbl& z) { return std::norm(z); }
template <typename R>
double abs2_dbl(const Cx<R>& z) { return abs2_dbl(to_cdbl(z)); }

// Scalar traits used by the templated algebra kernels.
template <typename S>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static constexpr bool complex = false;
  using real_type = Rational;
};
template <>
struct scalar_traits<CRat> {
  static constexpr bool exact = true;
  static constexpr bool complex = true;
  using real_type = Rational;
};
template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static constexpr bool complex = false;
  using real_type = double;
};
template <>
struct scalar_traits<CDbl> {
  static constexpr bool exact = false;
  static constexpr bool complex = true;
  using real_type = double;
};

// Unit imaginary for the two complex scalar types.
template <typename S>
S imag_unit();
template <>
inline CRat imag_unit<CRat>() { return CRat::i(); }
template <>
inline CDbl imag_unit<CDbl>() { return CDbl(0.0, 1.0); }

}  // namespace spinlab
