#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

#include "errors.hpp"
#include "numerics.hpp"

namespace periodlab {

using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double rat_to_double(const Rat& q) { return q.convert_to<double>(); }

inline std::string rat_to_string(const Rat& q) {
  const BigInt num = boost::multiprecision::numerator(q);
  const BigInt den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline Rat rat_from_string(const std::string& s) {
  try {
    return Rat(s);
  } catch (const std::exception&) {
    throw PeriodlabError("rat_from_string: cannot parse '" + s + "'");
  }
}

inline Rat rat_pow(const Rat& base, int e) {
  if (e < 0) {
    if (base == 0) throw PeriodlabError("rat_pow: zero to a negative power");
    return Rat(1) / rat_pow(base, -e);
  }
  Rat out = 1;
  Rat b = base;
  int k = e;
  while (k > 0) {
    if (k & 1) out *= b;
    b *= b;
    k >>= 1;
  }
  return out;
}

// Element of Q(i).
struct GaussRat {
  Rat re{0};
  Rat im{0};

  GaussRat() = default;
  GaussRat(Rat r) : re(std::move(r)) {}
  GaussRat(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}
  GaussRat(int r) : re(r) {}
  GaussRat(int r, int i) : re(r), im(i) {}

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }

  Complex to_complex() const { return Complex(rat_to_double(re), rat_to_double(im)); }

  GaussRat conj() const { return GaussRat(re, -im); }

  friend GaussRat operator+(const GaussRat& a, const GaussRat& b) {
    return GaussRat(a.re + b.re, a.im + b.im);
  }
  friend GaussRat operator-(const GaussRat& a, const GaussRat& b) {
    return GaussRat(a.re - b.re, a.im - b.im);
  }
  friend GaussRat operator-(const GaussRat& a) { return GaussRat(-a.re, -a.im); }
  friend GaussRat operator*(const GaussRat& a, const GaussRat& b) {
    return GaussRat(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
  }
  friend GaussRat operator/(const GaussRat& a, const GaussRat& b) {
    const Rat n = b.re * b.re + b.im * b.im;
    if (n == 0) throw PeriodlabError("GaussRat: division by zero");
    return GaussRat((a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n);
  }
  GaussRat& operator+=(const GaussRat& o) { return *this = *this + o; }
  GaussRat& operator-=(const GaussRat& o) { return *this = *this - o; }
  GaussRat& operator*=(const GaussRat& o) { return *this = *this * o; }
  GaussRat& operator/=(const GaussRat& o) { return *this = *this / o; }
  friend bool operator==(const GaussRat& a, const GaussRat& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const GaussRat& a, const GaussRat& b) { return !(a == b); }
};

inline std::string gauss_to_string(const GaussRat& c) {
  if (c.im == 0) return rat_to_string(c.re);
  return rat_to_string(c.re) + (c.im > 0 ? "+" : "-") + rat_to_string(boost::multiprecision::abs(c.im)) + "i";
}

}  // namespace periodlab
