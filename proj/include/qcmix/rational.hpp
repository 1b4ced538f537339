#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>

namespace qcmix {

/// Exact rational number. All coefficient arithmetic in the algebra layer is
/// exact; no floating point enters until the numerical front ends.
using Rat = boost::multiprecision::cpp_rational;

inline std::string to_string(const Rat& r) {
  return r.str();
}

/// Element of Q(i), the Gaussian rationals: re + im*i.
///
/// Also serves as the coefficient ring for the obstruction search, which runs
/// at hbar = 1 so that the coefficients form a field and linear systems can be
/// solved exactly.
struct GaussRat {
  Rat re{0};
  Rat im{0};

  GaussRat() = default;
  GaussRat(Rat r) : re(std::move(r)) {}
  GaussRat(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}
  GaussRat(long n) : re(n) {}

  static GaussRat zero() { return {}; }
  static GaussRat one() { return {Rat(1)}; }
  static GaussRat unit_i() { return {Rat(0), Rat(1)}; }
  static GaussRat from_rational(Rat r) { return {std::move(r)}; }

  bool is_zero() const { return re == 0 && im == 0; }

  GaussRat conj() const { return {re, -im}; }

  friend GaussRat operator+(const GaussRat& a, const GaussRat& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GaussRat operator-(const GaussRat& a, const GaussRat& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend GaussRat operator-(const GaussRat& a) { return {-a.re, -a.im}; }
  friend GaussRat operator*(const GaussRat& a, const GaussRat& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  GaussRat& operator+=(const GaussRat& b) { re += b.re; im += b.im; return *this; }
  GaussRat& operator-=(const GaussRat& b) { re -= b.re; im -= b.im; return *this; }
  GaussRat& operator*=(const GaussRat& b) { *this = *this * b; return *this; }

  friend bool operator==(const GaussRat& a, const GaussRat& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const GaussRat& a, const GaussRat& b) { return !(a == b); }

  /// Multiplicative inverse; throws on zero.
  GaussRat inverse() const {
    Rat n = re * re + im * im;
    if (n == 0) throw std::domain_error("GaussRat: division by zero");
    return {re / n, -im / n};
  }

  friend GaussRat operator/(const GaussRat& a, const GaussRat& b) {
    return a * b.inverse();
  }

  // Ring protocol used by the algebra templates. In this ring hbar is fixed
  // to 1, so i*hbar is just i and division by it is always exact.
  static GaussRat i_hbar() { return unit_i(); }
  GaussRat times_i_hbar() const { return {-im, re}; }
  GaussRat div_i_hbar() const { return {im, -re}; }

  std::string str() const {
    if (is_zero()) return "0";
    std::string s;
    if (im == 0) return to_string(re);
    if (re == 0) {
      if (im == 1) return "i";
      if (im == -1) return "-i";
      return to_string(im) + "*i";
    }
    s = to_string(re);
    if (im > 0) s += "+";
    if (im == 1) s += "i";
    else if (im == -1) s += "-i";
    else s += to_string(im) + "*i";
    return s;
  }
};

}  // namespace qcmix
