#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>

#include "qcmix/rational.hpp"

namespace qcmix {

/// Coefficient ring for the symbolic layer: polynomials in the two formal
/// constants hbar and hbar_c (nonnegative powers) with Gaussian-rational
/// coefficients. hbar is the quantum deformation parameter, hbar_c the
/// classical one carried by the star product.
///
/// Division by i*hbar is exact whenever every term carries at least one power
/// of hbar; anything else is an internal error in the calling algebra.
struct Scalar {
  /// (hbar power, hbar_c power) -> coefficient. Zero coefficients are never
  /// stored, so the default-constructed Scalar is zero and equality is
  /// map equality.
  using Key = std::pair<std::uint32_t, std::uint32_t>;
  std::map<Key, GaussRat> terms;

  Scalar() = default;
  explicit Scalar(GaussRat c) { set({0, 0}, std::move(c)); }

  static Scalar zero() { return {}; }
  static Scalar one() { return Scalar(GaussRat::one()); }
  static Scalar unit_i() { return Scalar(GaussRat::unit_i()); }
  static Scalar from_rational(Rat r) { return Scalar(GaussRat(std::move(r))); }
  static Scalar from_gauss(GaussRat g) { return Scalar(std::move(g)); }

  /// The monomial c * hbar^a * hbar_c^b.
  static Scalar monomial(GaussRat c, std::uint32_t a, std::uint32_t b) {
    Scalar s;
    s.set({a, b}, std::move(c));
    return s;
  }
  static Scalar hbar(std::uint32_t power = 1) {
    return monomial(GaussRat::one(), power, 0);
  }
  static Scalar hbarc(std::uint32_t power = 1) {
    return monomial(GaussRat::one(), 0, power);
  }
  static Scalar i_hbar() { return monomial(GaussRat::unit_i(), 1, 0); }

  bool is_zero() const { return terms.empty(); }

  void set(Key k, GaussRat c) {
    if (c.is_zero()) terms.erase(k);
    else terms[k] = std::move(c);
  }
  void add_term(Key k, const GaussRat& c) {
    auto it = terms.find(k);
    if (it == terms.end()) {
      if (!c.is_zero()) terms.emplace(k, c);
      return;
    }
    it->second += c;
    if (it->second.is_zero()) terms.erase(it);
  }
  GaussRat coefficient(Key k) const {
    auto it = terms.find(k);
    return it == terms.end() ? GaussRat::zero() : it->second;
  }

  friend Scalar operator+(const Scalar& a, const Scalar& b) {
    Scalar r = a;
    for (const auto& [k, c] : b.terms) r.add_term(k, c);
    return r;
  }
  friend Scalar operator-(const Scalar& a, const Scalar& b) {
    Scalar r = a;
    for (const auto& [k, c] : b.terms) r.add_term(k, -c);
    return r;
  }
  friend Scalar operator-(const Scalar& a) {
    Scalar r;
    for (const auto& [k, c] : a.terms) r.terms.emplace(k, -c);
    return r;
  }
  friend Scalar operator*(const Scalar& a, const Scalar& b) {
    Scalar r;
    for (const auto& [ka, ca] : a.terms)
      for (const auto& [kb, cb] : b.terms)
        r.add_term({ka.first + kb.first, ka.second + kb.second}, ca * cb);
    return r;
  }
  Scalar& operator+=(const Scalar& b) {
    for (const auto& [k, c] : b.terms) add_term(k, c);
    return *this;
  }
  Scalar& operator-=(const Scalar& b) {
    for (const auto& [k, c] : b.terms) add_term(k, -c);
    return *this;
  }
  Scalar& operator*=(const Scalar& b) { *this = *this * b; return *this; }

  friend bool operator==(const Scalar& a, const Scalar& b) {
    return a.terms == b.terms;
  }
  friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

  Scalar conj() const {
    Scalar r;
    for (const auto& [k, c] : terms) r.terms.emplace(k, c.conj());
    return r;
  }

  Scalar times_i_hbar() const {
    Scalar r;
    for (const auto& [k, c] : terms)
      r.terms.emplace(Key{k.first + 1, k.second}, c * GaussRat::unit_i());
    return r;
  }

  /// Exact division by i*hbar. Every term must carry hbar^1 or higher;
  /// a bare term means the caller's algebra is broken.
  Scalar div_i_hbar() const {
    Scalar r;
    for (const auto& [k, c] : terms) {
      if (k.first == 0)
        throw std::logic_error("Scalar: division by i*hbar leaves a pole");
      r.terms.emplace(Key{k.first - 1, k.second}, c * (-GaussRat::unit_i()));
    }
    return r;
  }

  /// hbar_c -> hbar, merging powers.
  Scalar subst_hbarc_to_hbar() const {
    Scalar r;
    for (const auto& [k, c] : terms) r.add_term({k.first + k.second, 0}, c);
    return r;
  }

  /// Coefficient of hbar_c^n, as a Scalar in hbar alone.
  Scalar hbarc_component(std::uint32_t n) const {
    Scalar r;
    for (const auto& [k, c] : terms)
      if (k.second == n) r.terms.emplace(Key{k.first, 0}, c);
    return r;
  }

  std::uint32_t max_hbarc_power() const {
    std::uint32_t m = 0;
    for (const auto& [k, c] : terms) { (void)c; if (k.second > m) m = k.second; }
    return m;
  }

  std::string str() const {
    if (terms.empty()) return "0";
    std::string out;
    for (const auto& [k, c] : terms) {
      if (!out.empty()) out += " + ";
      out += "(" + c.str() + ")";
      if (k.first) out += "*hbar" + (k.first > 1 ? "^" + std::to_string(k.first) : "");
      if (k.second) out += "*hbarc" + (k.second > 1 ? "^" + std::to_string(k.second) : "");
    }
    return out;
  }

  /// Evaluate at hbar = 1; requires an hbar_c-free value.
  GaussRat at_hbar_one() const {
    GaussRat g;
    for (const auto& [k, c] : terms) {
      if (k.second != 0)
        throw std::domain_error("Scalar: hbar_c present in hbar=1 evaluation");
      g += c;
    }
    return g;
  }
};

}  // namespace qcmix
