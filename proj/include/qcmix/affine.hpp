#pragma once

#include <map>
#include <stdexcept>

#include "qcmix/observable.hpp"

namespace qcmix {

/// Raised when an operation would multiply two unknown-bearing quantities.
/// The induction never needs that product: unknown constants are c-numbers
/// and bracket to zero, so every bracket is affine in the unknowns.
struct AffineClosureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Observable-valued affine form base + sum_j u_j * coeff_j in scalar
/// unknowns u_j, with concrete Observable coefficients.
template <class R>
struct AffineObservable {
  Observable<R> base;
  std::map<int, Observable<R>> linear;

  explicit AffineObservable(Dims d) : base(d) {}
  AffineObservable(Observable<R> b) : base(std::move(b)) {}

  Dims dims() const { return base.dims(); }
  bool has_unknowns() const { return !linear.empty(); }
  bool is_zero() const { return base.is_zero() && linear.empty(); }

  void add_linear(int id, const Observable<R>& coeff) {
    if (coeff.is_zero()) return;
    auto it = linear.find(id);
    if (it == linear.end()) {
      linear.emplace(id, coeff);
      return;
    }
    it->second += coeff;
    if (it->second.is_zero()) linear.erase(it);
  }

  AffineObservable& operator+=(const AffineObservable& o) {
    base += o.base;
    for (const auto& [id, c] : o.linear) add_linear(id, c);
    return *this;
  }
  AffineObservable& operator-=(const AffineObservable& o) {
    base -= o.base;
    for (const auto& [id, c] : o.linear) add_linear(id, -c);
    return *this;
  }
  friend AffineObservable operator+(AffineObservable a, const AffineObservable& b) {
    a += b;
    return a;
  }
  friend AffineObservable operator-(AffineObservable a, const AffineObservable& b) {
    a -= b;
    return a;
  }
  friend AffineObservable operator-(const AffineObservable& a) {
    AffineObservable r(a.dims());
    r.base = -a.base;
    for (const auto& [id, c] : a.linear) r.linear.emplace(id, -c);
    return r;
  }

  AffineObservable scaled(const R& c) const {
    AffineObservable r(dims());
    r.base = base.scaled(c);
    for (const auto& [id, co] : linear) {
      auto s = co.scaled(c);
      if (!s.is_zero()) r.linear.emplace(id, std::move(s));
    }
    return r;
  }

  /// Replace the listed unknowns by concrete values.
  void substitute(const std::map<int, R>& values) {
    for (auto it = linear.begin(); it != linear.end();) {
      auto v = values.find(it->first);
      if (v == values.end()) { ++it; continue; }
      base += it->second.scaled(v->second);
      it = linear.erase(it);
    }
  }

  friend bool operator==(const AffineObservable& a, const AffineObservable& b) {
    return a.base == b.base && a.linear == b.linear;
  }
  friend bool operator!=(const AffineObservable& a, const AffineObservable& b) {
    return !(a == b);
  }
};

}  // namespace qcmix
