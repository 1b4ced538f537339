#pragma once

#include <map>
#include <optional>
#include <utility>

#include "qcmix/observable.hpp"

namespace qcmix {

/// Moyal star product on the classical sector, truncated at order N in
/// hbar_c: A*B = sum_n (i hbar_c / 2)^n / n! D^n(A (x) B), where D is the
/// Poisson bidifferential sum_j (dx_j (x) dk_j - dk_j (x) dx_j). A-factors
/// stay left of B-factors. The series is finite on polynomials.
inline Observable<Scalar> star_multiply(const Observable<Scalar>& A,
                                        const Observable<Scalar>& B,
                                        unsigned order) {
  if (!(A.dims() == B.dims()))
    throw std::invalid_argument("star_multiply: mismatched dimensions");
  const Dims d = A.dims();
  Observable<Scalar> out(d);

  using Tensor = std::map<std::pair<Monomial, Monomial>, Scalar>;
  Tensor state;
  for (const auto& [ma, ca] : A.terms())
    for (const auto& [mb, cb] : B.terms())
      state[{ma, mb}] = ca * cb;

  GaussRat coeff = GaussRat::one();  // (i/2)^n / n!
  for (unsigned n = 0; !state.empty(); ++n) {
    if (n > 0) coeff *= GaussRat{Rat(0), Rat(1, 2 * static_cast<int>(n))};
    const Scalar weight = Scalar::monomial(coeff, 0, n);
    for (const auto& [mm, c] : state)
      Observable<Scalar>::expand_product(out, mm.first, mm.second, c * weight);
    if (n == order) break;

    Tensor next;
    for (const auto& [mm, c] : state) {
      const auto& [ma, mb] = mm;
      for (int j = 0; j < d.nc; ++j) {
        int ta = ma.t(j), lb = mb.l(j);
        if (ta > 0 && lb > 0) {
          auto key = mm;
          key.first.set_exp(Var::X, j, static_cast<std::uint16_t>(ta - 1));
          key.second.set_exp(Var::K, j, static_cast<std::uint16_t>(lb - 1));
          auto& acc = next[key];
          acc += c * Scalar::from_rational(Rat(ta) * Rat(lb));
          if (acc.is_zero()) next.erase(key);
        }
        int la = ma.l(j), tb = mb.t(j);
        if (la > 0 && tb > 0) {
          auto key = mm;
          key.first.set_exp(Var::K, j, static_cast<std::uint16_t>(la - 1));
          key.second.set_exp(Var::X, j, static_cast<std::uint16_t>(tb - 1));
          auto& acc = next[key];
          acc -= c * Scalar::from_rational(Rat(la) * Rat(tb));
          if (acc.is_zero()) next.erase(key);
        }
      }
    }
    state = std::move(next);
  }
  return out;
}

/// Exact coefficient of hbar_c^n in the star commutator [A,B]_*, with the
/// hbar_c power stripped. The full (untruncated) series is used; it is finite
/// because the classical degrees bound the order.
inline Observable<Scalar> cn_coefficient(unsigned n, const Observable<Scalar>& A,
                                         const Observable<Scalar>& B) {
  unsigned nmax = static_cast<unsigned>(
      std::min(A.classical_degree(), B.classical_degree()));
  Observable<Scalar> comm =
      star_multiply(A, B, nmax) - star_multiply(B, A, nmax);
  Observable<Scalar> out(A.dims());
  for (const auto& [m, c] : comm.terms()) {
    Scalar part = c.hbarc_component(n);
    if (!part.is_zero()) out.add_term(m, std::move(part));
  }
  return out;
}

/// Residual of the order-m graded Jacobi identity
///   sum_{a+b=m} C_a(C_b(A,B),C) + cyclic = 0.
/// With the full coefficient family the residual vanishes identically
/// (star associativity); restricting the family to indices <= *truncation
/// drops the higher cross terms and the residual is nonzero in general.
inline Observable<Scalar> graded_jacobi_residual(
    unsigned m, const Observable<Scalar>& A, const Observable<Scalar>& B,
    const Observable<Scalar>& C, std::optional<unsigned> truncation = {}) {
  Observable<Scalar> out(A.dims());
  for (unsigned a = 0; a <= m; ++a) {
    unsigned b = m - a;
    if (truncation && (a > *truncation || b > *truncation)) continue;
    out += cn_coefficient(a, cn_coefficient(b, A, B), C);
    out += cn_coefficient(a, cn_coefficient(b, B, C), A);
    out += cn_coefficient(a, cn_coefficient(b, C, A), B);
  }
  return out;
}

}  // namespace qcmix
