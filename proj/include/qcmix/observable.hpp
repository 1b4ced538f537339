#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qcmix/monomial.hpp"
#include "qcmix/rational.hpp"
#include "qcmix/scalar.hpp"

namespace qcmix {

namespace detail {

inline Rat binom_rat(int n, int k) {
  if (k < 0 || k > n) return Rat(0);
  Rat r(1);
  for (int j = 1; j <= k; ++j) r = r * Rat(n - j + 1) / Rat(j);
  return r;
}

inline Rat factorial_rat(int n) {
  Rat r(1);
  for (int j = 2; j <= n; ++j) r *= Rat(j);
  return r;
}

}  // namespace detail

enum class Support { CNumber, Classical, Quantum, Mixed };

/// Polynomial hybrid observable over the coefficient ring R: a finite sum of
/// normal-ordered words q^r p^s x^t k^l. The canonical form is the sparse
/// coefficient map itself; all operations return canonical forms, so equality
/// is structural.
///
/// R must provide ring arithmetic plus conj(), times_i_hbar(), div_i_hbar(),
/// from_rational() and is_zero(); both GaussRat (hbar = 1) and Scalar
/// (formal hbar, hbar_c) qualify.
template <class R>
class Observable {
 public:
  using Terms = std::map<Monomial, R>;

  explicit Observable(Dims d) : dims_(d) {}

  static Observable zero(Dims d) { return Observable(d); }
  static Observable constant(Dims d, R c) {
    Observable o(d);
    o.add_term(Monomial(d), std::move(c));
    return o;
  }
  static Observable from_monomial(Dims d, Monomial m, R c) {
    Observable o(d);
    o.add_term(std::move(m), std::move(c));
    return o;
  }
  static Observable variable(Dims d, Var v, int index = 0) {
    return from_monomial(d, Monomial::variable(d, v, index), R::one());
  }

  const Dims& dims() const { return dims_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }

  void add_term(Monomial m, R c) {
    if (c.is_zero()) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_.emplace(std::move(m), std::move(c));
      return;
    }
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }

  R coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? R{} : it->second;
  }

  int degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) { (void)c; d = std::max(d, m.degree()); }
    return d;
  }
  int classical_degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) { (void)c; d = std::max(d, m.classical_degree()); }
    return d;
  }
  int quantum_degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) { (void)c; d = std::max(d, m.quantum_degree()); }
    return d;
  }

  Support classify() const {
    bool has_q = false, has_c = false;
    for (const auto& [m, c] : terms_) {
      (void)c;
      if (m.quantum_degree() > 0) has_q = true;
      if (m.classical_degree() > 0) has_c = true;
    }
    if (has_q && has_c) return Support::Mixed;
    if (has_q) return Support::Quantum;
    if (has_c) return Support::Classical;
    return Support::CNumber;
  }

  friend Observable operator+(const Observable& a, const Observable& b) {
    a.check_dims(b);
    Observable r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, c);
    return r;
  }
  friend Observable operator-(const Observable& a, const Observable& b) {
    a.check_dims(b);
    Observable r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, -c);
    return r;
  }
  friend Observable operator-(const Observable& a) {
    Observable r(a.dims_);
    for (const auto& [m, c] : a.terms_) r.terms_.emplace(m, -c);
    return r;
  }
  Observable& operator+=(const Observable& b) {
    check_dims(b);
    for (const auto& [m, c] : b.terms_) add_term(m, c);
    return *this;
  }
  Observable& operator-=(const Observable& b) {
    check_dims(b);
    for (const auto& [m, c] : b.terms_) add_term(m, -c);
    return *this;
  }

  Observable scaled(const R& c) const {
    Observable r(dims_);
    if (c.is_zero()) return r;
    for (const auto& [m, cc] : terms_) r.add_term(m, cc * c);
    return r;
  }
  friend Observable operator*(const R& c, const Observable& a) { return a.scaled(c); }

  friend bool operator==(const Observable& a, const Observable& b) {
    return a.dims_ == b.dims_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const Observable& a, const Observable& b) {
    return !(a == b);
  }

  /// Normal-ordered product. Classical factors commute; for each quantum
  /// mode the inner reordering p^s q^r = sum_j C(s,j) C(r,j) j! (-i hbar)^j
  /// q^(r-j) p^(s-j) is applied exactly.
  friend Observable operator*(const Observable& A, const Observable& B) {
    A.check_dims(B);
    Observable out(A.dims_);
    for (const auto& [ma, ca] : A.terms_)
      for (const auto& [mb, cb] : B.terms_)
        expand_product(out, ma, mb, ca * cb);
    return out;
  }

  Observable div_i_hbar() const {
    Observable r(dims_);
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, c.div_i_hbar());
    return r;
  }

  std::string str() const;

  /// Shared expansion core: accumulates coeff * (word of ma) * (word of mb)
  /// into out, normal ordering the quantum letters.
  static void expand_product(Observable& out, const Monomial& ma,
                             const Monomial& mb, const R& coeff) {
    const int nq = ma.nq();
    // Modes needing reordering: those with s_a > 0 and r_b > 0.
    boost::container::small_vector<int, 4> active;
    for (int i = 0; i < nq; ++i)
      if (ma.s(i) > 0 && mb.r(i) > 0) active.push_back(i);

    Monomial base = ma;
    {
      auto& e = base.exps();
      const auto& eb = mb.exps();
      for (std::size_t k = 0; k < e.size(); ++k)
        e[k] = static_cast<std::uint16_t>(e[k] + eb[k]);
    }
    if (active.empty()) {
      out.add_term(std::move(base), coeff);
      return;
    }

    boost::container::small_vector<int, 4> j(active.size(), 0);
    for (;;) {
      Rat num(1);
      int jtot = 0;
      for (std::size_t a = 0; a < active.size(); ++a) {
        int i = active[a];
        num *= detail::binom_rat(ma.s(i), j[a]) * detail::binom_rat(mb.r(i), j[a]) *
               detail::factorial_rat(j[a]);
        jtot += j[a];
      }
      R c = coeff * R::from_rational((jtot % 2 == 0) ? num : -num);
      for (int rep = 0; rep < jtot; ++rep) c = c.times_i_hbar();
      Monomial m = base;
      for (std::size_t a = 0; a < active.size(); ++a) {
        int i = active[a];
        m.set_exp(Var::Q, i, static_cast<std::uint16_t>(m.r(i) - j[a]));
        m.set_exp(Var::P, i, static_cast<std::uint16_t>(m.s(i) - j[a]));
      }
      out.add_term(std::move(m), c);

      std::size_t a = 0;
      for (; a < active.size(); ++a) {
        int i = active[a];
        if (j[a] < std::min<int>(ma.s(i), mb.r(i))) { ++j[a]; break; }
        j[a] = 0;
      }
      if (a == active.size()) break;
    }
  }

 private:
  void check_dims(const Observable& b) const {
    if (!(dims_ == b.dims_))
      throw std::invalid_argument("Observable: mismatched dimensions");
  }

  Dims dims_;
  Terms terms_;
};

/// Hermitian adjoint: reverses each word and conjugates coefficients; q, p,
/// x, k are self-adjoint, so only the quantum reordering contributes.
template <class R>
Observable<R> adjoint(const Observable<R>& A) {
  Observable<R> out(A.dims());
  Monomial left(A.dims()), right(A.dims());
  for (const auto& [m, c] : A.terms()) {
    // (q^r p^s)^+ = p^s q^r: expand (p-part) * (q-part), classical riding along.
    auto& le = left.exps();
    auto& re = right.exps();
    std::fill(le.begin(), le.end(), 0);
    std::fill(re.begin(), re.end(), 0);
    const int nq = m.nq(), nc = m.nc();
    for (int i = 0; i < nq; ++i) {
      left.set_exp(Var::P, i, m.s(i));
      right.set_exp(Var::Q, i, m.r(i));
    }
    for (int j = 0; j < nc; ++j) {
      left.set_exp(Var::X, j, m.t(j));
      left.set_exp(Var::K, j, m.l(j));
    }
    Observable<R>::expand_product(out, left, right, c.conj());
  }
  return out;
}

template <class R>
Observable<R> derivative(const Observable<R>& A, Var v, int index = 0) {
  Observable<R> out(A.dims());
  for (const auto& [m, c] : A.terms()) {
    int e = m.exp(v, index);
    if (e == 0) continue;
    Monomial d = m;
    d.set_exp(v, index, static_cast<std::uint16_t>(e - 1));
    out.add_term(std::move(d), c * R::from_rational(Rat(e)));
  }
  return out;
}

/// Antiderivative in one variable (formal, on the normal-ordered basis).
template <class R>
Observable<R> antiderivative(const Observable<R>& A, Var v, int index = 0) {
  Observable<R> out(A.dims());
  for (const auto& [m, c] : A.terms()) {
    int e = m.exp(v, index);
    Monomial d = m;
    d.set_exp(v, index, static_cast<std::uint16_t>(e + 1));
    out.add_term(std::move(d), c * R::from_rational(Rat(1, e + 1)));
  }
  return out;
}

template <class R>
Observable<R> poisson(const Observable<R>& A, const Observable<R>& B) {
  if (!(A.dims() == B.dims()))
    throw std::invalid_argument("poisson: mismatched dimensions");
  Observable<R> out(A.dims());
  for (int j = 0; j < A.dims().nc; ++j) {
    out += derivative(A, Var::X, j) * derivative(B, Var::K, j);
    out -= derivative(A, Var::K, j) * derivative(B, Var::X, j);
  }
  return out;
}

/// Quantum bracket (A,B) = (AB - BA) / (i hbar); exact in both rings.
template <class R>
Observable<R> qbracket(const Observable<R>& A, const Observable<R>& B) {
  return (A * B - B * A).div_i_hbar();
}

enum class BracketKind { Quantum, Poisson, StandardHybrid, AndersonHybrid };

template <class R>
Observable<R> bracket(BracketKind kind, const Observable<R>& A,
                      const Observable<R>& B) {
  switch (kind) {
    case BracketKind::Quantum:
      return qbracket(A, B);
    case BracketKind::Poisson:
      return poisson(A, B);
    case BracketKind::StandardHybrid:
      return qbracket(A, B) +
             R::from_rational(Rat(1, 2)) * (poisson(A, B) - poisson(B, A));
    case BracketKind::AndersonHybrid:
      return qbracket(A, B) + poisson(A, B);
  }
  throw std::logic_error("bracket: bad kind");
}

template <class R>
Observable<R> jacobiator(BracketKind kind, const Observable<R>& A,
                         const Observable<R>& B, const Observable<R>& C) {
  return bracket(kind, bracket(kind, A, B), C) +
         bracket(kind, bracket(kind, B, C), A) +
         bracket(kind, bracket(kind, C, A), B);
}

template <class R>
Observable<R> leibniz_defect(BracketKind kind, const Observable<R>& A,
                             const Observable<R>& B, const Observable<R>& H) {
  return bracket(kind, A * B, H) - bracket(kind, A, H) * B -
         A * bracket(kind, B, H);
}

template <class R>
Observable<R> pow(const Observable<R>& A, int n) {
  if (n < 0) throw std::invalid_argument("pow: negative exponent");
  Observable<R> r = Observable<R>::constant(A.dims(), R::one());
  for (int i = 0; i < n; ++i) r = r * A;
  return r;
}

// Ring bridges.

/// Embed an hbar = 1 observable into the formal ring (constants only).
inline Observable<Scalar> to_scalar_ring(const Observable<GaussRat>& A) {
  Observable<Scalar> out(A.dims());
  for (const auto& [m, c] : A.terms()) out.add_term(m, Scalar::from_gauss(c));
  return out;
}

/// Evaluate the formal ring at hbar = 1; requires hbar_c-free coefficients.
inline Observable<GaussRat> at_hbar_one(const Observable<Scalar>& A) {
  Observable<GaussRat> out(A.dims());
  for (const auto& [m, c] : A.terms()) out.add_term(m, c.at_hbar_one());
  return out;
}

inline Observable<Scalar> subst_hbarc_to_hbar(const Observable<Scalar>& A) {
  Observable<Scalar> out(A.dims());
  for (const auto& [m, c] : A.terms()) out.add_term(m, c.subst_hbarc_to_hbar());
  return out;
}

template <class R>
std::string Observable<R>::str() const {
  if (terms_.empty()) return "0";
  // Debug rendering: display order is degree descending, word order within.
  std::vector<const std::pair<const Monomial, R>*> v;
  v.reserve(terms_.size());
  for (const auto& t : terms_) v.push_back(&t);
  std::stable_sort(v.begin(), v.end(), [](auto* a, auto* b) {
    int da = a->first.degree(), db = b->first.degree();
    if (da != db) return da > db;
    return a->first < b->first;
  });
  std::string out;
  for (auto* t : v) {
    if (!out.empty()) out += " + ";
    out += "(" + t->second.str() + ")";
    if (!t->first.is_cnumber()) out += "*" + t->first.str();
  }
  return out;
}

}  // namespace qcmix
