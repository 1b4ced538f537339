#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

#include <boost/container/small_vector.hpp>

namespace qcmix {

/// Degrees of freedom of the hybrid system: nq quantum pairs (q_i, p_i) and
/// nc classical pairs (x_j, k_j).
struct Dims {
  int nq = 1;
  int nc = 1;
  friend bool operator==(const Dims& a, const Dims& b) {
    return a.nq == b.nq && a.nc == b.nc;
  }
  friend bool operator!=(const Dims& a, const Dims& b) { return !(a == b); }
};

enum class Var : std::uint8_t { Q, P, X, K };

/// A word in canonical order q...p...x...k..., stored as the exponent vector
/// [r_0..r_{nq-1}, s_0..s_{nq-1}, t_0..t_{nc-1}, l_0..l_{nc-1}].
///
/// Monomials of a given degree are ordered degree-first, then by exponent
/// vector with the lexicographically greater word first; that reproduces the
/// word order q < p < x < k (q*x before q*k before p*x and so on).
class Monomial {
 public:
  using Exps = boost::container::small_vector<std::uint16_t, 8>;

  Monomial() = default;
  explicit Monomial(Dims d)
      : nq_(static_cast<std::uint16_t>(d.nq)),
        exps_(static_cast<std::size_t>(2 * d.nq + 2 * d.nc), 0) {}

  static Monomial variable(Dims d, Var v, int index) {
    Monomial m(d);
    m.exp_ref(v, index, d) = 1;
    return m;
  }

  int nq() const { return nq_; }
  int nc() const { return (static_cast<int>(exps_.size()) - 2 * nq_) / 2; }

  std::uint16_t r(int i) const { return exps_[i]; }
  std::uint16_t s(int i) const { return exps_[nq_ + i]; }
  std::uint16_t t(int j) const { return exps_[2 * nq_ + j]; }
  std::uint16_t l(int j) const { return exps_[2 * nq_ + nc() + j]; }

  std::uint16_t exp(Var v, int index) const {
    return exps_[slot(v, index)];
  }
  void set_exp(Var v, int index, std::uint16_t e) { exps_[slot(v, index)] = e; }

  const Exps& exps() const { return exps_; }
  Exps& exps() { return exps_; }

  int degree() const {
    return std::accumulate(exps_.begin(), exps_.end(), 0);
  }
  int quantum_degree() const {
    return std::accumulate(exps_.begin(), exps_.begin() + 2 * nq_, 0);
  }
  int classical_degree() const {
    return std::accumulate(exps_.begin() + 2 * nq_, exps_.end(), 0);
  }

  bool is_cnumber() const { return degree() == 0; }
  bool is_classical() const { return quantum_degree() == 0; }
  bool is_quantum() const { return classical_degree() == 0; }

  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.nq_ == b.nq_ && a.exps_ == b.exps_;
  }
  friend bool operator!=(const Monomial& a, const Monomial& b) {
    return !(a == b);
  }

  /// Canonical order: total degree first, then greater exponent word first.
  friend bool operator<(const Monomial& a, const Monomial& b) {
    int da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    return std::lexicographical_compare(b.exps_.begin(), b.exps_.end(),
                                        a.exps_.begin(), a.exps_.end());
  }

  std::string str() const;

 private:
  std::size_t slot(Var v, int index) const {
    int n_c = nc();
    switch (v) {
      case Var::Q: check(index, nq_); return index;
      case Var::P: check(index, nq_); return nq_ + index;
      case Var::X: check(index, n_c); return 2 * nq_ + index;
      case Var::K: check(index, n_c); return 2 * nq_ + n_c + index;
    }
    throw std::logic_error("Monomial: bad variable tag");
  }
  std::uint16_t& exp_ref(Var v, int index, Dims) { return exps_[slot(v, index)]; }
  static void check(int index, int bound) {
    if (index < 0 || index >= bound)
      throw std::out_of_range("Monomial: variable index out of range");
  }

  std::uint16_t nq_ = 0;
  Exps exps_;
};

inline std::string Monomial::str() const {
  std::string out;
  auto emit = [&](const char* name, int index, int count, int e) {
    if (e == 0) return;
    if (!out.empty()) out += "*";
    out += name;
    if (count > 1) out += std::to_string(index + 1);
    if (e > 1) { out += "^"; out += std::to_string(e); }
  };
  int n_c = nc();
  for (int i = 0; i < nq_; ++i) emit("q", i, nq_, r(i));
  for (int i = 0; i < nq_; ++i) emit("p", i, nq_, s(i));
  for (int j = 0; j < n_c; ++j) emit("x", j, n_c, t(j));
  for (int j = 0; j < n_c; ++j) emit("k", j, n_c, l(j));
  if (out.empty()) out = "1";
  return out;
}

}  // namespace qcmix
