#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qcmix/affine.hpp"

namespace qcmix::nogo {

struct MissingEntryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IntegrabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Sector { Mixed, Quantum, Classical, All };

/// All degree-n basis words of the requested sector at dims (1,1), in graded
/// lexicographic order (the word order q < p < x < k).
inline std::vector<Monomial> basis_of_degree(Sector sector, int n) {
  const Dims d{1, 1};
  std::vector<Monomial> out;
  for (int r = n; r >= 0; --r)
    for (int s = n - r; s >= 0; --s)
      for (int t = n - r - s; t >= 0; --t) {
        int l = n - r - s - t;
        bool quantum = t + l == 0, classical = r + s == 0;
        bool keep = false;
        switch (sector) {
          case Sector::Mixed: keep = !quantum && !classical; break;
          case Sector::Quantum: keep = quantum; break;
          case Sector::Classical: keep = classical; break;
          case Sector::All: keep = true; break;
        }
        if (!keep) continue;
        Monomial m(d);
        m.set_exp(Var::Q, 0, static_cast<std::uint16_t>(r));
        m.set_exp(Var::P, 0, static_cast<std::uint16_t>(s));
        m.set_exp(Var::X, 0, static_cast<std::uint16_t>(t));
        m.set_exp(Var::K, 0, static_cast<std::uint16_t>(l));
        out.push_back(std::move(m));
      }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Monomial> mixed_basis(int n) {
  return basis_of_degree(Sector::Mixed, n);
}

/// Recover B from the four target partials dB/dq, dB/dp, dB/dx, dB/dk by
/// iterated antidifferentiation; the result is verified against all four
/// targets, so any non-integrable input is rejected. Constant term is zero.
template <class R>
Observable<R> integrate_gradient(const Observable<R>& dq_t, const Observable<R>& dp_t,
                                 const Observable<R>& dx_t, const Observable<R>& dk_t) {
  const Dims d = dq_t.dims();
  auto filtered = [&](const Observable<R>& src, std::initializer_list<Var> zeroed) {
    Observable<R> out(d);
    for (const auto& [m, c] : src.terms()) {
      bool keep = true;
      for (Var v : zeroed)
        if (m.exp(v, 0) != 0) { keep = false; break; }
      if (keep) out.add_term(m, c);
    }
    return out;
  };
  Observable<R> B = antiderivative(dq_t, Var::Q);
  B += antiderivative(filtered(dp_t - derivative(B, Var::P), {Var::Q}), Var::P);
  B += antiderivative(filtered(dx_t - derivative(B, Var::X), {Var::Q, Var::P}), Var::X);
  B += antiderivative(filtered(dk_t - derivative(B, Var::K), {Var::Q, Var::P, Var::X}), Var::K);
  if (derivative(B, Var::Q) != dq_t || derivative(B, Var::P) != dp_t ||
      derivative(B, Var::X) != dx_t || derivative(B, Var::K) != dk_t)
    throw IntegrabilityError("gradient is not integrable");
  return B;
}

/// Bracket with one pure argument, per the defining axioms: against a purely
/// classical P it is the Poisson bracket, against a purely quantum P the
/// quantum bracket; c-number P gives zero. Extended linearly over unknowns.
template <class R>
AffineObservable<R> axiom_bracket(const AffineObservable<R>& A,
                                  const Observable<R>& P) {
  switch (P.classify()) {
    case Support::CNumber:
      return AffineObservable<R>(A.dims());
    case Support::Classical: {
      AffineObservable<R> out(poisson(A.base, P));
      for (const auto& [id, c] : A.linear) out.add_linear(id, poisson(c, P));
      return out;
    }
    case Support::Quantum: {
      AffineObservable<R> out(qbracket(A.base, P));
      for (const auto& [id, c] : A.linear) out.add_linear(id, qbracket(c, P));
      return out;
    }
    case Support::Mixed:
      break;
  }
  throw std::invalid_argument("axiom_bracket: second argument must be pure");
}

/// reconstruct_from_partials: the inputs are the four bracket values
/// (B,q), (B,p), (B,x), (B,k), so dB/dp = -gq, dB/dq = gp, dB/dk = -gx,
/// dB/dx = gk. Returns the unique polynomial with those partials plus
/// fresh * 1.
template <class R>
AffineObservable<R> reconstruct_from_partials(const AffineObservable<R>& gq,
                                              const AffineObservable<R>& gp,
                                              const AffineObservable<R>& gx,
                                              const AffineObservable<R>& gk,
                                              int fresh_id) {
  const Dims d = gq.dims();
  AffineObservable<R> out(d);
  out.base = integrate_gradient(gp.base, -gq.base, gk.base, -gx.base);
  std::vector<int> ids;
  for (const auto* g : {&gq, &gp, &gx, &gk})
    for (const auto& [id, c] : g->linear) { (void)c; ids.push_back(id); }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  auto part = [&](const AffineObservable<R>& g, int id) {
    auto it = g.linear.find(id);
    return it == g.linear.end() ? Observable<R>(d) : it->second;
  };
  for (int id : ids)
    out.add_linear(id, integrate_gradient(part(gp, id), -part(gq, id),
                                          part(gk, id), -part(gx, id)));
  out.add_linear(fresh_id, Observable<R>::constant(d, R::one()));
  return out;
}

/// Descriptor of a Jacobi triple class such as <M3,Q3,M2>.
struct TripleClassSpec {
  Sector s1; int d1;
  Sector s2; int d2;
  Sector s3; int d3;
};

inline std::string sector_letter(Sector s) {
  switch (s) {
    case Sector::Mixed: return "M";
    case Sector::Quantum: return "Q";
    case Sector::Classical: return "C";
    case Sector::All: return "A";
  }
  return "?";
}

inline std::string class_name(const TripleClassSpec& c) {
  return "<" + sector_letter(c.s1) + std::to_string(c.d1) + "," +
         sector_letter(c.s2) + std::to_string(c.d2) + "," +
         sector_letter(c.s3) + std::to_string(c.d3) + ">";
}

/// One linear equation sum_j coeffs[j] * u_j + constant = 0, tagged with the
/// triple and monomial that produced it.
template <class R>
struct EqRow {
  std::map<int, R> coeffs;
  R constant{};
  std::array<Monomial, 3> triple;
  Monomial monomial;
};

template <class R>
struct LinearSystem {
  std::vector<EqRow<R>> rows;
};

struct SolveResult {
  enum class Kind { Unique, Underdetermined, Inconsistent };
  Kind kind = Kind::Unique;
  std::map<int, GaussRat> assignment;    // meaningful when Unique
  std::vector<int> free_unknowns;        // when Underdetermined
  std::optional<EqRow<GaussRat>> witness;  // when Inconsistent: offending input row
  GaussRat witness_constant;             // its fully reduced form 0 = c
  int rank = 0;
};

/// Exact Gauss-Jordan elimination over the Gaussian rationals. Pivoting is
/// deterministic: rows in input order, pivot on the first unknown (smallest
/// id) with nonzero coefficient.
inline SolveResult exact_solve(const LinearSystem<GaussRat>& sys,
                               const std::vector<int>& unknown_ids) {
  std::map<int, EqRow<GaussRat>> pivots;
  for (const auto& input : sys.rows) {
    EqRow<GaussRat> row = input;
    for (const auto& [pid, prow] : pivots) {
      auto it = row.coeffs.find(pid);
      if (it == row.coeffs.end()) continue;
      GaussRat f = it->second;
      row.coeffs.erase(it);
      for (const auto& [j, c] : prow.coeffs)
        if (j != pid) {
          auto& v = row.coeffs[j];
          v -= f * c;
          if (v.is_zero()) row.coeffs.erase(j);
        }
      row.constant -= f * prow.constant;
    }
    if (row.coeffs.empty()) {
      if (row.constant.is_zero()) continue;
      SolveResult r;
      r.kind = SolveResult::Kind::Inconsistent;
      r.witness = input;
      r.witness_constant = row.constant;
      r.rank = static_cast<int>(pivots.size());
      return r;
    }
    int pid = row.coeffs.begin()->first;
    GaussRat inv = row.coeffs.begin()->second.inverse();
    for (auto& [j, c] : row.coeffs) c *= inv;
    row.constant *= inv;
    row.coeffs[pid] = GaussRat::one();
    for (auto& [qid, prow] : pivots) {
      (void)qid;
      auto it = prow.coeffs.find(pid);
      if (it == prow.coeffs.end()) continue;
      GaussRat f = it->second;
      prow.coeffs.erase(it);
      for (const auto& [j, c] : row.coeffs)
        if (j != pid) {
          auto& v = prow.coeffs[j];
          v -= f * c;
          if (v.is_zero()) prow.coeffs.erase(j);
        }
      prow.constant -= f * row.constant;
    }
    pivots.emplace(pid, std::move(row));
  }

  SolveResult r;
  r.rank = static_cast<int>(pivots.size());
  for (int id : unknown_ids)
    if (!pivots.count(id)) r.free_unknowns.push_back(id);
  if (!r.free_unknowns.empty()) {
    r.kind = SolveResult::Kind::Underdetermined;
    return r;
  }
  r.kind = SolveResult::Kind::Unique;
  for (const auto& [pid, prow] : pivots)
    r.assignment[pid] = -prow.constant;
  return r;
}

/// The partially-unknown bracket table of the induction, together with the
/// bracket evaluator it induces. Entries are stored for ordered mixed pairs
/// (a < b); the pure-argument cases are covered by the axioms and constants
/// bracket to zero, which keeps every evaluation affine in the unknowns.
template <class R>
class InductionContext {
 public:
  using Pair = std::pair<Monomial, Monomial>;

  explicit InductionContext(unsigned shuffle_seed = 0)
      : shuffle_seed_(shuffle_seed) {}

  const Dims& dims() const { return d_; }
  const std::map<Pair, AffineObservable<R>>& entries() const { return entries_; }
  const std::map<int, R>& resolved() const { return resolved_; }
  const std::map<int, Pair>& unknown_pairs() const { return unknown_pair_; }

  std::string unknown_label(int id) const {
    const auto& [a, b] = unknown_pair_.at(id);
    return "c{" + a.str() + "," + b.str() + "}";
  }

  void set_preassigned(std::map<Pair, R> values) {
    preassigned_ = std::move(values);
  }

  std::vector<Monomial> enumerate(Sector s, int n) const {
    auto v = basis_of_degree(s, n);
    if (shuffle_seed_ != 0) {
      std::mt19937 rng(shuffle_seed_ + 1000003u * static_cast<unsigned>(n) +
                       static_cast<unsigned>(s));
      std::shuffle(v.begin(), v.end(), rng);
    }
    return v;
  }

  /// Build all (mixed degree na, mixed degree nb) entries; returns the ids of
  /// the fresh unknowns introduced.
  std::vector<int> build_step(int na, int nb) {
    std::vector<int> fresh;
    auto la = enumerate(Sector::Mixed, na);
    if (na == nb) {
      for (std::size_t i = 0; i < la.size(); ++i)
        for (std::size_t j = i + 1; j < la.size(); ++j)
          build_pair(la[i], la[j], fresh);
    } else {
      auto lb = enumerate(Sector::Mixed, nb);
      for (const auto& a : la)
        for (const auto& b : lb) build_pair(a, b, fresh);
    }
    return fresh;
  }

  /// Bracket of two basis words, resolved through axioms or the table.
  AffineObservable<R> bracket_mono(const Monomial& a, const Monomial& b) {
    const bool am = !a.is_classical() && !a.is_quantum();
    const bool bm = !b.is_classical() && !b.is_quantum();
    if (a.is_cnumber() || b.is_cnumber()) return AffineObservable<R>(d_);
    if (!bm) return axiom_bracket(AffineObservable<R>(mono_obs(a)), mono_obs(b));
    if (!am) return -axiom_bracket(AffineObservable<R>(mono_obs(b)), mono_obs(a));
    if (a == b) return AffineObservable<R>(d_);
    const bool flip = b < a;
    Pair key = flip ? Pair{b, a} : Pair{a, b};
    auto it = entries_.find(key);
    if (it == entries_.end())
      throw MissingEntryError("bracket table entry missing for (" + key.first.str() +
                              ", " + key.second.str() + ")");
    return flip ? -it->second : it->second;
  }

  AffineObservable<R> bracket_obs_mono(const Observable<R>& P, const Monomial& m) {
    AffineObservable<R> out(d_);
    for (const auto& [mi, c] : P.terms()) out += bracket_mono(mi, m).scaled(c);
    return out;
  }

  AffineObservable<R> bracket_affine_mono(const AffineObservable<R>& X,
                                          const Monomial& m) {
    AffineObservable<R> out = bracket_obs_mono(X.base, m);
    for (const auto& [id, coeff] : X.linear) {
      AffineObservable<R> g = bracket_obs_mono(coeff, m);
      if (g.has_unknowns())
        throw AffineClosureError(
            "bracket of an unknown's coefficient introduced new unknowns");
      out.add_linear(id, g.base);
    }
    return out;
  }

  AffineObservable<R> jacobiator_of(const Monomial& a, const Monomial& b,
                                    const Monomial& c) {
    return bracket_affine_mono(bracket_mono(a, b), c) +
           bracket_affine_mono(bracket_mono(b, c), a) +
           bracket_affine_mono(bracket_mono(c, a), b);
  }

  /// Stack one equation per (triple, monomial) over the whole class.
  LinearSystem<R> impose_jacobi(const TripleClassSpec& cls) {
    LinearSystem<R> sys;
    auto l1 = enumerate(cls.s1, cls.d1);
    auto add_triple = [&](const Monomial& A, const Monomial& B, const Monomial& C) {
      AffineObservable<R> J = jacobiator_of(A, B, C);
      std::map<Monomial, EqRow<R>> rows;
      auto row_for = [&](const Monomial& m) -> EqRow<R>& {
        auto it = rows.find(m);
        if (it == rows.end()) {
          EqRow<R> r;
          r.triple = {A, B, C};
          r.monomial = m;
          it = rows.emplace(m, std::move(r)).first;
        }
        return it->second;
      };
      for (const auto& [m, c] : J.base.terms()) row_for(m).constant = c;
      for (const auto& [id, coeff] : J.linear)
        for (const auto& [m, c] : coeff.terms()) row_for(m).coeffs[id] = c;
      for (auto& [m, r] : rows) {
        (void)m;
        sys.rows.push_back(std::move(r));
      }
    };
    if (cls.s1 == cls.s2 && cls.d1 == cls.d2) {
      auto l3 = enumerate(cls.s3, cls.d3);
      for (std::size_t i = 0; i < l1.size(); ++i)
        for (std::size_t j = i + 1; j < l1.size(); ++j)
          for (const auto& C : l3) add_triple(l1[i], l1[j], C);
    } else if (cls.s1 == cls.s3 && cls.d1 == cls.d3) {
      auto l2 = enumerate(cls.s2, cls.d2);
      for (std::size_t i = 0; i < l1.size(); ++i)
        for (std::size_t j = i + 1; j < l1.size(); ++j)
          for (const auto& B : l2) add_triple(l1[i], B, l1[j]);
    } else {
      auto l2 = enumerate(cls.s2, cls.d2);
      auto l3 = enumerate(cls.s3, cls.d3);
      for (const auto& A : l1)
        for (const auto& B : l2)
          for (const auto& C : l3) add_triple(A, B, C);
    }
    return sys;
  }

  /// Substitute solved unknowns into every entry.
  void substitute(const std::map<int, R>& values) {
    for (auto& [key, entry] : entries_) {
      (void)key;
      entry.substitute(values);
    }
    for (const auto& [id, v] : values) resolved_[id] = v;
  }

 private:
  Observable<R> mono_obs(const Monomial& m) const {
    return Observable<R>::from_monomial(d_, m, R::one());
  }

  Observable<R> letter_axiom(const Monomial& a, Var xi) const {
    Observable<R> A = mono_obs(a);
    Observable<R> L = Observable<R>::variable(d_, xi);
    if (xi == Var::Q || xi == Var::P) return qbracket(A, L);
    return poisson(A, L);
  }

  void build_pair(const Monomial& a0, const Monomial& b0, std::vector<int>& fresh) {
    const Monomial& a = std::min(a0, b0);
    const Monomial& b = std::max(a0, b0);
    Pair key{a, b};
    if (entries_.count(key)) return;
    // ((a,b),xi) = ((a,xi),b) + (a,(b,xi)) for each letter xi.
    std::array<AffineObservable<R>, 4> g = {
        AffineObservable<R>(d_), AffineObservable<R>(d_),
        AffineObservable<R>(d_), AffineObservable<R>(d_)};
    const Var letters[4] = {Var::Q, Var::P, Var::X, Var::K};
    for (int li = 0; li < 4; ++li) {
      Observable<R> a_xi = letter_axiom(a, letters[li]);
      Observable<R> b_xi = letter_axiom(b, letters[li]);
      AffineObservable<R> t1 = bracket_obs_mono(a_xi, b);
      AffineObservable<R> t2(d_);
      for (const auto& [mi, c] : b_xi.terms())
        t2 += bracket_mono(a, mi).scaled(c);
      g[li] = t1 + t2;
    }
    AffineObservable<R> entry(d_);
    entry.base = integrate_gradient(g[1].base, -g[0].base, g[3].base, -g[2].base);
    std::vector<int> ids;
    for (const auto& gi : g)
      for (const auto& [id, c] : gi.linear) { (void)c; ids.push_back(id); }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    auto part = [&](const AffineObservable<R>& gi, int id) {
      auto it = gi.linear.find(id);
      return it == gi.linear.end() ? Observable<R>(d_) : it->second;
    };
    for (int id : ids)
      entry.add_linear(id, integrate_gradient(part(g[1], id), -part(g[0], id),
                                              part(g[3], id), -part(g[2], id)));
    auto pre = preassigned_.find(key);
    if (pre != preassigned_.end()) {
      entry.base += Observable<R>::constant(d_, pre->second);
    } else {
      int id = next_id_++;
      unknown_pair_.emplace(id, key);
      entry.add_linear(id, Observable<R>::constant(d_, R::one()));
      fresh.push_back(id);
    }
    entries_.emplace(std::move(key), std::move(entry));
  }

  Dims d_{1, 1};
  std::map<Pair, AffineObservable<R>> entries_;
  std::map<int, Pair> unknown_pair_;
  std::map<Pair, R> preassigned_;
  std::map<int, R> resolved_;
  unsigned shuffle_seed_ = 0;
  int next_id_ = 0;
};

// --- verification driver ---

struct UnknownValue {
  int id;
  std::string label;
  std::string value;  // canonical coefficient text at hbar = 1
};

struct StepRecord {
  int step = 0;
  std::string pair_class;
  std::string solve_classes;
  int unknown_count = 0;
  std::string outcome;  // Unique | Underdetermined | Inconsistent
  int rank = 0;
  std::vector<UnknownValue> assignment;
  bool matches_standard = false;
  std::string check_class;
  bool check_passed = false;
};

struct Certificate {
  std::string a, b, c;            // witness triple
  std::string monomial;           // first monomial with nonzero residual
  std::string value;              // its coefficient at hbar = 1
  std::string residual;           // full jacobiator at hbar = 1
  std::string residual_symbolic;  // same witness re-derived with formal hbar
};

struct NoGoReport {
  int steps_requested = 0;
  std::vector<StepRecord> steps;
  std::optional<Certificate> certificate;
  bool reproduced = false;
  std::string verdict;
};

/// Run the staged verification: unknown counts 6/48/100/66, unique solves and
/// passing consistency checks through step 3, and at depth 4 the certified
/// Jacobi inconsistency.
NoGoReport run_verification(int steps);

}  // namespace qcmix::nogo
