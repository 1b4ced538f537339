#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace qcmix::planewave {

/// Label of a plane-wave basis element exp(i(q_r q + p_r p + x_r x + k_r k)).
struct WaveVector {
  double q = 0, p = 0, x = 0, k = 0;

  friend WaveVector operator+(const WaveVector& a, const WaveVector& b) {
    return {a.q + b.q, a.p + b.p, a.x + b.x, a.k + b.k};
  }
};

struct UV {
  double u = 0, v = 0;
};

/// The two antisymmetric bilinear forms u_rs = p_r q_s - q_r p_s and
/// v_rs = k_r x_s - x_r k_s.
inline UV uv(const WaveVector& r, const WaveVector& s) {
  return {r.p * s.q - r.q * s.p, r.k * s.x - r.x * s.k};
}

/// The structure-function families for plane-wave brackets
/// (e_r, e_s) = F_rs e_{r+s} with F_rs = F(u_rs, v_rs).
struct FKind {
  enum class Tag { Classical, Quantum, StandardS, QuantumQuantum, SineFamily, Linear };
  Tag tag = Tag::Quantum;
  double h = 1.0;  // SineFamily parameter; h = 0 degenerates to Linear

  static FKind classical() { return {Tag::Classical, 0}; }
  static FKind quantum() { return {Tag::Quantum, 0}; }
  static FKind standard_s() { return {Tag::StandardS, 0}; }
  static FKind quantum_quantum() { return {Tag::QuantumQuantum, 0}; }
  static FKind sine_family(double h) { return {Tag::SineFamily, h}; }
  static FKind linear() { return {Tag::Linear, 0}; }

  std::string name() const;
};

double f_eval(const FKind& kind, double u, double v);

/// Cyclic functional Jacobi combination
/// F_rs F_{r+s,t} + F_st F_{s+t,r} + F_tr F_{t+r,s}.
double jacobi_residual(const FKind& kind, const WaveVector& r, const WaveVector& s,
                       const WaveVector& t);

/// f(x) f''(x) + f'(0)^2 - f'(x)^2 for the one-variable generator
/// f(x) = F(x, 0) of the family, with analytic derivatives.
double ode_residual(const FKind& kind, double x);

/// Same combination for an arbitrary callable, derivatives by central
/// differences with step 1e-5.
double ode_residual(const std::function<double(double)>& f, double x);

inline constexpr std::uint64_t kDefaultSeed = 987654321u;

/// n wave vectors with components uniform in [-2, 2], deterministic per seed.
std::vector<WaveVector> random_wavevectors(std::size_t n, std::uint64_t seed);

struct TripleResidual {
  WaveVector r, s, t;
  double residual = 0;  // |jacobi_residual| of the worst triple found
};

/// Scan n random triples and return the one with the largest |residual|.
TripleResidual worst_triple(const FKind& kind, std::size_t n_triples,
                            std::uint64_t seed = kDefaultSeed);

struct PostulateEntry {
  bool linear_member = false;
  double h = 0;      // meaningful when !linear_member
  double err_u = 0;  // sup over u in [-pi, pi] of |F(u,0) - 2 sin(u/2)|
  double err_v = 0;  // sup over v in [-pi, pi] of |F(0,v) - v|
  double max_err() const { return err_u > err_v ? err_u : err_v; }
};

struct PostulateScan {
  std::vector<PostulateEntry> entries;  // one per grid h, plus the Linear member
  std::size_t best_index = 0;           // entry attaining the min of max_err
  double min_max_error = 0;
};

/// How close any member of the sine family (or its linear degeneration) can
/// come to satisfying both boundary postulates F(u,0) = 2 sin(u/2) and
/// F(0,v) = v at once. Deterministic: errors are taken over an evenly spaced
/// sample of [-pi, pi].
PostulateScan postulate_scan(const std::vector<double>& h_grid,
                             std::size_t n_samples = 4097);

/// h in {0.1, 0.2, ..., 2.0}.
std::vector<double> default_h_grid();

}  // namespace qcmix::planewave
