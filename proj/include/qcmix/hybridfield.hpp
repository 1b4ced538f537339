#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace qcmix::hybridfield {

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;

/// Two coupled Euclidean fields with a quadratic action; each carries its own
/// noise strength hbar_i (hbar_1 = hbar_2 recovers the quantum theory,
/// hbar_i = 0 makes field i classical).
struct FieldParams {
  double m1sq = 1;
  double m2sq = 1;
  double g = 0;
  double hbar1 = 1;
  double hbar2 = 1;

  /// Throws std::invalid_argument naming the offending parameter.
  void validate() const;
};

/// M(k) = [[k^2 + m1^2, g], [g, k^2 + m2^2]], positive definite under the
/// parameter invariants.
Mat2 mass_matrix(const FieldParams& p, double ksq);

/// Closed-form hybrid two-point function W(k).
Mat2 propagator(const FieldParams& p, double ksq);

/// Stationary covariance of the per-mode process, from the linear system
/// M C + C M = 2 diag(hbar1, hbar2). Independent oracle for propagator().
Mat2 lyapunov_covariance(const FieldParams& p, double ksq);

struct SpectralData {
  double R = 0;
  double mplussq = 0, mminussq = 0, m3sq = 0;
  Mat2 Qplus = Mat2::Zero(), Qminus = Mat2::Zero(), Q3 = Mat2::Zero();
  bool degenerate = false;  // coincident modes (m1sq == m2sq and g == 0)
};

/// Masses only: R, m+^2, m-^2, m3^2.
SpectralData mass_spectrum(const FieldParams& p);

/// Full spectral decomposition W(k) = Q+/(k^2+m+^2) + Q-/(k^2+m-^2)
/// + Q3/(k^2+m3^2). In the degenerate case the decoupled diagonal residues
/// are returned directly and the flag is set.
SpectralData residues(const FieldParams& p);

struct PositivityVerdict {
  bool positive = true;
  std::string witness_matrix;  // "Q+", "Q-" or "Q3" when not positive
  double eigenvalue = 0;       // the offending negative eigenvalue
  Vec2 eigenvector = Vec2::Zero();
};

/// Positive iff all three residue matrices are positive semidefinite
/// (eigenvalue tolerance -1e-10).
PositivityVerdict reflection_positivity(const FieldParams& p);

struct SimConfig {
  std::vector<double> k_grid;   // k^2 values; empty -> default_k_grid()
  double dtau = 0;              // 0 -> auto from the stability bound
  std::int64_t n_steps = 100000;
  std::int64_t n_burnin = 10000;
  std::uint64_t seed = 1;
};

std::vector<double> default_k_grid();

struct ModeEstimate {
  double ksq = 0;
  Mat2 covariance = Mat2::Zero();
  Mat2 covariance_se = Mat2::Zero();  // batch-means standard error per entry
  Vec2 mean = Vec2::Zero();
  Vec2 mean_se = Vec2::Zero();
};

struct SimResult {
  double dtau = 0;
  std::vector<ModeEstimate> modes;
};

/// Euler-Maruyama integration of dPhi = -M(k) Phi dtau
/// + sqrt(2 diag(hbar1, hbar2)) dW, one independent stream per mode.
/// Deterministic for a fixed seed, independent of evaluation order.
SimResult langevin_simulate(const FieldParams& p, const SimConfig& cfg);

struct GroundStateCheck {
  double value = 0;       // <psi0| A (H - E0) A |psi0>
  double dispersion = 0;  // <A^2> - <A>^2 in the ground state
  bool degenerate_ground_state = false;
  double gap = 0;         // E1 - E0
};

/// Diagonalization-based evaluation of the ground-state positivity bound.
/// H and A must be Hermitian of equal dimension d >= 2.
GroundStateCheck ground_state_check(const Eigen::MatrixXcd& H,
                                    const Eigen::MatrixXcd& A);

}  // namespace qcmix::hybridfield
