#include "qcmix/hybridfield.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace qcmix::hybridfield {

void FieldParams::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(m1sq) || m1sq <= 0) throw std::invalid_argument("m1sq must be positive");
  if (!finite(m2sq) || m2sq <= 0) throw std::invalid_argument("m2sq must be positive");
  if (!finite(g)) throw std::invalid_argument("g must be finite");
  if (m1sq * m2sq <= g * g)
    throw std::invalid_argument("g too large: m1sq*m2sq must exceed g^2");
  if (!finite(hbar1) || hbar1 < 0) throw std::invalid_argument("hbar1 must be nonnegative");
  if (!finite(hbar2) || hbar2 < 0) throw std::invalid_argument("hbar2 must be nonnegative");
}

Mat2 mass_matrix(const FieldParams& p, double ksq) {
  Mat2 m;
  m << ksq + p.m1sq, p.g, p.g, ksq + p.m2sq;
  return m;
}

Mat2 propagator(const FieldParams& p, double ksq) {
  const double a = ksq + p.m1sq, b = ksq + p.m2sq;
  Mat2 wq = mass_matrix(p, ksq).inverse();
  Mat2 sz;
  sz << 1, 0, 0, -1;
  return (p.hbar2 * a + p.hbar1 * b) / (a + b) * wq + (p.hbar1 - p.hbar2) / (a + b) * sz;
}

Mat2 lyapunov_covariance(const FieldParams& p, double ksq) {
  const Mat2 m = mass_matrix(p, ksq);
  // Unknowns (c11, c12, c22); rows are the 11, 12 and 22 components of
  // M C + C M = 2 diag(hbar1, hbar2).
  Eigen::Matrix3d sys;
  sys << 2 * m(0, 0), 2 * m(0, 1), 0,
         m(0, 1), m(0, 0) + m(1, 1), m(0, 1),
         0, 2 * m(0, 1), 2 * m(1, 1);
  Eigen::Vector3d rhs(2 * p.hbar1, 0, 2 * p.hbar2);
  Eigen::Vector3d c = sys.colPivHouseholderQr().solve(rhs);
  Mat2 out;
  out << c(0), c(1), c(1), c(2);
  return out;
}

SpectralData mass_spectrum(const FieldParams& p) {
  SpectralData s;
  const double d = p.m1sq - p.m2sq;
  s.R = std::sqrt(d * d + 4 * p.g * p.g);
  s.m3sq = (p.m1sq + p.m2sq) / 2;
  s.mplussq = s.m3sq + s.R / 2;
  s.mminussq = s.m3sq - s.R / 2;
  s.degenerate = s.R == 0;
  return s;
}

SpectralData residues(const FieldParams& p) {
  SpectralData s = mass_spectrum(p);
  if (s.degenerate) {
    // Coincident modes: the theory is two decoupled fields of equal mass.
    s.Qplus << p.hbar1, 0, 0, 0;
    s.Qminus << 0, 0, 0, p.hbar2;
    s.Q3.setZero();
    return s;
  }
  Mat2 m0 = mass_matrix(p, 0);
  Mat2 pplus = (m0 - s.mminussq * Mat2::Identity()) / s.R;  // spectral projector
  Mat2 pminus = Mat2::Identity() - pplus;
  const double half_sum = (p.hbar1 + p.hbar2) / 2;
  const double skew = (p.hbar1 - p.hbar2) * (p.m1sq - p.m2sq) / (2 * s.R);
  s.Qplus = (half_sum + skew) * pplus;
  s.Qminus = (half_sum - skew) * pminus;
  Mat2 sz;
  sz << 1, 0, 0, -1;
  s.Q3 = (p.hbar1 - p.hbar2) / 2 *
         (sz - (p.m1sq - p.m2sq) / s.R * (pplus - pminus));
  return s;
}

PositivityVerdict reflection_positivity(const FieldParams& p) {
  SpectralData s = residues(p);
  PositivityVerdict v;
  const struct {
    const char* name;
    const Mat2* q;
  } candidates[] = {{"Q+", &s.Qplus}, {"Q-", &s.Qminus}, {"Q3", &s.Q3}};
  for (const auto& c : candidates) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(*c.q);
    if (es.eigenvalues()(0) < -1e-10) {
      v.positive = false;
      v.witness_matrix = c.name;
      v.eigenvalue = es.eigenvalues()(0);
      v.eigenvector = es.eigenvectors().col(0);
      return v;
    }
  }
  return v;
}

std::vector<double> default_k_grid() {
  return {0.0, 0.25, 0.5, 1.0, 1.5, 2.5, 4.0, 6.0, 9.0, 12.5, 16.0, 25.0};
}

SimResult langevin_simulate(const FieldParams& p, const SimConfig& cfg) {
  p.validate();
  std::vector<double> grid = cfg.k_grid.empty() ? default_k_grid() : cfg.k_grid;
  double kmax = 0;
  for (double k : grid) {
    if (!std::isfinite(k) || k < 0) throw std::invalid_argument("k_grid entries must be nonnegative");
    if (k > kmax) kmax = k;
  }
  // The discretization bias of the sampled covariance is ~ dtau*lambda/2
  // relative, so the default step keeps it well under the statistical error.
  const double lambda_max = kmax + mass_spectrum(p).mplussq;
  double dtau = cfg.dtau;
  if (dtau == 0) dtau = 0.05 / lambda_max;
  if (!(dtau > 0) || dtau >= 1 / lambda_max)
    throw std::invalid_argument("dtau violates the stability bound 1/(k2max + m+^2)");
  if (cfg.n_steps <= cfg.n_burnin)
    throw std::invalid_argument("n_steps must exceed n_burnin");

  SimResult result;
  result.dtau = dtau;
  result.modes.resize(grid.size());

  for (std::size_t mode = 0; mode < grid.size(); ++mode) {
    const double ksq = grid[mode];
    const Mat2 m = mass_matrix(p, ksq);
    const double amp1 = std::sqrt(2 * p.hbar1 * dtau);
    const double amp2 = std::sqrt(2 * p.hbar2 * dtau);
    std::mt19937_64 rng(cfg.seed + 0x9E3779B97F4A7C15ull * (mode + 1));
    std::normal_distribution<double> gauss(0.0, 1.0);

    const std::int64_t horizon = cfg.n_steps - cfg.n_burnin;
    const int n_batches = static_cast<int>(std::min<std::int64_t>(50, horizon));
    const std::int64_t batch_len = horizon / n_batches;
    const std::int64_t used = batch_len * n_batches;

    Vec2 phi = Vec2::Zero();
    // batch accumulators: mean of phi and of the three covariance entries
    std::vector<Eigen::Matrix<double, 5, 1>> batches(
        n_batches, Eigen::Matrix<double, 5, 1>::Zero());
    std::int64_t kept = 0;
    for (std::int64_t step = 0; step < cfg.n_steps; ++step) {
      phi += -dtau * (m * phi) + Vec2(amp1 * gauss(rng), amp2 * gauss(rng));
      if (step < cfg.n_burnin) continue;
      if (kept >= used) break;
      auto& acc = batches[kept / batch_len];
      acc(0) += phi(0);
      acc(1) += phi(1);
      acc(2) += phi(0) * phi(0);
      acc(3) += phi(0) * phi(1);
      acc(4) += phi(1) * phi(1);
      ++kept;
    }
    for (auto& acc : batches) acc /= static_cast<double>(batch_len);

    Eigen::Matrix<double, 5, 1> mean = Eigen::Matrix<double, 5, 1>::Zero();
    for (const auto& acc : batches) mean += acc;
    mean /= n_batches;
    Eigen::Matrix<double, 5, 1> var = Eigen::Matrix<double, 5, 1>::Zero();
    for (const auto& acc : batches) {
      Eigen::Matrix<double, 5, 1> d = acc - mean;
      var += d.cwiseProduct(d);
    }
    Eigen::Matrix<double, 5, 1> se = Eigen::Matrix<double, 5, 1>::Zero();
    if (n_batches > 1)
      se = (var / (n_batches - 1)).cwiseSqrt() / std::sqrt(double(n_batches));

    ModeEstimate& est = result.modes[mode];
    est.ksq = ksq;
    est.mean = Vec2(mean(0), mean(1));
    est.mean_se = Vec2(se(0), se(1));
    est.covariance << mean(2), mean(3), mean(3), mean(4);
    est.covariance_se << se(2), se(3), se(3), se(4);
  }
  return result;
}

GroundStateCheck ground_state_check(const Eigen::MatrixXcd& H,
                                    const Eigen::MatrixXcd& A) {
  const Eigen::Index d = H.rows();
  if (d < 2 || H.cols() != d) throw std::invalid_argument("H must be square with d >= 2");
  if (A.rows() != d || A.cols() != d)
    throw std::invalid_argument("A must match the dimension of H");
  const double scale_h = std::max(1.0, H.cwiseAbs().maxCoeff());
  const double scale_a = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((H - H.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale_h)
    throw std::invalid_argument("H must be Hermitian");
  if ((A - A.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale_a)
    throw std::invalid_argument("A must be Hermitian");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  const auto& evals = es.eigenvalues();
  const double e0 = evals(0);
  Eigen::VectorXcd psi0 = es.eigenvectors().col(0);

  GroundStateCheck out;
  out.gap = evals(1) - e0;
  const double spread = std::max(1.0, std::fabs(evals(d - 1) - e0));
  out.degenerate_ground_state = out.gap <= 1e-9 * spread;

  Eigen::VectorXcd apsi = A * psi0;
  out.value = ((apsi.adjoint() * (H * apsi)).value() -
               std::complex<double>(e0) * (apsi.adjoint() * apsi).value())
                  .real();
  const double mean_a = (psi0.adjoint() * apsi).value().real();
  const double mean_a2 = (apsi.adjoint() * apsi).value().real();
  out.dispersion = mean_a2 - mean_a * mean_a;
  return out;
}

}  // namespace qcmix::hybridfield
