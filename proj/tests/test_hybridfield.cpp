#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <qcmix/hybridfield.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

using namespace qcmix::hybridfield;

namespace {

// Admissible random parameter sets: positive masses, |g| below the coupling
// bound, nonnegative temperatures.
FieldParams random_params(std::mt19937_64& rng, bool allow_zero_hbar = true) {
  std::uniform_real_distribution<double> mass(0.5, 5.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  FieldParams p;
  p.m1sq = mass(rng);
  p.m2sq = mass(rng);
  p.g = (2.0 * unit(rng) - 1.0) * 0.9 * std::sqrt(p.m1sq * p.m2sq);
  p.hbar1 = 2.0 * unit(rng);
  p.hbar2 = 2.0 * unit(rng);
  if (!allow_zero_hbar) {
    p.hbar1 += 0.1;
    p.hbar2 += 0.1;
  }
  return p;
}

Eigen::MatrixXcd random_hermitian(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd b(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) b(i, j) = std::complex<double>(gauss(rng), gauss(rng));
  return 0.5 * (b + b.adjoint().eval());
}

double max_abs_diff(const Mat2& a, const Mat2& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("parameter validation rejects inadmissible sets") {
  FieldParams p;
  CHECK_NOTHROW(p.validate());
  p.m1sq = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.m1sq = 1.0;
  p.m2sq = -2.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.m2sq = 4.0;
  p.g = 2.0;  // g^2 = m1sq*m2sq: borderline is rejected too
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.g = 1.9;
  CHECK_NOTHROW(p.validate());
  p.hbar1 = -0.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("mass spectrum: exact eigenvalues and the midpoint mass") {
  FieldParams p;
  p.m1sq = 1.0;
  p.m2sq = 4.0;
  p.g = 0.0;
  SpectralData s = mass_spectrum(p);
  CHECK(s.R == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(s.mplussq == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(s.mminussq == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.m3sq == doctest::Approx(2.5).epsilon(1e-14));
  CHECK_FALSE(s.degenerate);

  // Equal masses split symmetrically by the coupling.
  p.m1sq = p.m2sq = 2.0;
  p.g = 0.7;
  s = mass_spectrum(p);
  CHECK(s.R == doctest::Approx(1.4).epsilon(1e-14));
  CHECK(s.mplussq == doctest::Approx(2.7).epsilon(1e-14));
  CHECK(s.mminussq == doctest::Approx(1.3).epsilon(1e-14));

  // The third mass always sits halfway between the eigenvalues.
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 50; ++trial) {
    FieldParams q = random_params(rng);
    s = mass_spectrum(q);
    CHECK(s.m3sq == doctest::Approx(0.5 * (s.mplussq + s.mminussq)).epsilon(1e-12));
    CHECK(s.mplussq >= s.mminussq);
    CHECK(s.mminussq > 0.0);  // admissible parameters keep the spectrum positive
  }
}

TEST_CASE("equilibrium covariance: limiting cases and a pinned value") {
  FieldParams p;
  p.m1sq = 1.0;
  p.m2sq = 4.0;
  p.g = 1.0;

  // Equal temperatures reduce to hbar * M^{-1}.
  p.hbar1 = p.hbar2 = 1.0;
  Mat2 m = mass_matrix(p, 0.0);
  CHECK(max_abs_diff(propagator(p, 0.0), m.inverse()) < 1e-14);

  // Zero temperatures give the zero matrix.
  p.hbar1 = p.hbar2 = 0.0;
  CHECK(propagator(p, 2.0).cwiseAbs().maxCoeff() < 1e-15);

  // Mixed temperatures at k^2 = 0: exact rational entries.
  p.hbar1 = 1.0;
  p.hbar2 = 0.0;
  Mat2 w = propagator(p, 0.0);
  CHECK(w(0, 0) == doctest::Approx(19.0 / 15.0).epsilon(1e-14));
  CHECK(w(0, 1) == doctest::Approx(-4.0 / 15.0).epsilon(1e-14));
  CHECK(w(1, 0) == doctest::Approx(-4.0 / 15.0).epsilon(1e-14));
  CHECK(w(1, 1) == doctest::Approx(1.0 / 15.0).epsilon(1e-14));
}

TEST_CASE("equilibrium covariance is symmetric positive semidefinite") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ks(0.0, 9.0);
  for (int trial = 0; trial < 200; ++trial) {
    FieldParams p = random_params(rng);
    double ksq = ks(rng);
    Mat2 w = propagator(p, ksq);
    CHECK(std::abs(w(0, 1) - w(1, 0)) < 1e-13);
    Eigen::SelfAdjointEigenSolver<Mat2> es(w);
    CHECK(es.eigenvalues()(0) >= -1e-12);
  }
}

TEST_CASE("stationarity equation: direct solve matches the closed form") {
  // The closed form must satisfy M C + C M = 2 diag(hbar1, hbar2); the
  // Lyapunov solver inverts that equation independently.
  FieldParams p;
  p.m1sq = 1.0;
  p.m2sq = 4.0;
  p.g = 1.0;
  p.hbar1 = 1.0;
  p.hbar2 = 0.0;
  Mat2 c = lyapunov_covariance(p, 0.0);
  Mat2 m = mass_matrix(p, 0.0);
  Mat2 rhs = m * c + c * m;
  CHECK(rhs(0, 0) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(std::abs(rhs(0, 1)) < 1e-13);
  CHECK(std::abs(rhs(1, 1)) < 1e-13);

  // Decoupled fields: diagonal covariance hbar_i / (k^2 + m_i^2).
  p.g = 0.0;
  p.hbar2 = 2.0;
  Mat2 d = lyapunov_covariance(p, 3.0);
  CHECK(d(0, 0) == doctest::Approx(1.0 / 4.0).epsilon(1e-13));
  CHECK(d(1, 1) == doctest::Approx(2.0 / 7.0).epsilon(1e-13));
  CHECK(std::abs(d(0, 1)) < 1e-14);

  std::mt19937_64 rng(2024);
  std::vector<double> grid;
  for (int i = 0; i < 50; ++i) grid.push_back(0.25 * i);
  for (int trial = 0; trial < 20; ++trial) {
    FieldParams q = random_params(rng);
    for (double ksq : grid)
      CHECK(max_abs_diff(lyapunov_covariance(q, ksq), propagator(q, ksq)) < 1e-12);
  }
}

TEST_CASE("spectral residues: sum rule, tracelessness, reconstruction") {
  std::mt19937_64 rng(5150);
  std::uniform_real_distribution<double> ks(0.0, 6.0);
  for (int trial = 0; trial < 100; ++trial) {
    FieldParams p = random_params(rng);
    SpectralData s = residues(p);
    REQUIRE_FALSE(s.degenerate);

    // Residues add up to the decoupled high-k limit.
    Mat2 sum = s.Qplus + s.Qminus + s.Q3;
    CHECK(sum(0, 0) == doctest::Approx(p.hbar1).epsilon(1e-12));
    CHECK(sum(1, 1) == doctest::Approx(p.hbar2).epsilon(1e-12));
    CHECK(std::abs(sum(0, 1)) < 1e-12);

    // The third pole carries no trace.
    CHECK(std::abs(s.Q3.trace()) < 1e-12);

    // Pole decomposition reproduces the covariance at arbitrary k^2.
    double ksq = ks(rng);
    Mat2 rebuilt = s.Qplus / (ksq + s.mplussq) + s.Qminus / (ksq + s.mminussq) +
                   s.Q3 / (ksq + s.m3sq);
    CHECK(max_abs_diff(rebuilt, propagator(p, ksq)) < 1e-12);
  }
}

TEST_CASE("spectral residues: equal temperatures kill the third pole") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    FieldParams p = random_params(rng);
    p.hbar2 = p.hbar1;
    SpectralData s = residues(p);
    CHECK(s.Q3.cwiseAbs().maxCoeff() < 1e-12);
    // Both remaining residues become hbar times a projector: idempotent after
    // rescaling, hence PSD with eigenvalues {0, hbar}.
    if (p.hbar1 > 1e-9) {
      Mat2 proj = s.Qplus / p.hbar1;
      CHECK(max_abs_diff(proj * proj, proj) < 1e-10);
    }
  }
}

TEST_CASE("spectral residues: decoupled degenerate point") {
  FieldParams p;
  p.m1sq = p.m2sq = 2.0;
  p.g = 0.0;
  p.hbar1 = 1.0;
  p.hbar2 = 0.5;
  SpectralData s = residues(p);
  CHECK(s.degenerate);
  CHECK(s.R == 0.0);
  CHECK(max_abs_diff(s.Qplus, Vec2(p.hbar1, 0.0).asDiagonal()) < 1e-14);
  CHECK(max_abs_diff(s.Qminus, Vec2(0.0, p.hbar2).asDiagonal()) < 1e-14);
  CHECK(s.Q3.cwiseAbs().maxCoeff() == 0.0);
  // Reconstruction still holds: two identical poles.
  Mat2 rebuilt = s.Qplus / (1.0 + s.mplussq) + s.Qminus / (1.0 + s.mminussq);
  CHECK(max_abs_diff(rebuilt, propagator(p, 1.0)) < 1e-13);
}

TEST_CASE("positivity verdicts on the coupled two-temperature family") {
  FieldParams p;
  p.m1sq = 1.0;
  p.m2sq = 4.0;
  p.g = 1.0;
  p.hbar1 = 1.0;
  p.hbar2 = 0.0;
  PositivityVerdict v = reflection_positivity(p);
  CHECK_FALSE(v.positive);
  CHECK(v.witness_matrix == "Q3");
  CHECK(v.eigenvalue < -1e-6);
  // The witness vector actually exhibits the negative direction.
  SpectralData s = residues(p);
  double quad = v.eigenvector.dot(s.Q3 * v.eigenvector);
  CHECK(quad == doctest::Approx(v.eigenvalue).epsilon(1e-9));

  p.hbar2 = 1.0;  // equal temperatures
  v = reflection_positivity(p);
  CHECK(v.positive);

  p.hbar2 = 0.0;
  p.g = 0.0;  // decoupled
  v = reflection_positivity(p);
  CHECK(v.positive);
}

TEST_CASE("positivity boundary: exactly the decoupled or equal-temperature sets") {
  // Sweep a parameter grid; positivity must hold precisely when the
  // temperatures agree or the coupling vanishes.
  const double hbars[] = {0.0, 0.5, 1.0};
  const double gs[] = {-1.0, 0.0, 1.0};
  const double masses[][2] = {{1.0, 4.0}, {2.0, 2.0}, {1.5, 3.0}};
  for (auto& mm : masses)
    for (double h1 : hbars)
      for (double h2 : hbars)
        for (double g : gs) {
          FieldParams p;
          p.m1sq = mm[0];
          p.m2sq = mm[1];
          p.g = g;
          p.hbar1 = h1;
          p.hbar2 = h2;
          bool expect = (h1 == h2) || (g == 0.0);
          CAPTURE(mm[0]);
          CAPTURE(mm[1]);
          CAPTURE(h1);
          CAPTURE(h2);
          CAPTURE(g);
          CHECK(reflection_positivity(p).positive == expect);
        }
}

TEST_CASE("langevin sampler: zero temperature stays exactly at the origin") {
  FieldParams p;
  p.m1sq = 1.0;
  p.m2sq = 4.0;
  p.g = 1.0;
  p.hbar1 = 0.0;
  p.hbar2 = 0.0;
  SimConfig cfg;
  cfg.n_steps = 2000;
  cfg.n_burnin = 500;
  SimResult r = langevin_simulate(p, cfg);
  for (const ModeEstimate& m : r.modes) {
    CHECK(m.covariance.cwiseAbs().maxCoeff() == 0.0);
    CHECK(m.mean.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("langevin sampler: estimates agree with the covariance formula") {
  FieldParams p;
  p.m1sq = 1.0;
  p.m2sq = 4.0;
  p.g = 1.0;
  p.hbar1 = 1.0;
  p.hbar2 = 0.0;
  SimConfig cfg;
  cfg.seed = 7;
  SimResult r = langevin_simulate(p, cfg);
  REQUIRE(r.modes.size() == default_k_grid().size());

  int pairs = 0;
  int within = 0;
  for (const ModeEstimate& m : r.modes) {
    Mat2 w = propagator(p, m.ksq);
    const int idx[3][2] = {{0, 0}, {0, 1}, {1, 1}};
    for (auto& ij : idx) {
      double err = std::abs(m.covariance(ij[0], ij[1]) - w(ij[0], ij[1]));
      double se = m.covariance_se(ij[0], ij[1]);
      REQUIRE(se > 0.0);
      ++pairs;
      if (err <= 4.0 * se) ++within;
    }
    // Means vanish in equilibrium.
    for (int i = 0; i < 2; ++i)
      CHECK(std::abs(m.mean(i)) <= 4.0 * m.mean_se(i));
  }
  // At least 95% of (entry, mode) pairs inside the 4-sigma band.
  CHECK(within * 100 >= pairs * 95);
}

TEST_CASE("langevin sampler: determinism and error scaling") {
  FieldParams p;
  p.m1sq = 1.5;
  p.m2sq = 3.0;
  p.g = 0.5;
  p.hbar1 = 1.0;
  p.hbar2 = 0.5;
  SimConfig cfg;
  cfg.seed = 42;
  cfg.k_grid = {0.0, 1.0, 4.0};
  cfg.n_steps = 50000;
  cfg.n_burnin = 5000;

  SimResult a = langevin_simulate(p, cfg);
  SimResult b = langevin_simulate(p, cfg);
  for (size_t i = 0; i < a.modes.size(); ++i) {
    CHECK(a.modes[i].covariance == b.modes[i].covariance);
    CHECK(a.modes[i].mean == b.modes[i].mean);
  }

  // Doubling the post-burnin horizon shrinks the standard errors by about
  // sqrt(2); averaged over entries the ratio lands in a loose band.
  SimConfig cfg2 = cfg;
  cfg2.n_steps = 95000;  // post-burnin horizon exactly doubles
  SimResult c = langevin_simulate(p, cfg2);
  double ratio_sum = 0.0;
  int ratio_count = 0;
  for (size_t i = 0; i < a.modes.size(); ++i) {
    const int idx[3][2] = {{0, 0}, {0, 1}, {1, 1}};
    for (auto& ij : idx) {
      double s1 = a.modes[i].covariance_se(ij[0], ij[1]);
      double s2 = c.modes[i].covariance_se(ij[0], ij[1]);
      REQUIRE(s2 > 0.0);
      ratio_sum += s1 / s2;
      ++ratio_count;
    }
  }
  double mean_ratio = ratio_sum / ratio_count;
  CHECK(mean_ratio > 1.2);
  CHECK(mean_ratio < 1.7);
}

TEST_CASE("langevin sampler: configuration errors") {
  FieldParams p;
  p.m1sq = 1.0;
  p.m2sq = 4.0;

  SimConfig cfg;
  cfg.dtau = 1.0;  // violates dtau < 1/(k2max + m+^2) on the default grid
  CHECK_THROWS_AS(langevin_simulate(p, cfg), std::invalid_argument);

  cfg.dtau = 0.0;
  cfg.n_steps = 100;
  cfg.n_burnin = 100;
  CHECK_THROWS_AS(langevin_simulate(p, cfg), std::invalid_argument);

  cfg = SimConfig{};
  cfg.k_grid = {1.0, -0.5};
  CHECK_THROWS_AS(langevin_simulate(p, cfg), std::invalid_argument);
}

TEST_CASE("ground state functional: exact zeros") {
  std::mt19937_64 rng(808);
  for (int trial = 0; trial < 20; ++trial) {
    int d = 2 + int(rng() % 7);
    Eigen::MatrixXcd h = random_hermitian(rng, d);
    // A = identity: the state is untouched, the energy gain is zero.
    GroundStateCheck c = ground_state_check(h, Eigen::MatrixXcd::Identity(d, d));
    CHECK(std::abs(c.value) < 1e-10);
    CHECK(c.dispersion < 1e-10);
    // A = H: the ground state is an eigenvector of A, again no gain.
    c = ground_state_check(h, h);
    CHECK(std::abs(c.value) < 1e-8);
    CHECK(c.dispersion < 1e-8);
  }
}

TEST_CASE("ground state functional: nonnegativity and the dispersion link") {
  std::mt19937_64 rng(909);
  for (int trial = 0; trial < 300; ++trial) {
    int d = 2 + int(rng() % 7);
    Eigen::MatrixXcd h = random_hermitian(rng, d);
    Eigen::MatrixXcd a = random_hermitian(rng, d);
    GroundStateCheck c = ground_state_check(h, a);
    CHECK(c.value >= -1e-10);
    if (!c.degenerate_ground_state) {
      // Zero gain forces A|psi0> parallel to |psi0>, hence zero dispersion.
      bool zero_value = c.value < 1e-10;
      bool zero_disp = c.dispersion < 1e-8;
      CAPTURE(c.value);
      CAPTURE(c.dispersion);
      CHECK(zero_value == zero_disp);
    }
  }
}

TEST_CASE("ground state functional: degeneracy flag and input validation") {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(3, 3);
  h(2, 2) = 1.0;  // two-fold degenerate ground level
  GroundStateCheck c = ground_state_check(h, Eigen::MatrixXcd::Identity(3, 3));
  CHECK(c.degenerate_ground_state);

  Eigen::MatrixXcd nh = Eigen::MatrixXcd::Zero(2, 2);
  nh(0, 1) = 1.0;  // not hermitian
  CHECK_THROWS_AS(ground_state_check(nh, Eigen::MatrixXcd::Identity(2, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(ground_state_check(Eigen::MatrixXcd::Identity(2, 2),
                                     Eigen::MatrixXcd::Identity(3, 3)),
                  std::invalid_argument);
}
