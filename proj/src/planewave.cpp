#include "qcmix/planewave.hpp"

#include <cmath>
#include <random>

namespace qcmix::planewave {

std::string FKind::name() const {
  switch (tag) {
    case Tag::Classical: return "classical";
    case Tag::Quantum: return "quantum";
    case Tag::StandardS: return "standard";
    case Tag::QuantumQuantum: return "quantum-quantum";
    case Tag::SineFamily: return "sine(h=" + std::to_string(h) + ")";
    case Tag::Linear: return "linear";
  }
  return "?";
}

double f_eval(const FKind& kind, double u, double v) {
  switch (kind.tag) {
    case FKind::Tag::Classical: return v;
    case FKind::Tag::Quantum: return 2 * std::sin(u / 2);
    case FKind::Tag::StandardS: return 2 * std::sin(u / 2) + v * std::cos(u / 2);
    case FKind::Tag::QuantumQuantum: return 2 * std::sin((u + v) / 2);
    case FKind::Tag::SineFamily:
      if (kind.h == 0) return u + v;
      return std::sin(kind.h * (u + v)) / kind.h;
    case FKind::Tag::Linear: return u + v;
  }
  return 0;
}

double jacobi_residual(const FKind& kind, const WaveVector& r, const WaveVector& s,
                       const WaveVector& t) {
  auto F = [&](const WaveVector& a, const WaveVector& b) {
    UV w = uv(a, b);
    return f_eval(kind, w.u, w.v);
  };
  return F(r, s) * F(r + s, t) + F(s, t) * F(s + t, r) + F(t, r) * F(t + r, s);
}

namespace {

// One-variable generator f(x) = F(x, 0) with analytic derivatives; every
// family reduces to sin(hx)/h (possibly h = 0, meaning f(x) = x) or to 0.
struct Generator {
  bool zero = false;
  double h = 0;
};

Generator generator_of(const FKind& kind) {
  switch (kind.tag) {
    case FKind::Tag::Classical: return {true, 0};
    case FKind::Tag::Quantum:
    case FKind::Tag::StandardS:
    case FKind::Tag::QuantumQuantum: return {false, 0.5};
    case FKind::Tag::SineFamily: return {false, kind.h};
    case FKind::Tag::Linear: return {false, 0};
  }
  return {true, 0};
}

}  // namespace

double ode_residual(const FKind& kind, double x) {
  Generator gen = generator_of(kind);
  if (gen.zero) return 0;
  double f, f1, f2, f1_at_0;
  if (gen.h == 0) {
    f = x;
    f1 = 1;
    f2 = 0;
    f1_at_0 = 1;
  } else {
    f = std::sin(gen.h * x) / gen.h;
    f1 = std::cos(gen.h * x);
    f2 = -gen.h * std::sin(gen.h * x);
    f1_at_0 = 1;
  }
  return f * f2 + f1_at_0 * f1_at_0 - f1 * f1;
}

double ode_residual(const std::function<double(double)>& f, double x) {
  const double step = 1e-5;
  auto d1 = [&](double at) { return (f(at + step) - f(at - step)) / (2 * step); };
  double f2 = (f(x + step) - 2 * f(x) + f(x - step)) / (step * step);
  double d0 = d1(0);
  double dx = d1(x);
  return f(x) * f2 + d0 * d0 - dx * dx;
}

std::vector<WaveVector> random_wavevectors(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> comp(-2.0, 2.0);
  std::vector<WaveVector> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    WaveVector w;
    w.q = comp(rng);
    w.p = comp(rng);
    w.x = comp(rng);
    w.k = comp(rng);
    out.push_back(w);
  }
  return out;
}

TripleResidual worst_triple(const FKind& kind, std::size_t n_triples,
                            std::uint64_t seed) {
  auto pool = random_wavevectors(3 * n_triples, seed);
  TripleResidual best;
  for (std::size_t i = 0; i < n_triples; ++i) {
    const WaveVector &r = pool[3 * i], &s = pool[3 * i + 1], &t = pool[3 * i + 2];
    double res = std::fabs(jacobi_residual(kind, r, s, t));
    if (res >= best.residual) best = {r, s, t, res};
  }
  return best;
}

PostulateScan postulate_scan(const std::vector<double>& h_grid,
                             std::size_t n_samples) {
  const double pi = std::acos(-1.0);
  PostulateScan scan;
  auto sup_errors = [&](const FKind& kind) {
    PostulateEntry e;
    for (std::size_t i = 0; i < n_samples; ++i) {
      double w = -pi + 2 * pi * static_cast<double>(i) /
                           static_cast<double>(n_samples - 1);
      double eu = std::fabs(f_eval(kind, w, 0) - 2 * std::sin(w / 2));
      double ev = std::fabs(f_eval(kind, 0, w) - w);
      if (eu > e.err_u) e.err_u = eu;
      if (ev > e.err_v) e.err_v = ev;
    }
    return e;
  };
  for (double h : h_grid) {
    PostulateEntry e = sup_errors(FKind::sine_family(h));
    e.h = h;
    scan.entries.push_back(e);
  }
  PostulateEntry lin = sup_errors(FKind::linear());
  lin.linear_member = true;
  scan.entries.push_back(lin);

  scan.min_max_error = scan.entries.front().max_err();
  for (std::size_t i = 0; i < scan.entries.size(); ++i)
    if (scan.entries[i].max_err() < scan.min_max_error) {
      scan.min_max_error = scan.entries[i].max_err();
      scan.best_index = i;
    }
  return scan;
}

std::vector<double> default_h_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 20; ++i) grid.push_back(i / 10.0);
  return grid;
}

}  // namespace qcmix::planewave
