#include <CLI11.hpp>
#include <json.hpp>

#include <qcmix/exprio.hpp>
#include <qcmix/hybridfield.hpp>
#include <qcmix/nogo.hpp>
#include <qcmix/observable.hpp>
#include <qcmix/planewave.hpp>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using nlohmann::ordered_json;
using namespace qcmix;

constexpr const char* kVersion = "0.1.0";

constexpr int kOk = 0;
constexpr int kInternal = 1;
constexpr int kBadInput = 2;
constexpr int kDeviation = 3;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

ordered_json mat2_json(const hybridfield::Mat2& m) {
  return ordered_json::array(
      {ordered_json::array({m(0, 0), m(0, 1)}),
       ordered_json::array({m(1, 0), m(1, 1)})});
}

ordered_json vec2_json(const hybridfield::Vec2& v) {
  return ordered_json::array({v(0), v(1)});
}

std::string mat2_text(const hybridfield::Mat2& m) {
  return "[[" + num(m(0, 0)) + ", " + num(m(0, 1)) + "], [" + num(m(1, 0)) +
         ", " + num(m(1, 1)) + "]]";
}

void emit_json(const std::string& path, const std::string& command,
               ordered_json parameters, ordered_json payload) {
  ordered_json env;
  env["schema_version"] = "1.0";
  env["tool"] = "qcmix";
  env["version"] = kVersion;
  env["command"] = command;
  env["parameters"] = std::move(parameters);
  env["payload"] = std::move(payload);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << env.dump(2) << "\n";
}

/// QCMIX_SEED provides the default seed for stochastic subcommands; an
/// explicit --seed always wins.
std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("QCMIX_SEED");
  if (!s || !*s) return std::nullopt;
  if (*s == '-') throw std::invalid_argument("QCMIX_SEED must be a nonnegative integer");
  errno = 0;
  char* end = nullptr;
  unsigned long long v = std::strtoull(s, &end, 10);
  if (errno != 0 || end == s || *end != '\0')
    throw std::invalid_argument("QCMIX_SEED must be a nonnegative integer");
  return v;
}

// ---------------------------------------------------------------------------
// bracket

struct BracketArgs {
  std::string a, b;
  std::string kind = "s";
  std::string jacobi, leibniz;
  std::string json_path;
  int nq = 1, nc = 1;
};

BracketKind parse_kind(const std::string& k) {
  if (k == "q") return BracketKind::Quantum;
  if (k == "c") return BracketKind::Poisson;
  if (k == "s") return BracketKind::StandardHybrid;
  return BracketKind::AndersonHybrid;
}

int run_bracket(const BracketArgs& o) {
  const Dims dims{o.nq, o.nc};
  const BracketKind kind = parse_kind(o.kind);
  auto A = exprio::parse(o.a, dims);
  auto B = exprio::parse(o.b, dims);
  auto R = bracket(kind, A, B);
  const std::string result = exprio::format(R);
  std::cout << result << "\n";

  ordered_json payload;
  payload["kind"] = o.kind;
  payload["a"] = exprio::format(A);
  payload["b"] = exprio::format(B);
  payload["result"] = result;
  if (!o.jacobi.empty()) {
    auto C = exprio::parse(o.jacobi, dims);
    const std::string defect = exprio::format(jacobiator(kind, A, B, C));
    std::cout << "jacobi defect: " << defect << "\n";
    payload["jacobi_with"] = exprio::format(C);
    payload["jacobi_defect"] = defect;
  }
  if (!o.leibniz.empty()) {
    auto H = exprio::parse(o.leibniz, dims);
    const std::string defect = exprio::format(leibniz_defect(kind, A, B, H));
    std::cout << "leibniz defect: " << defect << "\n";
    payload["leibniz_with"] = exprio::format(H);
    payload["leibniz_defect"] = defect;
  }
  if (!o.json_path.empty()) {
    ordered_json params{{"a", o.a},      {"b", o.b},           {"kind", o.kind},
                        {"jacobi", o.jacobi}, {"leibniz", o.leibniz},
                        {"nq", o.nq},    {"nc", o.nc}};
    emit_json(o.json_path, "bracket", std::move(params), std::move(payload));
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// nogo

int run_nogo(int steps, const std::string& json_path) {
  const nogo::NoGoReport rep = nogo::run_verification(steps);

  for (const auto& s : rep.steps) {
    std::cout << "step " << s.step << " " << s.pair_class << ": "
              << s.unknown_count << " unknowns, rank " << s.rank << ", "
              << s.outcome;
    if (s.outcome == "Unique" && s.matches_standard)
      std::cout << ", constants match the closed-form hybrid bracket";
    std::cout << "; check " << s.check_class
              << (s.check_passed ? " passed" : " FAILED") << "\n";
  }
  if (rep.certificate) {
    const auto& c = *rep.certificate;
    std::cout << "certificate: jacobiator(" << c.a << ", " << c.b << ", " << c.c
              << ") != 0\n"
              << "  first failing monomial: " << c.monomial
              << " with coefficient " << c.value << "\n"
              << "  residual at hbar = 1: " << c.residual << "\n"
              << "  residual with formal hbar: " << c.residual_symbolic << "\n";
  }
  std::cout << "verdict: " << rep.verdict << "\n";

  if (!json_path.empty()) {
    ordered_json steps_json = ordered_json::array();
    for (const auto& s : rep.steps) {
      ordered_json constants = ordered_json::array();
      for (const auto& u : s.assignment)
        constants.push_back({{"id", u.id}, {"label", u.label}, {"value", u.value}});
      steps_json.push_back({{"step", s.step},
                            {"pair_class", s.pair_class},
                            {"solve_classes", s.solve_classes},
                            {"unknown_count", s.unknown_count},
                            {"outcome", s.outcome},
                            {"rank", s.rank},
                            {"matches_standard", s.matches_standard},
                            {"check_class", s.check_class},
                            {"check_passed", s.check_passed},
                            {"constants", std::move(constants)}});
    }
    ordered_json payload;
    payload["steps_requested"] = rep.steps_requested;
    payload["reproduced"] = rep.reproduced;
    payload["verdict"] = rep.verdict;
    payload["steps"] = std::move(steps_json);
    if (rep.certificate) {
      const auto& c = *rep.certificate;
      payload["certificate"] = {{"a", c.a},
                                {"b", c.b},
                                {"c", c.c},
                                {"monomial", c.monomial},
                                {"value", c.value},
                                {"residual", c.residual},
                                {"residual_symbolic", c.residual_symbolic}};
    } else {
      payload["certificate"] = nullptr;
    }
    emit_json(json_path, "nogo", ordered_json{{"steps", steps}},
              std::move(payload));
  }
  return rep.reproduced ? kOk : kDeviation;
}

// ---------------------------------------------------------------------------
// field

ordered_json params_json(const hybridfield::FieldParams& p) {
  return {{"m1sq", p.m1sq},
          {"m2sq", p.m2sq},
          {"g", p.g},
          {"hbar1", p.hbar1},
          {"hbar2", p.hbar2}};
}

int run_field_spectrum(const hybridfield::FieldParams& p,
                       const std::string& json_path) {
  p.validate();
  const hybridfield::SpectralData s = hybridfield::residues(p);
  std::cout << "R = " << num(s.R) << "\n"
            << "m+^2 = " << num(s.mplussq) << "\n"
            << "m-^2 = " << num(s.mminussq) << "\n"
            << "m3^2 = " << num(s.m3sq) << "\n";
  if (s.degenerate)
    std::cout << "degenerate spectrum: coincident decoupled modes\n";
  std::cout << "Q+ = " << mat2_text(s.Qplus) << "\n"
            << "Q- = " << mat2_text(s.Qminus) << "\n"
            << "Q3 = " << mat2_text(s.Q3) << "\n";
  if (!json_path.empty()) {
    ordered_json payload;
    payload["subcommand"] = "spectrum";
    payload["params"] = params_json(p);
    payload["spectrum"] = {{"R", s.R},
                           {"mplussq", s.mplussq},
                           {"mminussq", s.mminussq},
                           {"m3sq", s.m3sq},
                           {"degenerate", s.degenerate}};
    payload["residues"] = {{"qplus", mat2_json(s.Qplus)},
                           {"qminus", mat2_json(s.Qminus)},
                           {"q3", mat2_json(s.Q3)}};
    emit_json(json_path, "field spectrum", params_json(p), std::move(payload));
  }
  return kOk;
}

int run_field_positivity(const hybridfield::FieldParams& p,
                         const std::string& json_path) {
  p.validate();
  const hybridfield::PositivityVerdict v = hybridfield::reflection_positivity(p);
  if (v.positive) {
    std::cout << "Positive: all residue matrices are positive semidefinite\n";
  } else {
    std::cout << "NotPositive: " << v.witness_matrix << " has eigenvalue "
              << num(v.eigenvalue) << " along (" << num(v.eigenvector(0))
              << ", " << num(v.eigenvector(1)) << ")\n";
  }
  if (!json_path.empty()) {
    ordered_json payload;
    payload["subcommand"] = "positivity";
    payload["params"] = params_json(p);
    payload["verdict"] = v.positive ? "Positive" : "NotPositive";
    if (v.positive) {
      payload["witness"] = nullptr;
    } else {
      payload["witness"] = {{"matrix", v.witness_matrix},
                            {"eigenvalue", v.eigenvalue},
                            {"eigenvector", vec2_json(v.eigenvector)}};
    }
    emit_json(json_path, "field positivity", params_json(p), std::move(payload));
  }
  return kOk;
}

int run_field_simulate(const hybridfield::FieldParams& p,
                       hybridfield::SimConfig cfg, bool seed_given,
                       const std::string& json_path) {
  p.validate();
  if (!seed_given) {
    if (auto s = env_seed()) cfg.seed = *s;
  }
  const hybridfield::SimResult r = hybridfield::langevin_simulate(p, cfg);
  std::cout << "dtau = " << num(r.dtau) << ", steps = " << cfg.n_steps
            << ", burn-in = " << cfg.n_burnin << ", seed = " << cfg.seed
            << "\n";
  for (const auto& m : r.modes) {
    const hybridfield::Mat2 w = hybridfield::propagator(p, m.ksq);
    std::cout << "k^2 = " << num(m.ksq) << ":\n";
    const char* names[3] = {"c11", "c12", "c22"};
    const int idx[3][2] = {{0, 0}, {0, 1}, {1, 1}};
    for (int e = 0; e < 3; ++e) {
      const int i = idx[e][0], j = idx[e][1];
      std::cout << "  " << names[e] << " = " << num(m.covariance(i, j))
                << " (se " << num(m.covariance_se(i, j)) << ", exact "
                << num(w(i, j)) << ")\n";
    }
  }
  if (!json_path.empty()) {
    ordered_json modes = ordered_json::array();
    for (const auto& m : r.modes)
      modes.push_back({{"ksq", m.ksq},
                       {"covariance", mat2_json(m.covariance)},
                       {"covariance_se", mat2_json(m.covariance_se)},
                       {"mean", vec2_json(m.mean)},
                       {"mean_se", vec2_json(m.mean_se)},
                       {"exact", mat2_json(hybridfield::propagator(p, m.ksq))}});
    ordered_json params = params_json(p);
    params["seed"] = cfg.seed;
    params["dtau"] = cfg.dtau;
    params["n_steps"] = cfg.n_steps;
    params["n_burnin"] = cfg.n_burnin;
    params["ksq"] = cfg.k_grid.empty()
                        ? ordered_json(hybridfield::default_k_grid())
                        : ordered_json(cfg.k_grid);
    ordered_json payload;
    payload["subcommand"] = "simulate";
    payload["params"] = params_json(p);
    payload["seed"] = cfg.seed;
    payload["dtau"] = r.dtau;
    payload["n_steps"] = cfg.n_steps;
    payload["n_burnin"] = cfg.n_burnin;
    payload["modes"] = std::move(modes);
    emit_json(json_path, "field simulate", std::move(params), std::move(payload));
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// planewave-check

int run_planewave_check(std::size_t trials, std::uint64_t seed, bool seed_given,
                        const std::string& json_path) {
  namespace pw = qcmix::planewave;
  if (!seed_given) {
    if (auto s = env_seed()) seed = *s;
  }

  ordered_json checks = ordered_json::array();
  bool all_passed = true;
  auto record = [&](const std::string& name, double statistic, double threshold,
                    bool require_below, ordered_json extra = nullptr) {
    const bool passed = require_below ? statistic < threshold
                                      : statistic > threshold;
    all_passed = all_passed && passed;
    std::cout << "check " << name << ": statistic " << num(statistic)
              << ", threshold " << (require_below ? "< " : "> ")
              << num(threshold) << ": " << (passed ? "ok" : "FAIL") << "\n";
    ordered_json row{{"name", name},
                     {"statistic", statistic},
                     {"threshold", threshold},
                     {"comparison", require_below ? "below" : "above"},
                     {"passed", passed}};
    if (!extra.is_null()) row["witness"] = std::move(extra);
    checks.push_back(std::move(row));
  };

  auto wv_json = [](const pw::WaveVector& w) {
    return ordered_json{{"q", w.q}, {"p", w.p}, {"x", w.x}, {"k", w.k}};
  };

  // Functional Jacobi: exact members stay at rounding level, the standard
  // bracket's structure function must exhibit a violating triple.
  record("quantum-quantum jacobi",
         pw::worst_triple(pw::FKind::quantum_quantum(), trials, seed).residual,
         1e-10, true);
  record("linear jacobi",
         pw::worst_triple(pw::FKind::linear(), trials, seed).residual, 1e-10,
         true);
  record("classical jacobi",
         pw::worst_triple(pw::FKind::classical(), trials, seed).residual, 1e-10,
         true);
  const pw::TripleResidual bad =
      pw::worst_triple(pw::FKind::standard_s(), trials, seed);
  record("standard bracket jacobi violation", bad.residual, 1e-3, false,
         ordered_json{{"r", wv_json(bad.r)},
                      {"s", wv_json(bad.s)},
                      {"t", wv_json(bad.t)},
                      {"residual", bad.residual}});

  // Certifying ODE for the one-variable generators of the sine family.
  double ode_max = 0;
  for (double h : pw::default_h_grid())
    for (int i = -30; i <= 30; ++i) {
      double x = 0.1 * i;
      ode_max = std::max(ode_max,
                         std::abs(pw::ode_residual(pw::FKind::sine_family(h), x)));
    }
  record("sine family consistency ode", ode_max, 1e-9, true);

  // Boundary postulates: no member satisfies both at once.
  const pw::PostulateScan scan = pw::postulate_scan(pw::default_h_grid());
  record("boundary postulate obstruction", scan.min_max_error, 0.1, false);

  const pw::PostulateEntry& best = scan.entries[scan.best_index];
  std::cout << "postulate scan: best member "
            << (best.linear_member ? std::string("linear")
                                   : "sine(h = " + num(best.h) + ")")
            << ", err_u = " << num(best.err_u)
            << ", err_v = " << num(best.err_v) << "\n";
  std::cout << (all_passed ? "all checks passed" : "some checks FAILED")
            << "\n";

  if (!json_path.empty()) {
    ordered_json entries = ordered_json::array();
    for (const auto& e : scan.entries)
      entries.push_back({{"member", e.linear_member ? "linear" : "sine"},
                         {"h", e.h},
                         {"err_u", e.err_u},
                         {"err_v", e.err_v}});
    ordered_json payload;
    payload["trials"] = trials;
    payload["seed"] = seed;
    payload["checks"] = std::move(checks);
    payload["scan"] = {{"min_max_error", scan.min_max_error},
                       {"best_index", scan.best_index},
                       {"entries", std::move(entries)}};
    payload["all_passed"] = all_passed;
    emit_json(json_path, "planewave-check",
              ordered_json{{"trials", trials}, {"seed", seed}},
              std::move(payload));
  }
  return all_passed ? kOk : kDeviation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact verification toolkit for hybrid quantum-classical dynamics"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  BracketArgs br;
  CLI::App* cmd_bracket =
      app.add_subcommand("bracket", "evaluate a dynamical bracket in canonical form");
  cmd_bracket->add_option("a", br.a, "left observable")->required();
  cmd_bracket->add_option("b", br.b, "right observable")->required();
  cmd_bracket
      ->add_option("--kind", br.kind,
                   "bracket kind: q (quantum), c (classical), s (standard "
                   "hybrid), a (anderson hybrid)")
      ->check(CLI::IsMember({"q", "c", "s", "a"}));
  cmd_bracket->add_option("--jacobi", br.jacobi,
                          "third observable: also report the jacobiator defect");
  cmd_bracket->add_option("--leibniz", br.leibniz,
                          "hamiltonian: also report the leibniz defect");
  cmd_bracket->add_option("--nq", br.nq, "quantum degrees of freedom")
      ->check(CLI::Range(1, 8));
  cmd_bracket->add_option("--nc", br.nc, "classical degrees of freedom")
      ->check(CLI::Range(1, 8));
  cmd_bracket->add_option("--json", br.json_path, "write the JSON report here");

  int nogo_steps = 4;
  std::string nogo_json;
  CLI::App* cmd_nogo = app.add_subcommand(
      "nogo", "run the staged bracket-extension verification");
  cmd_nogo->add_option("--steps", nogo_steps, "number of stages to run")
      ->check(CLI::Range(1, 4));
  cmd_nogo->add_option("--json", nogo_json, "write the JSON report here");

  hybridfield::FieldParams fp;
  CLI::App* cmd_field =
      app.add_subcommand("field", "coupled quadratic field-theory checks");
  cmd_field->require_subcommand(1);
  std::string spectrum_json, positivity_json, simulate_json;
  hybridfield::SimConfig sim;
  CLI::App* cmd_spectrum = cmd_field->add_subcommand(
      "spectrum", "mass eigenvalues and spectral residues");
  CLI::App* cmd_positivity = cmd_field->add_subcommand(
      "positivity", "positive semidefiniteness of the spectral residues");
  CLI::App* cmd_simulate = cmd_field->add_subcommand(
      "simulate", "stochastic sampling of the stationary covariance");
  for (CLI::App* c : {cmd_spectrum, cmd_positivity, cmd_simulate}) {
    c->add_option("--m1sq", fp.m1sq, "squared mass of field 1");
    c->add_option("--m2sq", fp.m2sq, "squared mass of field 2");
    c->add_option("--g", fp.g, "coupling");
    c->add_option("--hbar1", fp.hbar1, "noise strength of field 1");
    c->add_option("--hbar2", fp.hbar2, "noise strength of field 2");
  }
  cmd_spectrum->add_option("--json", spectrum_json, "write the JSON report here");
  cmd_positivity->add_option("--json", positivity_json,
                             "write the JSON report here");
  CLI::Option* sim_seed_opt =
      cmd_simulate->add_option("--seed", sim.seed, "random stream seed");
  cmd_simulate->add_option("--dtau", sim.dtau,
                           "fictitious-time step (0 = automatic)");
  cmd_simulate->add_option("--n-steps", sim.n_steps, "total steps per mode");
  cmd_simulate->add_option("--n-burnin", sim.n_burnin, "discarded initial steps");
  cmd_simulate
      ->add_option("--ksq", sim.k_grid,
                   "k^2 grid values (repeat or comma-separate; empty = default "
                   "grid)")
      ->delimiter(',');
  cmd_simulate->add_option("--json", simulate_json, "write the JSON report here");

  std::size_t pw_trials = 1000;
  std::uint64_t pw_seed = planewave::kDefaultSeed;
  std::string pw_json;
  CLI::App* cmd_pw = app.add_subcommand(
      "planewave-check", "plane-wave structure-function battery");
  cmd_pw->add_option("--trials", pw_trials, "random triples per check");
  CLI::Option* pw_seed_opt =
      cmd_pw->add_option("--seed", pw_seed, "random triple seed");
  cmd_pw->add_option("--json", pw_json, "write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }

  const auto t0 = std::chrono::steady_clock::now();
  int code = kInternal;
  try {
    if (cmd_bracket->parsed()) {
      code = run_bracket(br);
    } else if (cmd_nogo->parsed()) {
      code = run_nogo(nogo_steps, nogo_json);
    } else if (cmd_field->parsed()) {
      if (cmd_spectrum->parsed())
        code = run_field_spectrum(fp, spectrum_json);
      else if (cmd_positivity->parsed())
        code = run_field_positivity(fp, positivity_json);
      else
        code = run_field_simulate(fp, sim, sim_seed_opt->count() > 0,
                                  simulate_json);
    } else if (cmd_pw->parsed()) {
      code = run_planewave_check(pw_trials, pw_seed, pw_seed_opt->count() > 0,
                                 pw_json);
    }
  } catch (const exprio::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kBadInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  const auto dt = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - t0);
  // Stderr so that reports stay byte-identical across reruns.
  std::cerr << "wall time: " << dt.count() << " ms\n";
  return code;
}
