#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

// Drives the installed binary end to end through a shell; QCMIX_CLI_PATH is
// injected by the build.

namespace {

using nlohmann::json;

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& cmdline) {
  FILE* p = popen(cmdline.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  int status = pclose(p);
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = std::move(out);
  return r;
}

std::string cli() { return QCMIX_CLI_PATH; }

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json load_report(const std::string& path) { return json::parse(slurp(path)); }

}  // namespace

TEST_CASE("version and help exit cleanly") {
  RunResult r = run(cli() + " --version 2>/dev/null");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("0.1.0") != std::string::npos);
  r = run(cli() + " --help 2>/dev/null");
  CHECK(r.exit_code == 0);
  r = run(cli() + " 2>&1");
  CHECK(r.exit_code == 2);  // a subcommand is required
}

TEST_CASE("bracket: canonical output and defects") {
  RunResult r = run(cli() + " bracket 'q' 'p' --kind q 2>/dev/null");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "1\n");

  r = run(cli() + " bracket 'q*x' 'q*p*x' --kind s --jacobi 'p*k^2' 2>/dev/null");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("jacobi defect: (1/2)*hbar^2") != std::string::npos);

  // The standard bracket is not a derivation; the quantum bracket is.
  r = run(cli() + " bracket 'q' 'x' --kind s --leibniz 'q*p*k' 2>/dev/null");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("leibniz defect: ") != std::string::npos);
  r = run(cli() + " bracket 'q' 'p' --kind q --leibniz 'q*p' 2>/dev/null");
  CHECK(r.out.find("leibniz defect: 0") != std::string::npos);
}

TEST_CASE("bracket: JSON report round-trip") {
  const std::string path = tmp_path("qcmix_cli_bracket.json");
  RunResult r = run(cli() + " bracket 'q*x' 'q*p*x' --kind s --jacobi 'p*k^2'" +
                    " --json " + path + " >/dev/null 2>&1");
  REQUIRE(r.exit_code == 0);
  json rep = load_report(path);
  CHECK(rep["schema_version"] == "1.0");
  CHECK(rep["tool"] == "qcmix");
  CHECK(rep["command"] == "bracket");
  CHECK(rep["parameters"]["kind"] == "s");
  CHECK(rep["payload"]["result"] == "q*x^2");
  CHECK(rep["payload"]["jacobi_defect"] == "(1/2)*hbar^2");
}

TEST_CASE("bracket: malformed input and bad flags exit 2") {
  RunResult r = run(cli() + " bracket 'q*(' 'p' 2>&1");
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("position 3") != std::string::npos);

  r = run(cli() + " bracket 'q' 'p' --kind z 2>&1");
  CHECK(r.exit_code == 2);
  r = run(cli() + " bracket 'q' 'p' --bogus 2>&1");
  CHECK(r.exit_code == 2);
}

TEST_CASE("nogo: shallow run report") {
  const std::string path = tmp_path("qcmix_cli_nogo1.json");
  RunResult r = run(cli() + " nogo --steps 1 --json " + path + " 2>/dev/null");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("6 unknowns") != std::string::npos);
  json rep = load_report(path);
  CHECK(rep["payload"]["reproduced"] == true);
  CHECK(rep["payload"]["steps"][0]["unknown_count"] == 6);
  CHECK(rep["payload"]["steps"][0]["outcome"] == "Unique");
  CHECK(rep["payload"]["certificate"].is_null());
}

TEST_CASE("nogo: full run ends in the certified contradiction") {
  const std::string path = tmp_path("qcmix_cli_nogo4.json");
  RunResult r = run(cli() + " nogo --steps 4 --json " + path + " 2>/dev/null");
  CHECK(r.exit_code == 0);  // the contradiction is the expected outcome
  json rep = load_report(path);
  const json& steps = rep["payload"]["steps"];
  REQUIRE(steps.size() == 4);
  const int counts[4] = {6, 48, 100, 66};
  for (int i = 0; i < 4; ++i) CHECK(steps[i]["unknown_count"] == counts[i]);
  CHECK(steps[3]["outcome"] == "Inconsistent");
  CHECK(rep["payload"]["certificate"]["residual"] == "(1/2)");

  r = run(cli() + " nogo --steps 9 2>&1");
  CHECK(r.exit_code == 2);
}

TEST_CASE("field spectrum: decoupled masses") {
  const std::string path = tmp_path("qcmix_cli_spec.json");
  RunResult r = run(cli() + " field spectrum --m1sq 1 --m2sq 4 --g 0 --json " +
                    path + " 2>/dev/null");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("m+^2 = 4") != std::string::npos);
  CHECK(r.out.find("m-^2 = 1") != std::string::npos);
  CHECK(r.out.find("m3^2 = 2.5") != std::string::npos);
  json rep = load_report(path);
  CHECK(rep["payload"]["spectrum"]["mplussq"] == doctest::Approx(4.0));
  CHECK(rep["payload"]["spectrum"]["m3sq"] == doctest::Approx(2.5));
}

TEST_CASE("field positivity: verdicts and witness") {
  const std::string path = tmp_path("qcmix_cli_pos.json");
  RunResult r = run(cli() +
                    " field positivity --m1sq 1 --m2sq 4 --g 1 --hbar1 1 "
                    "--hbar2 0 --json " +
                    path + " 2>/dev/null");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("NotPositive") != std::string::npos);
  CHECK(r.out.find("Q3") != std::string::npos);
  json rep = load_report(path);
  CHECK(rep["payload"]["verdict"] == "NotPositive");
  CHECK(rep["payload"]["witness"]["matrix"] == "Q3");
  CHECK(rep["payload"]["witness"]["eigenvalue"].get<double>() < 0.0);

  r = run(cli() + " field positivity --m1sq 1 --m2sq 4 --g 0 --hbar1 1 "
                  "--hbar2 0 2>/dev/null");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("Positive") == 0);

  r = run(cli() + " field positivity --m1sq -1 --m2sq 4 2>&1");
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("m1sq") != std::string::npos);
  r = run(cli() + " field positivity --m1sq 1 --m2sq 4 --g 3 2>&1");
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("g too large") != std::string::npos);
}

TEST_CASE("field simulate: deterministic reports for a fixed seed") {
  const std::string base = " field simulate --m1sq 1 --m2sq 4 --g 1 --hbar1 1 "
                           "--hbar2 0 --n-steps 4000 --n-burnin 1000 --ksq 0,1";
  const std::string ja = tmp_path("qcmix_cli_sim_a.json");
  const std::string jb = tmp_path("qcmix_cli_sim_b.json");
  RunResult a = run(cli() + base + " --seed 7 --json " + ja + " 2>/dev/null");
  RunResult b = run(cli() + base + " --seed 7 --json " + jb + " 2>/dev/null");
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(slurp(ja) == slurp(jb));  // byte-identical reports

  // The environment variable supplies the default seed.
  RunResult c = run("QCMIX_SEED=7 " + cli() + base + " 2>/dev/null");
  CHECK(c.out == a.out);
  RunResult d = run(cli() + base + " --seed 8 2>/dev/null");
  CHECK(d.out != a.out);

  json rep = load_report(ja);
  CHECK(rep["payload"]["seed"] == 7);
  CHECK(rep["payload"]["modes"].size() == 2);
  CHECK(rep["payload"]["dtau"].get<double>() > 0.0);
}

TEST_CASE("field simulate: configuration errors exit 2") {
  RunResult r = run(cli() + " field simulate --dtau 0.5 --ksq 25 2>&1");
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("stability") != std::string::npos);
  r = run(cli() + " field simulate --n-steps 50 --n-burnin 100 2>&1");
  CHECK(r.exit_code == 2);
}

TEST_CASE("planewave-check: full battery passes") {
  const std::string path = tmp_path("qcmix_cli_pw.json");
  RunResult r = run(cli() + " planewave-check --trials 300 --json " + path +
                    " 2>/dev/null");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("all checks passed") != std::string::npos);
  json rep = load_report(path);
  CHECK(rep["payload"]["all_passed"] == true);
  CHECK(rep["payload"]["checks"].size() == 6);
  CHECK(rep["payload"]["scan"]["min_max_error"].get<double>() > 0.1);
}
