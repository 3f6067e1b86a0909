#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qlab/errors.hpp"
#include "qlab/outputs.hpp"
#include "qlab/studies.hpp"

using namespace qlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("qlab_test_studies_" + name);
  fs::remove_all(dir);
  return dir;
}

const Check* find_check(const RunReport& r, const std::string& prefix) {
  for (const auto& c : r.checks)
    if (c.name.rfind(prefix, 0) == 0) return &c;
  return nullptr;
}

const char* kCat =
    "grid.n = 16\n"
    "grid.L = 12\n"
    "initial.kind = cat\n"
    "initial.separation = 6\n"
    "evolve.dt = 1e-2\n"
    "evolve.t_end = 1\n"
    "evolve.records = 4\n"
    "noise.seed = 5\n"
    "noise.realizations = 400\n";

}  // namespace

TEST_CASE("check verdicts follow the relation") {
  RunReport r;
  r.check("a", 1, 1.0, "<=", 1.0);
  r.check("b", 1, 0.5, ">=", 1.0);
  CHECK(r.checks[0].pass);
  CHECK_FALSE(r.checks[1].pass);
  CHECK_FALSE(r.pass());
  CHECK_THROWS(r.check("c", 1, 0.0, "<", 1.0));
}

TEST_CASE("segcheck: E vanishes, is antisymmetric, segment sums are exact") {
  SegcheckOptions o;
  o.pairs = 200;
  o.seed = 3;
  const auto r = run_segcheck(o);
  CHECK(r.pass());
  CHECK(std::count_if(r.checks.begin(), r.checks.end(), [](const Check& c) { return c.criterion == 1; }) == 8);
  CHECK(std::count_if(r.checks.begin(), r.checks.end(), [](const Check& c) { return c.criterion == 2; }) == 6);
  REQUIRE(r.tables.size() == 1);
  CHECK(r.tables[0].rows.size() == 200);
}

TEST_CASE("equivalence study: harmonic passes, quartic records divergence") {
  const auto h = parse_scenario(
      "grid.n = 64\ngrid.L = 10\npotential.kind = harmonic\npotential.params.omega = 1\n"
      "initial.p = 1\nevolve.dt = 2e-3\nevolve.t_end = 1.6\nevolve.records = 4\n");
  const auto rh = run_equivalence_study(h);
  CHECK(rh.pass());
  REQUIRE(find_check(rh, "classical_vonneumann max distance"));
  CHECK(find_check(rh, "classical_vonneumann max distance")->observed <= 1e-6);
  CHECK(std::any_of(rh.tables.begin(), rh.tables.end(), [](const Table& t) { return t.name == "distance_qq_vonneumann"; }));

  auto q = parse_scenario(
      "grid.n = 128\ngrid.L = 10\npotential.kind = quartic\npotential.params.lambda = 0.25\n"
      "initial.p = 1\nevolve.dt = 2e-3\nevolve.t_end = 1.5\nevolve.records = 6\nevolve.tail_threshold = 1e-4\n");
  q.threads = 3;
  const auto rq = run_equivalence_study(q);
  CHECK(rq.pass());
  REQUIRE(find_check(rq, "classical_vonneumann distance at t=1"));
  CHECK(find_check(rq, "classical_vonneumann distance at t=1")->observed >= 1e-3);
  CHECK(find_check(rq, "classical_vonneumann distance increasing"));
  CHECK_FALSE(find_check(rq, "classical hermiticity"));
}

TEST_CASE("equivalence study errors carry the engine tag") {
  CHECK_THROWS_AS(run_equivalence_study(parse_scenario("initial.p = 1\n")), ConfigError);
  const auto s = parse_scenario(
      "grid.n = 64\ngrid.L = 10\npotential.kind = constant\ninitial.p = 3\nevolve.dt = 1e-2\nevolve.t_end = 4\n");
  try {
    run_equivalence_study(s);
    FAIL("expected a boundary error");
  } catch (const BoundaryError& e) {
    CHECK(std::string(e.what()).rfind("[classical]", 0) == 0);
  }
}

TEST_CASE("decoherence study, H disabled") {
  const auto s = parse_scenario(std::string(kCat) + "potential.kind = constant\nevolve.hamiltonian = false\nnoise.nu = 1\n");
  const auto r = run_decoherence_study(s);
  CHECK(r.pass());
  CHECK(find_check(r, "pooled decay coefficient"));
  CHECK(find_check(r, "probe_1 diagonal constant")->observed == 0.0);
  CHECK(find_check(r, "lindblad vs closed form")->observed <= 1e-12);
  REQUIRE(r.tables.size() == 3);
  CHECK(r.tables[0].columns == std::vector<std::string>{"t", "abs_f", "predicted", "stderr"});
  CHECK(r.tables[0].rows.size() == 5);
}

TEST_CASE("decoherence study without noise shows no decay") {
  const auto s = parse_scenario(std::string(kCat) + "potential.kind = constant\nevolve.hamiltonian = false\nnoise.nu = 0\n");
  const auto r = run_decoherence_study(s);
  CHECK(r.pass());
  REQUIRE(find_check(r, "probe_0 no decay"));
  CHECK(find_check(r, "probe_0 no decay")->observed == 0.0);
}

TEST_CASE("decoherence study with H compares against the master equation") {
  const auto s = parse_scenario(
      "grid.n = 16\ngrid.L = 12\ninitial.kind = cat\npotential.kind = harmonic\npotential.params.omega = 1\n"
      "evolve.dt = 1e-3\nevolve.t_end = 0.1\nevolve.records = 4\nevolve.tail_threshold = 1\n"
      "noise.nu = 0.5\nnoise.seed = 5\nnoise.realizations = 400\n");
  const auto r = run_decoherence_study(s);
  CHECK(r.pass());
  CHECK(find_check(r, "ensemble vs master equation"));
  CHECK_FALSE(find_check(r, "pooled decay coefficient"));
}

TEST_CASE("decoherence study needs noise and probes") {
  CHECK_THROWS_AS(run_decoherence_study(parse_scenario("grid.n = 16\ngrid.L = 12\n")), ConfigError);
  CHECK_THROWS_AS(run_decoherence_study(parse_scenario("grid.n = 16\ngrid.L = 12\nnoise.nu = 1\n")), ConfigError);
}

TEST_CASE("Monte Carlo convergence study") {
  const auto s = parse_scenario(
      "grid.n = 16\ngrid.L = 12\ninitial.kind = cat\ninitial.separation = 6\nevolve.t_end = 1\nevolve.records = 1\n"
      "noise.nu = 1\nnoise.seed = 9\n");
  const auto r = run_convergence_study(s, {100, 1000, 10000});
  CHECK(r.pass());
  REQUIRE(r.tables.size() == 1);
  CHECK(r.tables[0].rows.size() == 3);
  CHECK_THROWS_AS(run_convergence_study(s, {100}), ConfigError);
}

TEST_CASE("void study: one row per radius") {
  const auto s = parse_scenario("void.trials = 20000\nvoid.seed = 4\n");
  const auto r = run_void_study(s, {0.3, 0.5});
  CHECK(r.pass());
  REQUIRE(r.tables.size() == 1);
  CHECK(r.tables[0].rows.size() == 2);
  CHECK(r.tables[0].rows[0][5] > r.tables[0].rows[1][5]);
}

TEST_CASE("spectrum study") {
  CHECK(run_spectrum_study(parse_scenario("grid.n = 16\ngrid.L = 4\npotential.kind = quartic\n"
                                          "potential.params.lambda = 1\n"))
            .pass());
  CHECK_THROWS_AS(run_spectrum_study(parse_scenario("grid.n = 64\n")), DomainError);
}

TEST_CASE("outputs: file set, headers, determinism") {
  const auto s = parse_scenario(std::string(kCat) + "potential.kind = constant\nevolve.hamiltonian = false\nnoise.nu = 1\n");
  const auto a = scratch("a"), b = scratch("b");
  const auto files = emit_outputs(run_decoherence_study(s), a);
  emit_outputs(run_decoherence_study(s), b);

  CHECK(first_line(a / "decay_probe_0.csv") == "t,abs_f,predicted,stderr");
  CHECK(fs::exists(a / "decay_probe_0.dat"));
  CHECK(fs::exists(a / "snapshots" / "lindblad_final.csv"));
  const auto index = slurp(a / "index.txt");
  for (const auto& f : files) {
    CHECK(fs::exists(a / f));
    CHECK(index.find(f.generic_string()) != std::string::npos);
  }
  for (const auto& f : files)
    if (f.extension() == ".csv" || f.extension() == ".dat") CHECK(slurp(a / f) == slurp(b / f));
  CHECK(slurp(a / "summary.txt").find("result=PASS") != std::string::npos);

  const auto e = parse_scenario("grid.n = 64\ngrid.L = 10\npotential.kind = harmonic\npotential.params.omega = 1\n"
                                "evolve.dt = 1e-2\nevolve.t_end = 0.5\nevolve.records = 1\n");
  const auto c = scratch("c");
  emit_outputs(run_equivalence_study(e), c);
  CHECK(first_line(c / "distance_classical_vonneumann.csv") == "t,maxnorm,l2");

  fs::remove_all(a);
  fs::remove_all(b);
  fs::remove_all(c);
}

TEST_CASE("outputs: unwritable directory is an I/O error with the path") {
  const auto blocker = scratch("blocker");
  { std::ofstream(blocker) << "x"; }
  try {
    prepare_output_dir(blocker / "sub");
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find(blocker.string()) != std::string::npos);
  }
  fs::remove(blocker);
}

TEST_CASE("format helpers") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_hash(255) == "00000000000000ff");
}
