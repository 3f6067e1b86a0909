// Acceptance run: one PASS/FAIL line per criterion, details indented above it.

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "qlab/evolvers.hpp"
#include "qlab/studies.hpp"
#include "test_support.hpp"

using namespace qlab;

namespace {

constexpr double kS = 0.70710678118654752;

struct Verdict {
  bool pass = true;
  std::string summary;
};

void details(const RunReport& r, int criterion, Verdict& v) {
  for (const auto& c : r.checks) {
    if (c.criterion != criterion) continue;
    fmt::print("    {} {}: {:.6g} {} {:.6g}\n", c.pass ? "ok  " : "FAIL", c.name, c.observed, c.relation, c.threshold);
    v.pass = v.pass && c.pass;
  }
}

double metric(const RunReport& r, const std::string& name) {
  for (const auto& [k, v] : r.metrics)
    if (k == name) return v;
  return std::nan("");
}

int threads() { return static_cast<int>(std::max(1u, std::min(3u, std::thread::hardware_concurrency()))); }

Verdict superoperator_identities(int criterion) {
  SegcheckOptions o;
  o.seed = 2024;
  const auto r = run_segcheck(o);
  Verdict v;
  details(r, criterion, v);
  if (criterion == 1)
    v.summary = fmt::format("max|E| = 0 for 7 quadratic-or-lower potentials, quartic max|E| = {:.3g}",
                            metric(r, "max_abs_E.quartic lambda=1"));
  else if (criterion == 2)
    v.summary = "E(Q,q) + E(q,Q) = 0 exactly for all kinds";
  else
    v.summary = fmt::format("max segment-sum error {:.3g} over {} pairs", metric(r, "segment_sum.max_error"), o.pairs);
  return v;
}

Verdict indistinguishable() {
  auto s = parse_scenario(
      "grid.n = 128\ngrid.L = 10\npotential.kind = harmonic\npotential.params.omega = 1\n"
      "initial.p = 1\nevolve.dt = 1e-3\nevolve.t_end = 6.283185307179586\nevolve.records = 61\n");
  s.threads = threads();
  const auto r = run_equivalence_study(s);
  Verdict v;
  details(r, 4, v);
  v.summary = "harmonic, one period: classical, (Q,q) and von Neumann agree";
  return v;
}

Verdict anharmonic() {
  auto s = parse_scenario(
      "grid.n = 128\ngrid.L = 10\npotential.kind = quartic\npotential.params.lambda = 0.25\n"
      "initial.p = 1\nevolve.dt = 1e-3\nevolve.t_end = 1.5\nevolve.records = 6\nevolve.tail_threshold = 1e-4\n");
  s.threads = threads();
  const auto r = run_equivalence_study(s);
  Verdict v;
  details(r, 5, v);
  v.summary = "v = x^4/4: classical and quantum trajectories separate and keep separating";
  return v;
}

Verdict spectrum_symmetry() {
  Verdict v;
  for (const char* pot : {"constant\npotential.params.c = 0", "harmonic\npotential.params.omega = 1",
                          "quartic\npotential.params.lambda = 1"}) {
    const auto r = run_spectrum_study(parse_scenario(fmt::format("grid.n = 16\ngrid.L = 4\npotential.kind = {}\n", pot)));
    fmt::print("    {}:\n", std::string(pot).substr(0, std::string(pot).find('\n')));
    details(r, 6, v);
  }
  v.summary = "256x256 generator spectrum is symmetric about zero for v = 0, harmonic, quartic";
  return v;
}

const char* kDecoherence =
    "grid.n = 32\ngrid.L = 12\ninitial.kind = cat\ninitial.separation = 6\n"
    "evolve.dt = 1e-3\nevolve.t_end = 2\nevolve.records = 8\nevolve.hamiltonian = false\n"
    "noise.nu = 1\nnoise.seed = 1\nnoise.realizations = 1000\n";

Verdict decoherence_law() {
  auto s = parse_scenario(kDecoherence);
  s.threads = threads();
  const auto r = run_decoherence_study(s);
  Verdict v;
  details(r, 7, v);
  v.summary = fmt::format("off-diagonal decay exp(-t^2 nu^2) reproduced, pooled coefficient {:.4f}",
                          metric(r, "pooled.coefficient"));
  return v;
}

Verdict mc_convergence() {
  auto s = parse_scenario(kDecoherence);
  s.threads = threads();
  const auto r = run_convergence_study(s, {100, 1000, 10000});
  Verdict v;
  details(r, 8, v);
  v.summary = fmt::format("ensemble error slope {:.3f} against log M", metric(r, "slope"));
  return v;
}

Verdict void_probability() {
  const auto r = run_void_study(parse_scenario("void.trials = 100000\nvoid.seed = 11\n"), {0.5});
  Verdict v;
  details(r, 9, v);
  const auto& row = r.tables.at(0).rows.at(0);
  v.summary = fmt::format("empirical {:.4f} +- {:.4f}, exact {:.4f}, cubic form exp(-dr^3) {:.4f}", row[7], row[8],
                          row[6], row[5]);
  return v;
}

// Error against the exactly rotated Gaussian after half a harmonic period.
double rotation_error(const std::string& engine, double dt) {
  const auto g = GridSpec::make(64, 10.0);
  const double cx = 0.0, cp = 1.0, T = std::numbers::pi;
  const auto v = Potential::harmonic(1.0);
  EvolverConfig cfg;
  cfg.dt = dt;
  cfg.n_steps = std::lround(T / dt);
  cfg.record_every = cfg.n_steps;
  const auto f0 = make_gaussian_phase_space(cx, cp, kS, kS, g);
  DensityGrid f;
  if (engine == "classical")
    f = to_density(liouville_evolve_xp(f0, v, cfg).states.back());
  else if (engine == "qq")
    f = qq_liouville_evolve(to_density(f0), v, superoperator_field(v, g), cfg).states.back();
  else
    f = von_neumann_evolve(to_density(f0), v, cfg).states.back();
  const double t = static_cast<double>(cfg.n_steps) * dt;
  const double x = cx * std::cos(t) + cp * std::sin(t), p = cp * std::cos(t) - cx * std::sin(t);
  double e = 0.0;
  for (int a = 0; a < g.n_points; ++a)
    for (int b = 0; b < g.n_points; ++b)
      e = std::max(e, std::abs(f(a, b) - test::gaussian_density_element(g.coordinate(a), g.coordinate(b), x, p, kS, kS)));
  return e;
}

Verdict strang_order() {
  Verdict v;
  const std::vector<double> steps{0.04, 0.02, 0.01};
  double lo = 1e300, hi = 0.0;
  for (const char* engine : {"classical", "qq", "vonneumann"}) {
    std::vector<double> err;
    for (double dt : steps) err.push_back(rotation_error(engine, dt));
    for (std::size_t i = 0; i + 1 < err.size(); ++i) {
      const double ratio = err[i] / err[i + 1];
      const bool ok = std::abs(ratio - 4.0) <= 0.8;
      fmt::print("    {} {} dt {} -> {}: error {:.3e} -> {:.3e}, ratio {:.3f}\n", ok ? "ok  " : "FAIL", engine, steps[i],
                 steps[i + 1], err[i], err[i + 1], ratio);
      v.pass = v.pass && ok;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  v.summary = fmt::format("error ratio per halving of dt in [{:.3f}, {:.3f}], required 4 +- 0.8", lo, hi);
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Verdict()>>> criteria{
      {1, [] { return superoperator_identities(1); }},
      {2, [] { return superoperator_identities(2); }},
      {3, [] { return superoperator_identities(3); }},
      {4, indistinguishable},
      {5, anharmonic},
      {6, spectrum_symmetry},
      {7, decoherence_law},
      {8, mc_convergence},
      {9, void_probability},
      {10, strang_order},
  };
  int failed = 0;
  for (const auto& [id, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, fmt::format("error: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    fmt::print("{} criterion {}: {} ({:.1f} s)\n", v.pass ? "PASS" : "FAIL", id, v.summary, secs);
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
