#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <optional>

#include "qlab/errors.hpp"
#include "qlab/outputs.hpp"
#include "qlab/scenario.hpp"
#include "qlab/studies.hpp"

using namespace qlab;

namespace {

enum Exit { kPass = 0, kFail = 1, kConfig = 2, kRuntime = 3 };

struct Globals {
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string out;
};

// Overrides change the results, so they are folded into the hash.
void apply_globals(Scenario& s, const Globals& g, const std::string& extra) {
  std::string overrides = extra;
  if (g.seed) {
    s.noise.seed = *g.seed;
    s.void_study.seed = *g.seed;
    overrides += fmt::format(" seed={}", *g.seed);
  }
  if (g.threads < 1) throw ConfigError(fmt::format("--threads must be >= 1, got {}", g.threads));
  s.threads = g.threads;
  if (!g.out.empty()) s.output_dir = g.out;
  if (!overrides.empty()) s.hash = fnv1a(format_hash(s.hash) + overrides);
}

int finish(const RunReport& rep, const std::filesystem::path& dir) {
  const auto files = emit_outputs(rep, dir);
  for (const auto& w : rep.warnings) fmt::print(stderr, "warning: {}\n", w);
  for (const auto& c : rep.checks)
    fmt::print("{} [criterion {}] {}: {:.6g} {} {:.6g}\n", c.pass ? "PASS" : "FAIL", c.criterion, c.name, c.observed,
               c.relation, c.threshold);
  fmt::print("{} {} in {:.2f} s, scenario {}, {} files in {}\n", rep.study, rep.pass() ? "PASS" : "FAIL",
             rep.wall_seconds, format_hash(rep.scenario_hash), files.size(), dir.string());
  return rep.pass() ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classical and quantum phase-space dynamics lab"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Seed for noise, sprinkling and random checks");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output directory (overrides output.dir)");

  std::string scenario_path;
  auto scenario_flag = [&](CLI::App* sub, bool required) {
    auto* o = sub->add_option("--scenario", scenario_path, "Scenario file")->check(CLI::ExistingFile);
    if (required) o->required();
  };

  auto* evolve = app.add_subcommand("evolve", "Run one engine and write snapshots and diagnostics");
  scenario_flag(evolve, true);
  std::string engine;
  evolve->add_option("--engine", engine, "Engine")
      ->check(CLI::IsMember({"classical", "qq", "vonneumann", "lindblad"}));

  auto* compare = app.add_subcommand("compare", "Equivalence study of the classical, (Q,q) and von Neumann engines");
  scenario_flag(compare, true);

  auto* decohere = app.add_subcommand("decohere", "Noisy ensemble versus master equation and decay law");
  scenario_flag(decohere, true);
  long realizations = 0;
  std::string mode;
  std::vector<long> convergence;
  decohere->add_option("--realizations", realizations, "Ensemble size M")->check(CLI::Range(2L, 100000000L));
  decohere->add_option("--mode", mode, "Noise mode")->check(CLI::IsMember({"quenched", "resampled"}));
  decohere->add_option("--convergence", convergence, "Run the Monte Carlo convergence study over these M instead")
      ->delimiter(',');

  auto* voids = app.add_subcommand("void", "Void probability of a sprinkled region");
  scenario_flag(voids, false);
  std::vector<double> radii;
  double rho = 0.0, duration = 0.0;
  long trials = 0;
  std::string geometry;
  voids->add_option("--dr", radii, "Radius (or half side); repeat or comma-separate for several rows")->delimiter(',');
  voids->add_option("--rho", rho, "Sprinkling density")->check(CLI::PositiveNumber);
  voids->add_option("--trials", trials, "Number of trials")->check(CLI::Range(100L, 1000000000L));
  voids->add_option("--duration", duration, "Time extent")->check(CLI::PositiveNumber);
  voids->add_option("--geometry", geometry, "Region shape")->check(CLI::IsMember({"ball", "box"}));

  auto* segcheck = app.add_subcommand("segcheck", "Identities of the coupling E and of segment sums");
  SegcheckOptions seg;
  segcheck->add_option("--breakpoints", seg.breakpoints, "Breakpoints of the random potential")
      ->check(CLI::Range(2, 1000000));
  segcheck->add_option("--pairs", seg.pairs, "Random (q, Q) pairs")->check(CLI::Range(1, 100000000));
  segcheck->add_option("--grid-n", seg.grid_points, "Grid points per axis");
  segcheck->add_option("--grid-L", seg.half_width, "Grid half-width");

  auto* spectrum = app.add_subcommand("spectrum", "Spectrum of the dense Liouville generator");
  scenario_flag(spectrum, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfig;
  }
  if (*seed_opt) g.seed = seed_value;

  try {
    // Everything is validated before the output directory is touched.
    if (segcheck->parsed()) {
      if (g.seed) seg.seed = *g.seed;
      GridSpec::make(seg.grid_points, seg.half_width);
      const std::filesystem::path dir = g.out.empty() ? "out" : g.out;
      prepare_output_dir(dir);
      return finish(run_segcheck(seg), dir);
    }

    Scenario s;
    if (!scenario_path.empty()) s = load_scenario(scenario_path);
    std::string extra;
    RunReport rep;

    if (evolve->parsed()) {
      if (!engine.empty()) {
        s.engine = engine;
        extra += " engine=" + engine;
      }
      if (s.engine == "all")
        throw ConfigError("evolve runs one engine: set --engine or the scenario key 'engine'");
      apply_globals(s, g, extra);
      if (s.engine == "classical") s.initial_phase_space();
      s.initial_density();
      prepare_output_dir(s.output_dir);
      rep = run_evolve_study(s, s.engine);
    } else if (compare->parsed()) {
      if (!s.potential.declared) throw ConfigError("potential.kind: the equivalence study needs an explicit kind");
      apply_globals(s, g, extra);
      s.initial_phase_space();
      prepare_output_dir(s.output_dir);
      rep = run_equivalence_study(s);
    } else if (decohere->parsed()) {
      if (realizations) {
        s.noise.realizations = realizations;
        extra += fmt::format(" realizations={}", realizations);
      }
      if (!mode.empty()) {
        s.noise.mode = parse_noise_mode(mode);
        extra += " mode=" + mode;
      }
      for (long m : convergence)
        if (m < 2) throw ConfigError(fmt::format("--convergence: ensemble sizes must be >= 2, got {}", m));
      if (convergence.size() == 1) throw ConfigError("--convergence needs at least two ensemble sizes");
      if (!convergence.empty()) extra += " convergence=" + fmt::format("{}", fmt::join(convergence, ","));
      apply_globals(s, g, extra);
      if (!s.noise.present) throw ConfigError("decohere: the scenario has no noise section (noise.nu, ...)");
      if (s.probes.empty() && s.initial.kind != InitialSpec::Kind::cat)
        throw ConfigError("probes: required unless initial.kind = cat");
      s.initial_density();
      prepare_output_dir(s.output_dir);
      rep = convergence.empty() ? run_decoherence_study(s) : run_convergence_study(s, convergence);
    } else if (voids->parsed()) {
      if (scenario_path.empty()) {
        s.void_study.region.radius = 0.5;
        s.hash = 0;
      }
      auto& vd = s.void_study;
      if (rho > 0.0) vd.region.density = rho;
      if (duration > 0.0) vd.region.duration = duration;
      if (trials > 0) vd.trials = trials;
      if (!geometry.empty()) vd.region.geometry = parse_geometry(geometry);
      for (double r : radii)
        if (!(r > 0.0)) throw ConfigError(fmt::format("--dr must be > 0, got {}", r));
      extra += fmt::format(" dr={} rho={} duration={} trials={} geometry={}", fmt::join(radii, ","), vd.region.density,
                           vd.region.duration, vd.trials, to_string(vd.region.geometry));
      apply_globals(s, g, extra);
      vd.region.validate();
      prepare_output_dir(s.output_dir);
      rep = run_void_study(s, radii);
    } else if (spectrum->parsed()) {
      apply_globals(s, g, extra);
      if (s.grid.n_points > 32)
        throw ConfigError(fmt::format("grid.n: the dense spectrum needs n <= 32, got {}", s.grid.n_points));
      prepare_output_dir(s.output_dir);
      rep = run_spectrum_study(s);
    }
    return finish(rep, s.output_dir);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return kConfig;
  } catch (const DomainError& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return kConfig;
  } catch (const std::exception& e) {
    fmt::print(stderr, "runtime error: {}\n", e.what());
    return kRuntime;
  }
}
