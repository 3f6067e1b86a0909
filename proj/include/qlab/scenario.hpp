#pragma once

// Scenario files: one `key = value` per line, dotted keys, `#` comments.
// Values are numbers, true/false, bare or double-quoted strings, or
// bracketed comma-separated lists. Unknown and duplicate keys are errors.
// The full key list is in README.md.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qlab/causet.hpp"
#include "qlab/evolvers.hpp"
#include "qlab/potentials.hpp"
#include "qlab/stochastic.hpp"

namespace qlab {

struct PotentialSpec {
  PotentialKind kind = PotentialKind::constant;
  /// False when potential.kind was left at its default.
  bool declared = false;
  double c = 0.0;
  double a = 0.0, b = 0.0;  // linear a x + b
  LinearDrive drive;
  double omega = 1.0;
  double lambda = 1.0;
  std::vector<double> coefficients;
  std::vector<double> breakpoints, values;

  Potential build() const;
};

struct InitialSpec {
  enum class Kind { gaussian, cat };
  Kind kind = Kind::gaussian;
  double x = 0.0, p = 0.0;
  double sigma_x = 0.70710678118654752, sigma_p = 0.70710678118654752;
  double separation = 6.0, sigma = 0.70710678118654752;
};

struct NoiseSettings {
  std::vector<double> nu;  // per grid point
  std::uint64_t seed = 0;
  long realizations = 1000;
  NoiseMode mode = NoiseMode::quenched;
  bool present = false;

  NoiseSpec spec() const { return NoiseSpec{nu, seed, NoiseSpec::Distribution::gaussian}; }
};

struct VoidSettings {
  SprinkleRegion region;
  long trials = 100000;
  std::uint64_t seed = 0;
};

struct Scenario {
  std::string source;
  std::uint64_t hash = 0;
  GridSpec grid;
  PotentialSpec potential;
  InitialSpec initial;
  /// all, classical, qq, vonneumann, lindblad
  std::string engine = "all";
  EvolverConfig evolve;
  double t_end = 1.0;
  /// false: kinetic term off and V replaced by 0 in every engine.
  bool hamiltonian = true;
  NoiseSettings noise;
  std::vector<std::pair<int, int>> probes;
  std::filesystem::path output_dir = "out";
  VoidSettings void_study;
  int threads = 1;

  /// Effective potential (zero when the Hamiltonian is disabled).
  Potential effective_potential() const;
  /// Phase-space Gaussian of the initial spec. Throws DomainError if it
  /// does not fit the grid.
  PhaseSpaceDistribution initial_phase_space() const;
  /// Initial density grid: image of the Gaussian, or the cat state.
  DensityGrid initial_density() const;
};

/// Parses scenario text; `origin` names the source in error messages.
Scenario parse_scenario(const std::string& text, const std::string& origin = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);

/// Every key the parser accepts.
const std::vector<std::string>& scenario_keys();

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace qlab
