#pragma once

// Experiment pipelines. Each study returns a RunReport: metrics, checks
// (every check names the acceptance criterion it belongs to), tabular
// curves for plotting and optional state snapshots.

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qlab/scenario.hpp"

namespace qlab {

struct Check {
  std::string name;
  int criterion = 0;
  double observed = 0.0;
  double threshold = 0.0;
  std::string relation;  // "<=" or ">="
  bool pass = false;
};

struct Table {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  /// Also written as a two-column gnuplot file (first column vs second).
  bool curve = true;
};

struct Snapshot {
  std::string name;
  std::variant<DensityGrid, PhaseSpaceDistribution> state;
};

struct RunReport {
  std::string study;
  std::uint64_t scenario_hash = 0;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<Check> checks;
  std::vector<std::pair<std::string, std::uint64_t>> seeds;
  std::vector<std::string> warnings;
  std::vector<Table> tables;
  std::vector<Snapshot> snapshots;
  double wall_seconds = 0.0;

  bool pass() const;
  void metric(const std::string& name, double value) { metrics.emplace_back(name, value); }
  /// Adds a check; the verdict is computed from the relation.
  void check(const std::string& name, int criterion, double observed, const std::string& relation,
             double threshold);
};

/// One engine (classical, qq, vonneumann or lindblad) with snapshots at
/// every record and per-record diagnostics.
RunReport run_evolve_study(const Scenario& s, const std::string& engine);

/// Classical, (Q,q) and von Neumann engines from the same initial ensemble,
/// pairwise distances per record. Checks: distances <= 1e-6 when E is
/// identically zero on the grid, otherwise divergence >= 1e-3 at t = 1 and
/// monotone growth over recorded t in [0.5, 1.5].
RunReport run_equivalence_study(const Scenario& s);

/// Quenched (or resampled) ensemble and the Lindblad stepper from the
/// scenario's initial state, followed at the probe points. Cat states get
/// default probes at the cross peak and a diagonal peak.
RunReport run_decoherence_study(const Scenario& s);

/// Off-diagonal RMS error of the ensemble mean against the closed-form decay
/// at t_end for each M, with the log-log slope. Uses the scenario's initial
/// state with H disabled.
RunReport run_convergence_study(const Scenario& s, const std::vector<long>& realizations);

/// One row per radius.
RunReport run_void_study(const Scenario& s, const std::vector<double>& radii);

/// Dense generator spectrum of the scenario potential.
RunReport run_spectrum_study(const Scenario& s);

struct SegcheckOptions {
  int grid_points = 128;
  double half_width = 10.0;
  int breakpoints = 50;
  int pairs = 1000;
  std::uint64_t seed = 0;
};

/// Identities of the coupling E and of segment sums.
RunReport run_segcheck(const SegcheckOptions& opts);

}  // namespace qlab
