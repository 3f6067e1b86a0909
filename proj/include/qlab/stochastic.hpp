#pragma once

// Quenched potential noise, noisy von Neumann ensembles, the averaged
// (Lindblad) master equation and its closed-form decay law.
//
// Noise lives on the position grid: delta V(x_i) are independent Gaussians
// with standard deviation nu(x_i), i.e. the white-noise correlation is read
// as a Kronecker delta per cell. Under the quenched average with H neglected
//
//   <f(x,y;t)> = f(x,y;0) exp(-t^2 (nu^2(x) + nu^2(y)) / 2).

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlab/evolvers.hpp"

namespace qlab {

struct NoiseSpec {
  enum class Distribution { gaussian };

  /// nu(x_i) per grid point, >= 0.
  std::vector<double> nu;
  std::uint64_t seed = 0;
  Distribution distribution = Distribution::gaussian;

  static NoiseSpec uniform(const GridSpec& grid, double nu0, std::uint64_t seed);
  /// Throws ConfigError on negative or non-finite nu.
  void validate() const;
};

struct NoiseField {
  std::vector<double> values;
  std::uint64_t seed = 0;  // seed of the stream that produced the values
};

enum class NoiseMode {
  quenched,   // one field per realization, fixed over the whole window
  resampled,  // fresh field every step (exploration only)
};

NoiseMode parse_noise_mode(const std::string& s);
std::string to_string(NoiseMode m);

/// Seed of the stream for (seed, realization, step); pure function.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t realization, std::uint64_t step = 0);

NoiseField sample_noise(const NoiseSpec& spec, long realization);
/// Field used at a given step of a resampled realization.
NoiseField sample_noise(const NoiseSpec& spec, long realization, long step);

/// A realization failed; what() carries the engine message.
class RealizationError : public std::runtime_error {
 public:
  RealizationError(const std::string& what, long realization, long step)
      : std::runtime_error(what), realization_(realization), step_(step) {}
  long realization() const noexcept { return realization_; }
  /// Step reported by the engine, -1 when not applicable.
  long step() const noexcept { return step_; }

 private:
  long realization_;
  long step_;
};

struct EnsembleOptions {
  long realizations = 100;
  NoiseMode mode = NoiseMode::quenched;
  int threads = 1;
  /// Realizations 2j and 2j+1 use +delta V_j and -delta V_j. The reported
  /// standard errors still assume independent realizations.
  bool antithetic = false;
};

struct EnsembleReport {
  long n_realizations = 0;
  NoiseMode mode = NoiseMode::quenched;
  std::vector<double> times;
  std::vector<DensityGrid> mean;
  /// Standard error of the mean per element, |z| sense:
  /// sqrt(sum |z_k - mean|^2 / (M - 1) / M).
  std::vector<std::vector<double>> standard_error;
};

/// Average of von Neumann evolutions under V + delta V_k. The reduction is
/// independent of the thread count. Requires M >= 2.
EnsembleReport ensemble_evolve(const DensityGrid& f0, const Potential& V, const NoiseSpec& spec,
                               const EnsembleOptions& opts, const EvolverConfig& cfg);

/// Strang-split master equation
///   d_t f = -i[H, f] - t ({nu^2, f} - 2 nu f nu)
/// on the (Q,q) grid; nu holds nu(x_i).
DensityTrajectory lindblad_evolve(const DensityGrid& f0, const Potential& V, std::span<const double> nu,
                                  const EvolverConfig& cfg);

/// Closed-form decay with H neglected.
DensityGrid decay_predict(const DensityGrid& f0, std::span<const double> nu, double t);

struct EnsembleComparison {
  std::vector<double> times;
  std::vector<double> max_norm;
  std::vector<double> l2;
  /// Fraction of elements with |mean - reference| > 3 SE + 1e-10, per time.
  std::vector<double> outlier_fraction;
  /// Times with t * max(nu) <= 2 enter the verdict.
  std::vector<bool> judged;
  double max_allowed_outlier_fraction = 0.01;
  bool pass = false;
};

/// Compares the ensemble mean with a reference trajectory recorded at the same
/// times. nu is used only to decide which times are judged.
EnsembleComparison compare_ensemble_vs_lindblad(const EnsembleReport& report, const DensityTrajectory& reference,
                                                std::span<const double> nu);

}  // namespace qlab
