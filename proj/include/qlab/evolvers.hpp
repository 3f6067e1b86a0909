#pragma once

// Time evolution engines. All use Strang splitting with exact spectral
// factors on a periodic grid:
//
//   classical  (x,p):  -d_t f = { p d_x - v'(x) d_p } f
//              free drift in (k_x, p), force kick as a phase e^{-i y v'(x) dt}
//              in (x, y)
//   qq         (Q,q):  i d_t f = { H_Q - H_q + E(Q,q) } f
//   vonneumann (Q,q):  i d_t f = { H_Q - H_q } f           (E dropped)
//
// with H = -1/2 d^2 + v. Kinetic factors exp(-i h (k_Q^2 - k_q^2)/2) act in
// the 2D Fourier basis, potential factors exp(-i dt [v(Q) - v(q) + E]) act
// pointwise. Time-dependent potentials are evaluated at the midpoint of each
// step.

#include <string>
#include <vector>

#include "qlab/grid.hpp"
#include "qlab/potentials.hpp"

namespace qlab {

struct EvolverConfig {
  double dt = 1e-3;
  long n_steps = 1;
  long record_every = 1;
  /// Maximum allowed edge/peak ratio of |f| on the outermost grid ring.
  double tail_threshold = 1e-10;
  /// When false the -1/2 d^2 terms are dropped (only the potential part of H acts).
  bool kinetic = true;

  void validate() const;
};

template <typename State>
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<StateDiagnostics> diagnostics;
  std::vector<std::string> warnings;
};

using PhaseSpaceTrajectory = Trajectory<PhaseSpaceDistribution>;
using DensityTrajectory = Trajectory<DensityGrid>;

/// Recorded step indices: 0, every record_every steps, and the last step.
std::vector<long> record_steps(const EvolverConfig& cfg);

/// Classical Liouville flow of a phase-space ensemble. Throws BoundaryError
/// when the tail threshold is exceeded at a recorded step.
PhaseSpaceTrajectory liouville_evolve_xp(const PhaseSpaceDistribution& f0, const Potential& v,
                                         const EvolverConfig& cfg);

/// Liouville flow in the Hilbert-space form, including the coupling E.
DensityTrajectory qq_liouville_evolve(const DensityGrid& f0, const Potential& v, const SuperoperatorField& E,
                                      const EvolverConfig& cfg);

/// von Neumann evolution with H = -1/2 d^2 + v.
DensityTrajectory von_neumann_evolve(const DensityGrid& f0, const Potential& v, const EvolverConfig& cfg);

/// The Liouville generator H_Q - H_q + E as a dense real symmetric matrix on
/// vec(f), index a*N + b, with periodic three-point Laplacians.
struct GeneratorSpectrum {
  int dimension = 0;
  std::vector<double> matrix;       // row-major dimension x dimension
  std::vector<double> eigenvalues;  // ascending
};

/// Refuses (DomainError) grids with more than 32 points per axis.
GeneratorSpectrum dense_generator(const Potential& v, const GridSpec& grid);

/// Eigenvalues of the one-body operator -1/2 d^2 + v with the same
/// discretization as dense_generator, ascending.
std::vector<double> one_body_levels(const Potential& v, const GridSpec& grid);

/// max_i min_j |lambda_i + lambda_j| over a sorted eigenvalue list; zero for a
/// spectrum symmetric about zero.
double spectrum_asymmetry(const std::vector<double>& sorted_eigenvalues);

}  // namespace qlab
