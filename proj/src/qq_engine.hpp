#pragma once

// Shared stepping machinery for every equation posed on the (Q,q) grid:
// the Liouville form with E, von Neumann, noisy von Neumann and the
// Lindblad master equation.

#include <functional>
#include <span>

#include "qlab/evolvers.hpp"

namespace qlab::detail {

struct QqDynamics {
  const Potential* potential = nullptr;
  /// Added to v at each grid point (quenched noise realization); may be empty.
  std::span<const double> potential_offset;
  /// Called before step s to refill the offset (resampled noise); optional.
  std::function<void(long step, std::span<double> offset)> resample_offset;
  const SuperoperatorField* coupling = nullptr;
  /// nu^2 per grid point. When non-empty each step applies the dissipator
  /// f(x,y) <- f(x,y) exp(-(t + dt/2) dt (nu^2(x) + nu^2(y))) for x != y
  /// between two unitary half steps.
  std::span<const double> dephasing_rates;
  /// Compute full diagnostics (with phase-space reconstruction) per record.
  bool full_diagnostics = true;
};

DensityTrajectory evolve_qq_form(const DensityGrid& f0, const QqDynamics& dyn, const EvolverConfig& cfg);

}  // namespace qlab::detail
