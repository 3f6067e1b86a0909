#pragma once

// Grids, state containers and the transform chain
//
//   f(x,p)  --Fourier in p-->  f(x,y)  --Q = x + y/2, q = x - y/2-->  f(Q,q)
//
// Conventions: hbar = m = 1. f(x,y) = \int dp e^{ipy} f(x,p), so that the
// trace of the (Q,q) matrix equals the phase-space probability, and
// f(x,p) = (1/2pi) \int dy e^{-ipy} f(x,y).
//
// All axes are periodic and stored centered: index j <-> (j - N/2) * spacing.
// The position axes (x, Q, q) span [-L, L) with spacing D = 2L/N. The y axis
// uses the same spacing D (period 2L), which makes the momentum axis the
// conjugate one: spacing pi/L and half-width N*pi/(2L).
//
// A pair (Q_a, q_b) has y = Q - q = d*D with d = (a - b) wrapped into
// [-N/2, N/2) and x = q + y/2. For even d, x sits on the lattice and the
// remap is a pure index permutation. For odd d, x sits half a cell off the
// lattice and the column is moved there by an exact spectral shift.

#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "qlab/fft.hpp"

namespace qlab {

/// Square periodic grid over [-L, L) x [-L, L) with N points per axis.
struct GridSpec {
  int n_points = 0;
  double half_width = 0.0;

  /// Validated constructor: N even and >= 8, L > 0.
  static GridSpec make(int n_points, double half_width);

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(n_points) * static_cast<std::size_t>(n_points);
  }
  double spacing() const noexcept { return 2.0 * half_width / n_points; }
  double coordinate(int i) const noexcept { return (i - n_points / 2) * spacing(); }

  double momentum_spacing() const noexcept { return std::numbers::pi / half_width; }
  double momentum_half_width() const noexcept { return 0.5 * n_points * momentum_spacing(); }
  double momentum(int k) const noexcept { return (k - n_points / 2) * momentum_spacing(); }

  /// Angular wavenumber of FFT-ordered mode n along a position axis.
  double wavenumber(int n) const noexcept {
    const int s = n < n_points / 2 ? n : n - n_points;
    return std::numbers::pi * s / half_width;
  }

  bool operator==(const GridSpec&) const = default;
};

/// Real classical ensemble f(x,p) on the (x, p) grid; values[i*N + k].
struct PhaseSpaceDistribution {
  GridSpec grid;
  std::vector<double> values;
  double time = 0.0;

  double operator()(int i, int k) const { return values[static_cast<std::size_t>(i) * grid.n_points + k]; }
  /// \sum f dx dp
  double mass() const;
};

/// f(x,y) on the (x, y) grid; values[i*N + m], y_m = (m - N/2) * D.
struct MixedGrid {
  GridSpec grid;
  std::vector<cplx> values;
  double time = 0.0;
};

/// Matrix elements f(Q,q); values[a*N + b].
struct DensityGrid {
  GridSpec grid;
  std::vector<cplx> values;
  double time = 0.0;

  cplx operator()(int a, int b) const { return values[static_cast<std::size_t>(a) * grid.n_points + b]; }
  cplx& operator()(int a, int b) { return values[static_cast<std::size_t>(a) * grid.n_points + b]; }
};

struct StateDiagnostics {
  cplx trace;
  double hermiticity_defect = 0.0;  // max |f(Q,q) - conj f(q,Q)|
  double min_reconstructed_density = 0.0;
};

/// Normalized product Gaussian in phase space. Throws DomainError when the
/// relative tail at the nearest grid boundary is not below 1e-12.
PhaseSpaceDistribution make_gaussian_phase_space(double center_x, double center_p, double sigma_x,
                                                 double sigma_p, const GridSpec& grid);

/// Gaussian wave packet psi(x) ~ exp(-(x-x0)^2/(4 sigma^2) + i p0 x), unnormalized.
std::vector<cplx> gaussian_wavepacket(double x0, double p0, double sigma, const GridSpec& grid);

/// |psi><psi| normalized to unit trace.
DensityGrid pure_state_density(std::span<const cplx> psi, const GridSpec& grid);

/// Superposition of two packets of width sigma at +-separation/2, as a
/// normalized pure-state density matrix (diagonal peaks plus cross terms).
DensityGrid make_cat_state(double separation, double sigma, const GridSpec& grid);

MixedGrid xp_to_xy(const PhaseSpaceDistribution& f);
/// Inverse transform; keeps the (roundoff-level) imaginary part.
std::vector<cplx> xy_to_xp_complex(const MixedGrid& f);
/// Inverse transform, real part.
PhaseSpaceDistribution xy_to_xp(const MixedGrid& f);

DensityGrid xy_to_Qq(const MixedGrid& f);
MixedGrid Qq_to_xy(const DensityGrid& f);

inline DensityGrid to_density(const PhaseSpaceDistribution& f) { return xy_to_Qq(xp_to_xy(f)); }
inline PhaseSpaceDistribution to_phase_space(const DensityGrid& f) { return xy_to_xp(Qq_to_xy(f)); }

StateDiagnostics diagnostics(const DensityGrid& f);
/// Diagnostics of the (Q,q) image; the negativity is read off f itself.
StateDiagnostics diagnostics(const PhaseSpaceDistribution& f);

/// Largest |f| on the outermost ring of grid cells, relative to max |f|.
double boundary_tail(std::span<const cplx> values, int n);
double boundary_tail(std::span<const double> values, int n);

double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b);
/// sqrt(\sum |a-b|^2 * cell area)
double l2_diff(std::span<const cplx> a, std::span<const cplx> b, double cell_area);

}  // namespace qlab
