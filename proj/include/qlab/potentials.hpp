#pragma once

// Potential models and the anharmonic coupling
//
//   E(Q,q) = (Q - q) v'((Q + q)/2) - v(Q) + v(q)
//
// between the two copies of configuration space. E is the error of the
// one-point midpoint rule for \int_q^Q v'(s) ds, which is why it vanishes for
// every potential of degree <= 2 and is antisymmetric under Q <-> q.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qlab/grid.hpp"

namespace qlab {

enum class PotentialKind { constant, linear, harmonic, quartic, polynomial, piecewise_linear };

std::string_view to_string(PotentialKind kind);

/// Continuous potential that is linear between strictly increasing
/// breakpoints s_n, extended linearly beyond the first and last breakpoint.
/// At a breakpoint the derivative is the slope of the segment to its left
/// (the first segment's slope at s_0).
class PiecewiseLinearPotential {
 public:
  PiecewiseLinearPotential(std::vector<double> breakpoints, std::vector<double> values);

  double value(double x) const;
  double derivative(double x) const;

  std::span<const double> breakpoints() const noexcept { return breakpoints_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> slopes() const noexcept { return slopes_; }
  /// delta_n = s_{n+1} - s_n
  std::vector<double> linearity_lengths() const;
  double lower() const noexcept { return breakpoints_.front(); }
  double upper() const noexcept { return breakpoints_.back(); }

 private:
  // Index of the segment whose slope applies at x.
  std::size_t segment_of(double x) const;

  std::vector<double> breakpoints_;
  std::vector<double> values_;
  std::vector<double> slopes_;
};

/// Periodic modulation of the slope of a linear potential,
/// a(t) = a + amplitude * sin(frequency * t): a spatially constant,
/// time-dependent force.
struct LinearDrive {
  double amplitude = 0.0;
  double frequency = 0.0;
};

class Potential {
 public:
  static Potential constant(double c);
  /// v = a x + b
  static Potential linear(double a, double b, LinearDrive drive = {});
  /// v = omega^2 x^2 / 2
  static Potential harmonic(double omega);
  /// v = lambda x^4
  static Potential quartic(double lambda);
  /// v = \sum_k c_k x^k
  static Potential polynomial(std::vector<double> coefficients);
  static Potential piecewise(PiecewiseLinearPotential pl);

  PotentialKind kind() const noexcept { return kind_; }
  bool time_dependent() const noexcept { return drive_.amplitude != 0.0; }

  double value(double x, double t = 0.0) const;
  double derivative(double x, double t = 0.0) const;

  /// Pointwise E(Q,q). Polynomial terms of degree <= 2 cancel identically and
  /// are dropped, so E is exactly zero for constant, linear and harmonic kinds.
  double anharmonic_coupling(double Q, double q) const;

  /// Polynomial coefficients (empty for piecewise-linear).
  std::span<const double> coefficients() const noexcept { return coefficients_; }
  const PiecewiseLinearPotential* piecewise_linear() const noexcept {
    return pl_ ? &*pl_ : nullptr;
  }

 private:
  Potential(PotentialKind kind, std::vector<double> coefficients);

  PotentialKind kind_;
  std::vector<double> coefficients_;
  LinearDrive drive_;
  std::optional<PiecewiseLinearPotential> pl_;
};

/// Dense antisymmetric field E(Q_a, q_b) on a (Q,q) grid; values[a*N + b].
struct SuperoperatorField {
  GridSpec grid;
  std::vector<double> values;

  double operator()(int a, int b) const { return values[static_cast<std::size_t>(a) * grid.n_points + b]; }
  double max_abs() const;
};

/// E on the grid. Only the strict upper triangle is evaluated; the lower one
/// is its negative and the diagonal is zero, so antisymmetry is exact.
SuperoperatorField superoperator_field(const Potential& v, const GridSpec& grid);

/// (Q - q) v'((Q + q)/2), the one-point midpoint estimate of v(Q) - v(q).
double midpoint_term(const Potential& v, double q, double Q);

/// \int_q^Q v'(s) ds as a sum over linear pieces, each contributing
/// (length) * v'(piece midpoint); partial pieces at either end are
/// integrated exactly. Throws DomainError if q or Q lies outside
/// [s_0, s_last].
double segment_sum(const PiecewiseLinearPotential& v, double q, double Q);

/// Samples V at breakpoints lo, lo + delta, ... covering [lo, hi].
PiecewiseLinearPotential linearize(const Potential& V, double delta, double lo, double hi);
/// Breakpoints at lo + cumulative deltas; throws DomainError unless they reach hi.
PiecewiseLinearPotential linearize(const Potential& V, std::span<const double> deltas, double lo, double hi);

}  // namespace qlab
