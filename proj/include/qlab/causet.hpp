#pragma once

// Poisson sprinkling of spacetime elements and the probability that a region
// is empty of them. Units are Planck units; rho is elements per unit
// 4-volume.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace qlab {

struct SprinkleRegion {
  enum class Geometry { ball_times_interval, box };

  Geometry geometry = Geometry::ball_times_interval;
  /// Ball radius, or half the box side.
  double radius = 1.0;
  double duration = 1.0;
  double density = 1.0;

  /// Throws ConfigError unless radius, duration and density are positive.
  void validate() const;
  double four_volume() const;
};

SprinkleRegion::Geometry parse_geometry(const std::string& s);
std::string to_string(SprinkleRegion::Geometry g);

struct VoidProbability {
  double cubic = 0.0;  // exp(-dr^3), geometric constant dropped
  double exact = 0.0;  // exp(-rho * (4 pi / 3) dr^3 * 1)
};

VoidProbability void_probability_analytic(double dr, double density = 1.0);

using Event = std::array<double, 4>;  // t, x, y, z

/// Poisson(rho V) points uniform in the region; deterministic per (seed, trial).
std::vector<Event> sprinkle(const SprinkleRegion& region, std::uint64_t seed, std::uint64_t trial);

struct VoidEstimate {
  double analytic_cubic = 0.0;
  double analytic_exact = 0.0;  // exp(-rho V4) of the region as given
  double empirical = 0.0;
  double standard_error = 0.0;  // binomial, from the exact probability
  long n_trials = 0;
  long empty_trials = 0;
  double mean_count = 0.0;

  /// |empirical - analytic_exact| <= 3 standard errors.
  bool consistent() const;
};

/// Requires n_trials >= 100. Counts only; positions are not drawn.
VoidEstimate void_probability_mc(const SprinkleRegion& region, long n_trials, std::uint64_t seed);

}  // namespace qlab
