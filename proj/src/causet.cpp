#include "qlab/causet.hpp"

#include <cmath>
#include <fmt/format.h>
#include <numbers>
#include <random>

#include "qlab/errors.hpp"

namespace qlab {

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) { return std::mt19937_64(mix(mix(seed) ^ trial)); }

}  // namespace

void SprinkleRegion::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError(fmt::format("void.dr must be > 0, got {}", radius));
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw ConfigError(fmt::format("void.duration must be > 0, got {}", duration));
  if (!(density > 0.0) || !std::isfinite(density)) throw ConfigError(fmt::format("void.rho must be > 0, got {}", density));
}

double SprinkleRegion::four_volume() const {
  const double spatial = geometry == Geometry::ball_times_interval
                             ? 4.0 / 3.0 * std::numbers::pi * radius * radius * radius
                             : 8.0 * radius * radius * radius;
  return spatial * duration;
}

SprinkleRegion::Geometry parse_geometry(const std::string& s) {
  if (s == "ball") return SprinkleRegion::Geometry::ball_times_interval;
  if (s == "box") return SprinkleRegion::Geometry::box;
  throw ConfigError(fmt::format("unknown void geometry '{}' (expected ball or box)", s));
}

std::string to_string(SprinkleRegion::Geometry g) {
  return g == SprinkleRegion::Geometry::ball_times_interval ? "ball" : "box";
}

VoidProbability void_probability_analytic(double dr, double density) {
  if (!(dr > 0.0)) throw ConfigError(fmt::format("void.dr must be > 0, got {}", dr));
  if (!(density > 0.0)) throw ConfigError(fmt::format("void.rho must be > 0, got {}", density));
  const double r3 = dr * dr * dr;
  return {std::exp(-r3), std::exp(-density * 4.0 / 3.0 * std::numbers::pi * r3)};
}

std::vector<Event> sprinkle(const SprinkleRegion& region, std::uint64_t seed, std::uint64_t trial) {
  region.validate();
  auto rng = trial_rng(seed, trial);
  std::poisson_distribution<long> count(region.density * region.four_volume());
  const long n = count(rng);
  std::uniform_real_distribution<double> u(0.0, 1.0), s(-1.0, 1.0);
  std::vector<Event> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    Event e;
    e[0] = region.duration * u(rng);
    if (region.geometry == SprinkleRegion::Geometry::box) {
      for (int d = 1; d < 4; ++d) e[d] = region.radius * s(rng);
    } else {
      // Rejection from the enclosing cube.
      double r2;
      do {
        for (int d = 1; d < 4; ++d) e[d] = s(rng);
        r2 = e[1] * e[1] + e[2] * e[2] + e[3] * e[3];
      } while (r2 > 1.0);
      for (int d = 1; d < 4; ++d) e[d] *= region.radius;
    }
    pts.push_back(e);
  }
  return pts;
}

bool VoidEstimate::consistent() const { return std::abs(empirical - analytic_exact) <= 3.0 * standard_error; }

VoidEstimate void_probability_mc(const SprinkleRegion& region, long n_trials, std::uint64_t seed) {
  region.validate();
  if (n_trials < 100) throw ConfigError(fmt::format("void.trials must be >= 100, got {}", n_trials));
  const double lambda = region.density * region.four_volume();
  VoidEstimate est;
  est.n_trials = n_trials;
  est.analytic_cubic = std::exp(-std::pow(region.radius, 3));
  est.analytic_exact = std::exp(-lambda);
  double total = 0.0;
  for (long k = 0; k < n_trials; ++k) {
    // Same stream and first draw as sprinkle(), so the counts agree.
    auto rng = trial_rng(seed, static_cast<std::uint64_t>(k));
    std::poisson_distribution<long> count(lambda);
    const long n = count(rng);
    if (n == 0) ++est.empty_trials;
    total += static_cast<double>(n);
  }
  est.empirical = static_cast<double>(est.empty_trials) / static_cast<double>(n_trials);
  est.mean_count = total / static_cast<double>(n_trials);
  const double p = est.analytic_exact;
  est.standard_error = std::sqrt(p * (1.0 - p) / static_cast<double>(n_trials));
  return est;
}

}  // namespace qlab
