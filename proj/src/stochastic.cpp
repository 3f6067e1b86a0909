#include "qlab/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fmt/format.h>
#include <random>
#include <thread>

#include "qlab/errors.hpp"
#include "qq_engine.hpp"

namespace qlab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Running mean and sum of squared deviations per element.
struct Accumulator {
  long n = 0;
  std::vector<std::vector<cplx>> mean;
  std::vector<std::vector<double>> m2;

  void add(const DensityTrajectory& traj) {
    if (mean.empty()) {
      mean.assign(traj.states.size(), std::vector<cplx>(traj.states.front().values.size()));
      m2.assign(traj.states.size(), std::vector<double>(traj.states.front().values.size()));
    }
    ++n;
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t r = 0; r < mean.size(); ++r) {
      const auto& z = traj.states[r].values;
      auto& mu = mean[r];
      auto& s = m2[r];
      for (std::size_t i = 0; i < z.size(); ++i) {
        const cplx d = z[i] - mu[i];
        mu[i] += d * inv;
        s[i] += std::real(std::conj(d) * (z[i] - mu[i]));
      }
    }
  }

  // Chan et al. pairwise update; order of merges is fixed by the caller.
  void merge(const Accumulator& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n), nb = static_cast<double>(o.n), nt = na + nb;
    for (std::size_t r = 0; r < mean.size(); ++r)
      for (std::size_t i = 0; i < mean[r].size(); ++i) {
        const cplx d = o.mean[r][i] - mean[r][i];
        mean[r][i] += d * (nb / nt);
        m2[r][i] += o.m2[r][i] + std::norm(d) * na * nb / nt;
      }
    n += o.n;
  }
};

}  // namespace

NoiseSpec NoiseSpec::uniform(const GridSpec& grid, double nu0, std::uint64_t seed) {
  NoiseSpec s;
  s.nu.assign(static_cast<std::size_t>(grid.n_points), nu0);
  s.seed = seed;
  return s;
}

void NoiseSpec::validate() const {
  if (nu.empty()) throw ConfigError("noise.nu is empty");
  for (std::size_t i = 0; i < nu.size(); ++i)
    if (!std::isfinite(nu[i]) || nu[i] < 0.0)
      throw ConfigError(fmt::format("noise.nu must be finite and >= 0 (got {} at grid point {})", nu[i], i));
}

NoiseMode parse_noise_mode(const std::string& s) {
  if (s == "quenched") return NoiseMode::quenched;
  if (s == "resampled") return NoiseMode::resampled;
  throw ConfigError(fmt::format("unknown noise mode '{}' (expected quenched or resampled)", s));
}

std::string to_string(NoiseMode m) { return m == NoiseMode::quenched ? "quenched" : "resampled"; }

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t realization, std::uint64_t step) {
  return splitmix64(splitmix64(splitmix64(seed) ^ realization) ^ step);
}

NoiseField sample_noise(const NoiseSpec& spec, long realization, long step) {
  spec.validate();
  NoiseField f;
  f.seed = stream_seed(spec.seed, static_cast<std::uint64_t>(realization), static_cast<std::uint64_t>(step));
  std::mt19937_64 rng(f.seed);
  std::normal_distribution<double> z;
  f.values.resize(spec.nu.size());
  // One draw per cell even where nu = 0 keeps streams aligned across nu maps.
  for (std::size_t i = 0; i < spec.nu.size(); ++i) f.values[i] = spec.nu[i] * z(rng);
  return f;
}

NoiseField sample_noise(const NoiseSpec& spec, long realization) { return sample_noise(spec, realization, 0); }

EnsembleReport ensemble_evolve(const DensityGrid& f0, const Potential& V, const NoiseSpec& spec,
                               const EnsembleOptions& opts, const EvolverConfig& cfg) {
  spec.validate();
  cfg.validate();
  if (opts.realizations < 2)
    throw ConfigError(fmt::format("ensemble needs at least 2 realizations for error bars, got {}", opts.realizations));
  if (spec.nu.size() != static_cast<std::size_t>(f0.grid.n_points))
    throw ConfigError("noise.nu size does not match grid");
  const int threads = std::max(1, opts.threads);

  auto run_one = [&](long k) {
    detail::QqDynamics dyn;
    dyn.potential = &V;
    dyn.full_diagnostics = false;
    const long stream = opts.antithetic ? k / 2 : k;
    const double sign = (opts.antithetic && k % 2 == 1) ? -1.0 : 1.0;
    NoiseField field;
    if (opts.mode == NoiseMode::quenched) {
      field = sample_noise(spec, stream);
      for (auto& v : field.values) v *= sign;
      dyn.potential_offset = field.values;
    } else {
      dyn.resample_offset = [&spec, stream, sign](long step, std::span<double> offset) {
        const auto f = sample_noise(spec, stream, step);
        for (std::size_t i = 0; i < offset.size(); ++i) offset[i] = sign * f.values[i];
      };
    }
    try {
      return detail::evolve_qq_form(f0, dyn, cfg);
    } catch (const BoundaryError& e) {
      throw RealizationError(fmt::format("realization {}: {}", k, e.what()), k, e.step());
    } catch (const std::exception& e) {
      throw RealizationError(fmt::format("realization {}: {}", k, e.what()), k, -1);
    }
  };

  constexpr long kChunk = 8;
  const long n_chunks = (opts.realizations + kChunk - 1) / kChunk;
  Accumulator total;
  std::vector<double> times;

  // Waves of `threads` chunks; merged in chunk order so the result does not
  // depend on scheduling.
  for (long wave = 0; wave < n_chunks; wave += threads) {
    const long count = std::min<long>(threads, n_chunks - wave);
    std::vector<Accumulator> parts(static_cast<std::size_t>(count));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
    std::vector<double> wave_times;
    auto work = [&](long slot) {
      try {
        const long c = wave + slot;
        const long begin = c * kChunk, end = std::min(opts.realizations, begin + kChunk);
        for (long k = begin; k < end; ++k) {
          auto traj = run_one(k);
          if (slot == 0 && k == begin) wave_times = traj.times;
          parts[static_cast<std::size_t>(slot)].add(traj);
        }
      } catch (...) {
        errors[static_cast<std::size_t>(slot)] = std::current_exception();
      }
    };
    if (count == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (long slot = 0; slot < count; ++slot) pool.emplace_back(work, slot);
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
    if (times.empty()) times = wave_times;
    for (const auto& p : parts) total.merge(p);
  }

  EnsembleReport rep;
  rep.n_realizations = total.n;
  rep.mode = opts.mode;
  rep.times = times;
  const double m = static_cast<double>(total.n);
  for (std::size_t r = 0; r < total.mean.size(); ++r) {
    rep.mean.push_back(DensityGrid{f0.grid, std::move(total.mean[r]), times[r]});
    std::vector<double> se(total.m2[r].size());
    for (std::size_t i = 0; i < se.size(); ++i) se[i] = std::sqrt(std::max(0.0, total.m2[r][i]) / (m - 1.0) / m);
    rep.standard_error.push_back(std::move(se));
  }
  return rep;
}

DensityTrajectory lindblad_evolve(const DensityGrid& f0, const Potential& V, std::span<const double> nu,
                                  const EvolverConfig& cfg) {
  if (nu.size() != static_cast<std::size_t>(f0.grid.n_points)) throw ConfigError("noise.nu size does not match grid");
  std::vector<double> rates(nu.size());
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (!std::isfinite(nu[i]) || nu[i] < 0.0) throw ConfigError("noise.nu must be finite and >= 0");
    rates[i] = nu[i] * nu[i];
  }
  detail::QqDynamics dyn;
  dyn.potential = &V;
  dyn.dephasing_rates = rates;
  return detail::evolve_qq_form(f0, dyn, cfg);
}

DensityGrid decay_predict(const DensityGrid& f0, std::span<const double> nu, double t) {
  const int n = f0.grid.n_points;
  if (nu.size() != static_cast<std::size_t>(n)) throw ConfigError("noise.nu size does not match grid");
  DensityGrid out = f0;
  out.time = f0.time + t;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      out(a, b) *= std::exp(-0.5 * t * t * (nu[a] * nu[a] + nu[b] * nu[b]));
    }
  return out;
}

EnsembleComparison compare_ensemble_vs_lindblad(const EnsembleReport& report, const DensityTrajectory& reference,
                                                std::span<const double> nu) {
  if (report.n_realizations < 2) throw ConfigError("standard errors need at least 2 realizations");
  if (report.mean.size() != reference.states.size())
    throw ConfigError(fmt::format("record count mismatch: ensemble {} vs reference {}", report.mean.size(),
                                  reference.states.size()));
  const double nu_max = nu.empty() ? 0.0 : *std::max_element(nu.begin(), nu.end());

  EnsembleComparison c;
  c.pass = true;
  for (std::size_t r = 0; r < report.mean.size(); ++r) {
    const auto& a = report.mean[r];
    const auto& b = reference.states[r];
    if (!(a.grid == b.grid)) throw ConfigError("ensemble and reference grids differ");
    if (std::abs(report.times[r] - reference.times[r]) > 1e-9 * std::max(1.0, std::abs(reference.times[r])))
      throw ConfigError(fmt::format("record {} time mismatch: {} vs {}", r, report.times[r], reference.times[r]));
    const auto& se = report.standard_error[r];
    std::size_t outliers = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
      if (std::abs(a.values[i] - b.values[i]) > 3.0 * se[i] + 1e-10) ++outliers;
    const double frac = static_cast<double>(outliers) / static_cast<double>(a.values.size());
    const bool judged = reference.times[r] * nu_max <= 2.0 + 1e-12;
    c.times.push_back(reference.times[r]);
    c.max_norm.push_back(max_abs_diff(a.values, b.values));
    c.l2.push_back(l2_diff(a.values, b.values, a.grid.spacing() * a.grid.spacing()));
    c.outlier_fraction.push_back(frac);
    c.judged.push_back(judged);
    if (judged && frac > c.max_allowed_outlier_fraction) c.pass = false;
  }
  return c;
}

}  // namespace qlab
