#include "qlab/evolvers.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "fft_cache.hpp"
#include "qlab/errors.hpp"
#include "qq_engine.hpp"

namespace qlab {

void EvolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError(fmt::format("evolve.dt must be positive, got {}", dt));
  if (n_steps < 1) throw ConfigError(fmt::format("evolve.steps must be >= 1, got {}", n_steps));
  if (record_every < 1) throw ConfigError(fmt::format("evolve.record_every must be >= 1, got {}", record_every));
  if (!(tail_threshold > 0.0)) throw ConfigError("evolve.tail_threshold must be positive");
}

std::vector<long> record_steps(const EvolverConfig& cfg) {
  std::vector<long> steps;
  for (long s = 0; s < cfg.n_steps; s += cfg.record_every) steps.push_back(s);
  steps.push_back(cfg.n_steps);
  return steps;
}

namespace {

void check_tail(double tail, double threshold, long step, const char* engine) {
  if (tail > threshold)
    throw BoundaryError(
        fmt::format("{}: boundary contamination at step {} (edge/peak {:.3g} > {:.3g})", engine, step, tail, threshold),
        step);
}

template <typename T>
void warn_dt(const EvolverConfig& cfg, const GridSpec& g, Trajectory<T>& traj) {
  const double limit = 0.1 * g.spacing() * g.spacing();
  if (cfg.kinetic && cfg.dt > limit)
    traj.warnings.push_back(
        fmt::format("dt = {:.4g} exceeds the kinetic-phase guard 0.1*dx^2 = {:.4g}", cfg.dt, limit));
}

// Kinetic factor exp(-i h (k_a^2 - k_b^2)/2) in FFT order, with the 1/N^2
// normalization of the inverse transform folded in.
std::vector<cplx> kinetic_factor(const GridSpec& g, double h) {
  const int n = g.n_points;
  std::vector<cplx> k(g.size());
  const double norm = 1.0 / (static_cast<double>(n) * n);
  for (int a = 0; a < n; ++a) {
    const double ka = g.wavenumber(a);
    for (int b = 0; b < n; ++b) {
      const double kb = g.wavenumber(b);
      k[static_cast<std::size_t>(a) * n + b] = std::polar(norm, -0.5 * h * (ka * ka - kb * kb));
    }
  }
  return k;
}

void apply_kinetic(std::vector<cplx>& f, const std::vector<cplx>& factor, const SquareFft& fft) {
  fft.forward2d(f);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] *= factor[i];
  fft.backward2d(f);
}

StateDiagnostics cheap_diagnostics(const DensityGrid& f) {
  const int n = f.grid.n_points;
  StateDiagnostics d;
  cplx tr{};
  double defect = 0.0;
  for (int a = 0; a < n; ++a) {
    tr += f(a, a);
    for (int b = a; b < n; ++b) defect = std::max(defect, std::abs(f(a, b) - std::conj(f(b, a))));
  }
  d.trace = tr * f.grid.spacing();
  d.hermiticity_defect = defect;
  return d;
}

}  // namespace

namespace detail {

DensityTrajectory evolve_qq_form(const DensityGrid& f0, const QqDynamics& dyn, const EvolverConfig& cfg) {
  cfg.validate();
  const GridSpec& g = f0.grid;
  const int n = g.n_points;
  if (!dyn.potential) throw ConfigError("evolve_qq_form: no potential");
  if (dyn.coupling && !(dyn.coupling->grid == g)) throw ConfigError("coupling field grid does not match state grid");
  if (!dyn.potential_offset.empty() && dyn.potential_offset.size() != static_cast<std::size_t>(n))
    throw ConfigError("potential offset size does not match grid");
  if (!dyn.dephasing_rates.empty() && dyn.dephasing_rates.size() != static_cast<std::size_t>(n))
    throw ConfigError("dephasing rate size does not match grid");

  DensityTrajectory traj;
  warn_dt(cfg, g, traj);
  const auto& fft = fft_for(n);
  const bool lindblad = !dyn.dephasing_rates.empty();
  const bool varying = dyn.potential->time_dependent() || static_cast<bool>(dyn.resample_offset);

  std::vector<double> offset(dyn.potential_offset.begin(), dyn.potential_offset.end());
  if (offset.empty()) offset.assign(n, 0.0);

  // Unitary sub-steps: lindblad runs two half steps of length dt/2 around the
  // dissipator, the plain engines run one step of length dt.
  const double sub = lindblad ? 0.5 * cfg.dt : cfg.dt;
  const auto k_half = kinetic_factor(g, 0.5 * sub);
  const auto k_full = kinetic_factor(g, sub);

  std::vector<double> vgrid(n);
  std::vector<cplx> phase(g.size());
  auto build_phase = [&](double t_mid) {
    for (int a = 0; a < n; ++a) vgrid[a] = dyn.potential->value(g.coordinate(a), t_mid) + offset[a];
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const std::size_t idx = static_cast<std::size_t>(a) * n + b;
        double w = vgrid[a] - vgrid[b];
        if (dyn.coupling) w += dyn.coupling->values[idx];
        phase[idx] = std::polar(1.0, -sub * w);
      }
  };
  if (!varying) build_phase(0.0);

  auto apply_phase = [&](std::vector<cplx>& f) {
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= phase[i];
  };

  const auto records = record_steps(cfg);
  std::size_t next_record = 0;
  std::vector<cplx> f = f0.values;

  auto record = [&](long step) {
    const double t = f0.time + static_cast<double>(step) * cfg.dt;
    DensityGrid snap{g, f, t};
    check_tail(boundary_tail(std::span<const cplx>(f), n), cfg.tail_threshold, step, "qq-form engine");
    traj.diagnostics.push_back(dyn.full_diagnostics ? diagnostics(snap) : cheap_diagnostics(snap));
    traj.times.push_back(t);
    traj.states.push_back(std::move(snap));
  };

  record(0);
  ++next_record;
  bool half_pending = false;  // true when a trailing K(sub/2) is still owed
  for (long s = 0; s < cfg.n_steps; ++s) {
    const double t0 = f0.time + static_cast<double>(s) * cfg.dt;
    if (dyn.resample_offset) dyn.resample_offset(s, offset);
    const bool at_record = (s + 1 == records[next_record]);

    if (lindblad) {
      for (int half = 0; half < 2; ++half) {
        if (varying) build_phase(t0 + (half + 0.5) * sub);
        if (cfg.kinetic) apply_kinetic(f, k_half, fft);
        apply_phase(f);
        if (cfg.kinetic) apply_kinetic(f, k_half, fft);
        if (half == 0) {
          // Exact integral of the linearly growing rate over [t0, t0 + dt].
          const double tau = (t0 - f0.time + 0.5 * cfg.dt) * cfg.dt;
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
              if (a != b)
                f[static_cast<std::size_t>(a) * n + b] *=
                    std::exp(-tau * (dyn.dephasing_rates[a] + dyn.dephasing_rates[b]));
        }
      }
    } else {
      if (varying) build_phase(t0 + 0.5 * cfg.dt);
      if (cfg.kinetic && !half_pending) apply_kinetic(f, k_half, fft);
      apply_phase(f);
      if (cfg.kinetic) {
        if (at_record || s + 1 == cfg.n_steps) {
          apply_kinetic(f, k_half, fft);
          half_pending = false;
        } else {
          apply_kinetic(f, k_full, fft);  // K(dt/2) K(dt/2) of consecutive steps
          half_pending = true;
        }
      }
    }
    if (at_record) {
      record(s + 1);
      ++next_record;
    }
  }
  return traj;
}

}  // namespace detail

PhaseSpaceTrajectory liouville_evolve_xp(const PhaseSpaceDistribution& f0, const Potential& v,
                                         const EvolverConfig& cfg) {
  cfg.validate();
  const GridSpec& g = f0.grid;
  const int n = g.n_points;
  PhaseSpaceTrajectory traj;
  warn_dt(cfg, g, traj);
  const auto& fft = fft_for(n);

  // Free drift f(x,p) -> f(x - p h, p) as a phase on x-modes; zero wavenumber
  // at the Nyquist mode keeps the state real.
  auto drift_factor = [&](double h) {
    std::vector<cplx> d(g.size());
    for (int r = 0; r < n; ++r) {
      const double k = (r == n / 2) ? 0.0 : g.wavenumber(r);
      for (int c = 0; c < n; ++c)
        d[static_cast<std::size_t>(r) * n + c] = std::polar(1.0 / n, -k * g.momentum(c) * h);
    }
    return d;
  };
  const auto drift_half = drift_factor(0.5 * cfg.dt);
  const auto drift_full = drift_factor(cfg.dt);

  // Force kick f(x,p) -> f(x, p + v'(x) dt) as a phase on p-modes (conjugate
  // variable y); again zero at Nyquist.
  std::vector<cplx> kick(g.size());
  auto build_kick = [&](double t_mid) {
    for (int i = 0; i < n; ++i) {
      const double shift = v.derivative(g.coordinate(i), t_mid) * cfg.dt;
      for (int m = 0; m < n; ++m) {
        const int ms = m < n / 2 ? m : m - n;
        const double y = (m == n / 2) ? 0.0 : ms * g.spacing();
        kick[static_cast<std::size_t>(i) * n + m] = std::polar(1.0 / n, y * shift);
      }
    }
  };
  if (!v.time_dependent()) build_kick(0.0);

  auto apply = [&](std::vector<cplx>& f, const std::vector<cplx>& factor, Axis axis) {
    fft.forward(f, axis);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= factor[i];
    fft.backward(f, axis);
  };

  const auto records = record_steps(cfg);
  std::size_t next_record = 0;
  std::vector<cplx> f(f0.values.begin(), f0.values.end());

  auto record = [&](long step) {
    PhaseSpaceDistribution snap{g, std::vector<double>(g.size()), f0.time + static_cast<double>(step) * cfg.dt};
    for (std::size_t i = 0; i < f.size(); ++i) snap.values[i] = f[i].real();
    check_tail(boundary_tail(std::span<const double>(snap.values), n), cfg.tail_threshold, step,
               "classical engine");
    traj.diagnostics.push_back(diagnostics(snap));
    traj.times.push_back(snap.time);
    traj.states.push_back(std::move(snap));
  };

  record(0);
  ++next_record;
  bool half_pending = false;
  for (long s = 0; s < cfg.n_steps; ++s) {
    const bool at_record = (s + 1 == records[next_record]);
    if (v.time_dependent()) build_kick(f0.time + (static_cast<double>(s) + 0.5) * cfg.dt);
    if (!half_pending) apply(f, drift_half, Axis::first);
    apply(f, kick, Axis::second);
    if (at_record || s + 1 == cfg.n_steps) {
      apply(f, drift_half, Axis::first);
      half_pending = false;
    } else {
      apply(f, drift_full, Axis::first);
      half_pending = true;
    }
    if (at_record) {
      record(s + 1);
      ++next_record;
    }
  }
  return traj;
}

DensityTrajectory qq_liouville_evolve(const DensityGrid& f0, const Potential& v, const SuperoperatorField& E,
                                      const EvolverConfig& cfg) {
  detail::QqDynamics dyn;
  dyn.potential = &v;
  dyn.coupling = &E;
  return detail::evolve_qq_form(f0, dyn, cfg);
}

DensityTrajectory von_neumann_evolve(const DensityGrid& f0, const Potential& v, const EvolverConfig& cfg) {
  detail::QqDynamics dyn;
  dyn.potential = &v;
  return detail::evolve_qq_form(f0, dyn, cfg);
}

}  // namespace qlab
