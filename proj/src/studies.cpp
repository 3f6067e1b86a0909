#include "qlab/studies.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <future>
#include <limits>
#include <random>

#include "qlab/errors.hpp"

namespace qlab {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Runs f and re-raises any failure with the engine name in front.
template <typename F>
auto tagged(const std::string& engine, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const BoundaryError& e) {
    throw BoundaryError(fmt::format("[{}] {}", engine, e.what()), e.step());
  } catch (const RealizationError& e) {
    throw RealizationError(fmt::format("[{}] {}", engine, e.what()), e.realization(), e.step());
  } catch (const DomainError& e) {
    throw DomainError(fmt::format("[{}] {}", engine, e.what()));
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("[{}] {}", engine, e.what()));
  } catch (const std::exception& e) {
    throw std::runtime_error(fmt::format("[{}] {}", engine, e.what()));
  }
}

struct Drift {
  double trace = 0.0;
  double hermiticity = 0.0;
  double min_density = 0.0;
};

template <typename State>
Drift drift_of(const Trajectory<State>& traj) {
  Drift d;
  d.min_density = std::numeric_limits<double>::infinity();
  const cplx tr0 = traj.diagnostics.front().trace;
  for (const auto& s : traj.diagnostics) {
    d.trace = std::max(d.trace, std::abs(s.trace - tr0));
    d.hermiticity = std::max(d.hermiticity, s.hermiticity_defect);
    d.min_density = std::min(d.min_density, s.min_reconstructed_density);
  }
  return d;
}

template <typename State>
Table diagnostics_table(const std::string& engine, const Trajectory<State>& traj) {
  Table t{"diagnostics_" + engine, {"t", "trace_re", "trace_im", "hermiticity_defect", "min_density"}, {}, false};
  for (std::size_t r = 0; r < traj.times.size(); ++r) {
    const auto& d = traj.diagnostics[r];
    t.rows.push_back({traj.times[r], d.trace.real(), d.trace.imag(), d.hermiticity_defect, d.min_reconstructed_density});
  }
  return t;
}

// The Hermiticity of a classical image is only checked when E vanishes:
// anharmonic filaments outgrow the (x,p) grid and their image loses it.
template <typename State>
void add_drift(RunReport& rep, const std::string& engine, const Trajectory<State>& traj, bool check_hermiticity) {
  const auto d = drift_of(traj);
  rep.metric(engine + ".trace_drift", d.trace);
  rep.metric(engine + ".hermiticity_drift", d.hermiticity);
  rep.metric(engine + ".min_density", d.min_density);
  rep.check(engine + " trace drift", 4, d.trace, "<=", 1e-9);
  if (check_hermiticity) rep.check(engine + " hermiticity drift", 4, d.hermiticity, "<=", 1e-9);
  if (d.min_density < -1e-10)
    rep.warnings.push_back(fmt::format("{}: reconstructed density reaches {:.3g} (negative values kept)", engine,
                                       d.min_density));
  for (const auto& w : traj.warnings) rep.warnings.push_back(engine + ": " + w);
}

std::string snapshot_name(const std::string& engine, std::size_t r) { return fmt::format("{}_{:04d}", engine, r); }

std::vector<DensityGrid> images(const PhaseSpaceTrajectory& traj) {
  std::vector<DensityGrid> out;
  out.reserve(traj.states.size());
  for (const auto& s : traj.states) out.push_back(to_density(s));
  return out;
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

// Default probes of a cat state: cross peak (+d/2, -d/2) and diagonal peak (+d/2, +d/2).
std::vector<std::pair<int, int>> cat_probes(const DensityGrid& f0) {
  const int n = f0.grid.n_points;
  int best = n / 2 + 1;
  for (int a = n / 2 + 1; a < n; ++a)
    if (std::abs(f0(a, a)) > std::abs(f0(best, best))) best = a;
  return {{best, n - best}, {best, best}};
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log10(x[i]) / n;
    my += std::log10(y[i]) / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log10(x[i]) - mx) * (std::log10(y[i]) - my);
    sxx += (std::log10(x[i]) - mx) * (std::log10(x[i]) - mx);
  }
  return sxy / sxx;
}

double offdiag_rms(const DensityGrid& a, const DensityGrid& b) {
  const int n = a.grid.n_points;
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) s += std::norm(a(i, j) - b(i, j));
  return std::sqrt(s / (static_cast<double>(n) * (n - 1)));
}

}  // namespace

bool RunReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void RunReport::check(const std::string& name, int criterion, double observed, const std::string& relation,
                      double threshold) {
  bool ok = false;
  if (relation == "<=")
    ok = observed <= threshold;
  else if (relation == ">=")
    ok = observed >= threshold;
  else
    throw std::logic_error("unknown check relation " + relation);
  checks.push_back(Check{name, criterion, observed, threshold, relation, ok});
}

RunReport run_evolve_study(const Scenario& s, const std::string& engine) {
  const auto t0 = Clock::now();
  RunReport rep;
  rep.study = "evolve";
  rep.scenario_hash = s.hash;
  const auto V = s.effective_potential();
  const auto& cfg = s.evolve;

  if (engine == "classical") {
    const auto traj = tagged(engine, [&] { return liouville_evolve_xp(s.initial_phase_space(), V, cfg); });
    add_drift(rep, engine, traj, superoperator_field(V, s.grid).max_abs() == 0.0);
    rep.tables.push_back(diagnostics_table(engine, traj));
    for (std::size_t r = 0; r < traj.states.size(); ++r)
      rep.snapshots.push_back({snapshot_name(engine, r), traj.states[r]});
  } else if (engine == "qq" || engine == "vonneumann" || engine == "lindblad") {
    const auto traj = tagged(engine, [&] {
      const auto f0 = s.initial_density();
      if (engine == "qq") return qq_liouville_evolve(f0, V, superoperator_field(V, s.grid), cfg);
      if (engine == "vonneumann") return von_neumann_evolve(f0, V, cfg);
      return lindblad_evolve(f0, V, s.noise.nu, cfg);
    });
    add_drift(rep, engine, traj, true);
    rep.tables.push_back(diagnostics_table(engine, traj));
    for (std::size_t r = 0; r < traj.states.size(); ++r)
      rep.snapshots.push_back({snapshot_name(engine, r), traj.states[r]});
  } else {
    throw ConfigError(fmt::format("unknown engine '{}' (classical, qq, vonneumann, lindblad)", engine));
  }
  rep.metric("t_end", s.t_end);
  rep.metric("dt", cfg.dt);
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

RunReport run_equivalence_study(const Scenario& s) {
  const auto t0 = Clock::now();
  RunReport rep;
  if (!s.potential.declared) throw ConfigError("potential.kind: the equivalence study needs an explicit kind");
  rep.study = "compare";
  rep.scenario_hash = s.hash;
  const auto V = s.effective_potential();
  const auto& cfg = s.evolve;
  const auto E = superoperator_field(V, s.grid);
  const auto ps0 = s.initial_phase_space();
  const auto f0 = to_density(ps0);

  auto classical = [&] { return tagged("classical", [&] { return liouville_evolve_xp(ps0, V, cfg); }); };
  auto qq = [&] { return tagged("qq", [&] { return qq_liouville_evolve(f0, V, E, cfg); }); };
  auto vn = [&] { return tagged("vonneumann", [&] { return von_neumann_evolve(f0, V, cfg); }); };

  PhaseSpaceTrajectory tc;
  DensityTrajectory tq, tv;
  if (s.threads > 1) {
    auto fc = std::async(std::launch::async, classical);
    auto fq = std::async(std::launch::async, qq);
    auto fv = std::async(std::launch::async, vn);
    tc = fc.get();
    tq = fq.get();
    tv = fv.get();
  } else {
    tc = classical();
    tq = qq();
    tv = vn();
  }

  const double coupling = E.max_abs();
  add_drift(rep, "classical", tc, coupling == 0.0);
  add_drift(rep, "qq", tq, true);
  add_drift(rep, "vonneumann", tv, true);
  rep.tables.push_back(diagnostics_table("classical", tc));
  rep.tables.push_back(diagnostics_table("qq", tq));
  rep.tables.push_back(diagnostics_table("vonneumann", tv));

  const auto tc_img = images(tc);
  const double area = s.grid.spacing() * s.grid.spacing();
  const std::vector<std::pair<std::string, std::pair<const std::vector<DensityGrid>*, const std::vector<DensityGrid>*>>>
      pairs = {{"classical_qq", {&tc_img, &tq.states}},
               {"classical_vonneumann", {&tc_img, &tv.states}},
               {"qq_vonneumann", {&tq.states, &tv.states}}};
  std::vector<double> cv_dist;
  for (const auto& [name, p] : pairs) {
    Table t{"distance_" + name, {"t", "maxnorm", "l2"}, {}, true};
    double worst = 0.0;
    for (std::size_t r = 0; r < tv.times.size(); ++r) {
      const auto& a = (*p.first)[r].values;
      const auto& b = (*p.second)[r].values;
      const double d = max_abs_diff(a, b);
      worst = std::max(worst, d);
      t.rows.push_back({tv.times[r], d, l2_diff(a, b, area)});
      if (name == "classical_vonneumann") cv_dist.push_back(d);
    }
    rep.metric(name + ".max_distance", worst);
    rep.tables.push_back(std::move(t));
  }

  rep.metric("coupling_max_abs", coupling);
  rep.snapshots.push_back({"classical_final", tc.states.back()});
  rep.snapshots.push_back({"qq_final", tq.states.back()});
  rep.snapshots.push_back({"vonneumann_final", tv.states.back()});
  if (coupling == 0.0) {
    for (const auto& [name, p] : pairs) {
      const double worst = std::find_if(rep.metrics.begin(), rep.metrics.end(), [&](const auto& m) {
                             return m.first == name + ".max_distance";
                           })->second;
      rep.check(name + " max distance", 4, worst, "<=", 1e-6);
    }
  } else {
    bool at_one = false;
    std::vector<double> window;
    for (std::size_t r = 0; r < tv.times.size(); ++r) {
      const double t = tv.times[r];
      if (near(t, 1.0)) {
        at_one = true;
        rep.check("classical_vonneumann distance at t=1", 5, cv_dist[r], ">=", 1e-3);
      }
      if (t >= 0.5 - 1e-9 && t <= 1.5 + 1e-9) window.push_back(cv_dist[r]);
    }
    if (!at_one) rep.warnings.push_back("no record at t = 1; divergence check skipped");
    if (window.size() >= 2) {
      double min_step = std::numeric_limits<double>::infinity();
      for (std::size_t i = 1; i < window.size(); ++i) min_step = std::min(min_step, window[i] - window[i - 1]);
      rep.metric("classical_vonneumann.min_increment_0.5_1.5", min_step);
      rep.check("classical_vonneumann distance increasing on [0.5, 1.5]", 5, min_step, ">=", 0.0);
    } else {
      rep.warnings.push_back("fewer than two records in [0.5, 1.5]; monotonicity check skipped");
    }
  }
  rep.metric("t_end", s.t_end);
  rep.metric("dt", cfg.dt);
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

RunReport run_decoherence_study(const Scenario& s) {
  const auto t0 = Clock::now();
  if (!s.noise.present) throw ConfigError("decoherence study needs a noise section (noise.nu, ...)");
  RunReport rep;
  rep.study = "decohere";
  rep.scenario_hash = s.hash;
  rep.seeds.emplace_back("noise.seed", s.noise.seed);

  if (s.probes.empty() && s.initial.kind != InitialSpec::Kind::cat)
    throw ConfigError("probes: required unless initial.kind = cat");
  const auto V = s.effective_potential();
  const auto& cfg = s.evolve;
  const auto f0 = s.initial_density();
  const auto& nu = s.noise.nu;
  const auto probes = s.probes.empty() ? cat_probes(f0) : s.probes;

  EnsembleOptions opts;
  opts.realizations = s.noise.realizations;
  opts.mode = s.noise.mode;
  opts.threads = s.threads;
  const auto ens = tagged("ensemble", [&] { return ensemble_evolve(f0, V, s.noise.spec(), opts, cfg); });
  const auto lind = tagged("lindblad", [&] { return lindblad_evolve(f0, V, nu, cfg); });
  const bool quenched = s.noise.mode == NoiseMode::quenched;
  if (!quenched) rep.warnings.push_back("resampled noise is an exploration mode; decay-law checks skipped");

  std::vector<DensityGrid> closed;
  for (double t : ens.times) closed.push_back(decay_predict(f0, nu, t - f0.time));

  rep.metric("realizations", static_cast<double>(ens.n_realizations));
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto [a, b] = probes[i];
    const std::size_t idx = static_cast<std::size_t>(a) * s.grid.n_points + b;
    const double f0_abs = std::abs(f0(a, b));
    Table t{fmt::format("decay_probe_{}", i), {"t", "abs_f", "predicted", "stderr"}, {}, true};
    for (std::size_t r = 0; r < ens.times.size(); ++r) {
      const double predicted = s.hamiltonian ? std::abs(lind.states[r](a, b)) : std::abs(closed[r](a, b));
      t.rows.push_back({ens.times[r], std::abs(ens.mean[r].values[idx]), predicted, ens.standard_error[r][idx]});
    }
    const std::string tag = fmt::format("probe_{}", i);
    rep.metric(tag + ".i", a);
    rep.metric(tag + ".j", b);
    rep.metric(tag + ".abs_f0", f0_abs);

    if (quenched && !s.hamiltonian) {
      if (a == b) {
        double flat = 0.0;
        for (const auto& row : t.rows) flat = std::max(flat, std::abs(row[1] - f0_abs));
        rep.metric(tag + ".diagonal_variation", flat);
        rep.check(tag + " diagonal constant", 7, flat, "<=", 1e-12);
      } else {
        // Fit |f(t)| = |f0| exp(-kappa t^2 / 2) by weighted least squares in
        // log space; predicted kappa = nu^2(x) + nu^2(y). Points below 10 SE
        // are left out: |mean| is biased upward by ~SE^2 / (2 |mean|).
        const double kappa_pred = nu[a] * nu[a] + nu[b] * nu[b];
        double swgg = 0.0, swgy = 0.0, sgg = 0.0, sgy = 0.0;
        bool weighted = true;
        for (const auto& row : t.rows) {
          const double tt = row[0] - f0.time;
          if (tt <= 0.0 || row[1] <= 0.0 || row[1] < 10.0 * row[3]) continue;
          const double g = 0.5 * tt * tt, y = -std::log(row[1] / f0_abs);
          sgg += g * g;
          sgy += g * y;
          if (row[3] > 0.0) {
            const double w = (row[1] / row[3]) * (row[1] / row[3]);
            swgg += w * g * g;
            swgy += w * g * y;
          } else {
            weighted = false;
          }
        }
        const double kappa = weighted && swgg > 0.0 ? swgy / swgg : (sgg > 0.0 ? sgy / sgg : 0.0);
        rep.metric(tag + ".kappa_fit", kappa);
        rep.metric(tag + ".kappa_predicted", kappa_pred);
        if (weighted && swgg > 0.0) rep.metric(tag + ".kappa_fit_stderr", 1.0 / std::sqrt(swgg));
        if (kappa_pred > 0.0) {
          rep.metric(tag + ".coefficient", kappa / kappa_pred);
        } else {
          rep.check(tag + " no decay |kappa|", 7, std::abs(kappa), "<=", 1e-9);
        }
        for (const auto& row : t.rows)
          if (near(row[0] - f0.time, 1.0)) {
            const double diff = std::abs(row[1] - row[2]);
            const double z = row[3] > 0.0 ? diff / row[3] : (diff <= 1e-12 ? 0.0 : diff / 1e-12);
            rep.metric(tag + ".z_at_t1", z);
            rep.check(tag + " |abs_f - predicted| / stderr at t=1", 7, z, "<=", 3.0);
          }
      }
    }
    rep.tables.push_back(std::move(t));
  }

  if (quenched && !s.hamiltonian) {
    // One element pins c only to ~sqrt(2/M); the pooled fit uses every
    // off-diagonal element with a visible signal and a nonzero predicted exponent.
    const int n = s.grid.n_points;
    double peak = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (a != b) peak = std::max(peak, std::abs(f0(a, b)));
    double sxx = 0.0, sxy = 0.0;
    long used = 0;
    for (std::size_t r = 0; r < ens.times.size(); ++r) {
      const double tt = ens.times[r] - f0.time;
      if (tt <= 0.0) continue;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          const double z0 = std::abs(f0(a, b));
          const double kappa_pred = nu[a] * nu[a] + nu[b] * nu[b];
          if (a == b || z0 < 1e-2 * peak || kappa_pred == 0.0) continue;
          const std::size_t idx = static_cast<std::size_t>(a) * n + b;
          const double m = std::abs(ens.mean[r].values[idx]);
          if (m <= 0.0 || m < 10.0 * ens.standard_error[r][idx]) continue;
          const double x = 0.5 * tt * tt * kappa_pred, y = -std::log(m / z0), w = 1.0;
          sxx += w * x * x;
          sxy += w * x * y;
          ++used;
        }
    }
    if (used > 0) {
      const double c = sxy / sxx;
      rep.metric("pooled.coefficient", c);
      rep.metric("pooled.points", static_cast<double>(used));
      rep.check("pooled decay coefficient |c - 1|", 7, std::abs(c - 1.0), "<=", 0.05);
    }
  }

  if (!s.hamiltonian) {
    double worst = 0.0;
    for (std::size_t r = 0; r < lind.states.size(); ++r)
      worst = std::max(worst, max_abs_diff(lind.states[r].values, closed[r].values));
    rep.metric("lindblad_vs_closed_form", worst);
    rep.check("lindblad vs closed form", 7, worst, "<=", 1e-8);
  }

  const auto cmp = compare_ensemble_vs_lindblad(ens, lind, nu);
  Table ct{"ensemble_vs_lindblad", {"t", "maxnorm", "l2", "outlier_fraction", "judged"}, {}, true};
  double worst_frac = 0.0;
  for (std::size_t r = 0; r < cmp.times.size(); ++r) {
    ct.rows.push_back({cmp.times[r], cmp.max_norm[r], cmp.l2[r], cmp.outlier_fraction[r], cmp.judged[r] ? 1.0 : 0.0});
    if (cmp.judged[r]) worst_frac = std::max(worst_frac, cmp.outlier_fraction[r]);
  }
  rep.tables.push_back(std::move(ct));
  rep.metric("ensemble_vs_lindblad.max_outlier_fraction", worst_frac);
  if (quenched)
    rep.check("ensemble vs master equation outliers (> 3 SE)", 7, worst_frac, "<=", cmp.max_allowed_outlier_fraction);

  rep.snapshots.push_back({"ensemble_mean_final", ens.mean.back()});
  rep.snapshots.push_back({"lindblad_final", lind.states.back()});
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

RunReport run_convergence_study(const Scenario& s, const std::vector<long>& realizations) {
  const auto t0 = Clock::now();
  if (!s.noise.present) throw ConfigError("convergence study needs a noise section (noise.nu, ...)");
  if (realizations.size() < 2) throw ConfigError("convergence study needs at least two ensemble sizes");
  for (long m : realizations)
    if (m < 2) throw ConfigError(fmt::format("ensemble size must be >= 2, got {}", m));
  RunReport rep;
  rep.study = "convergence";
  rep.scenario_hash = s.hash;
  rep.seeds.emplace_back("noise.seed", s.noise.seed);

  const auto f0 = s.initial_density();
  // H off: every step is a pointwise phase, so one step of length t_end is exact.
  EvolverConfig cfg;
  cfg.kinetic = false;
  cfg.n_steps = 1;
  cfg.dt = s.t_end;
  cfg.record_every = 1;
  cfg.tail_threshold = s.evolve.tail_threshold;
  const auto exact = decay_predict(f0, s.noise.nu, s.t_end);

  Table t{"mc_convergence", {"realizations", "offdiag_rms_error"}, {}, true};
  std::vector<double> xs, ys;
  for (long m : realizations) {
    EnsembleOptions opts;
    opts.realizations = m;
    opts.threads = s.threads;
    const auto ens =
        tagged("ensemble", [&] { return ensemble_evolve(f0, Potential::constant(0.0), s.noise.spec(), opts, cfg); });
    const double err = offdiag_rms(ens.mean.back(), exact);
    xs.push_back(static_cast<double>(m));
    ys.push_back(err);
    t.rows.push_back({static_cast<double>(m), err});
  }
  rep.tables.push_back(std::move(t));
  const double slope = log_log_slope(xs, ys);
  rep.metric("slope", slope);
  rep.check("log-log slope |s + 0.5|", 8, std::abs(slope + 0.5), "<=", 0.15);
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

RunReport run_void_study(const Scenario& s, const std::vector<double>& radii) {
  const auto t0 = Clock::now();
  RunReport rep;
  rep.study = "void";
  rep.scenario_hash = s.hash;
  rep.seeds.emplace_back("void.seed", s.void_study.seed);
  const auto list = radii.empty() ? std::vector<double>{s.void_study.region.radius} : radii;

  Table t{"void",
          {"dr", "rho", "duration", "trials", "empty_trials", "cubic_form", "exact", "empirical", "stderr"},
          {},
          false};
  for (std::size_t i = 0; i < list.size(); ++i) {
    auto region = s.void_study.region;
    region.radius = list[i];
    region.validate();
    const auto est = void_probability_mc(region, s.void_study.trials, s.void_study.seed);
    t.rows.push_back({region.radius, region.density, region.duration, static_cast<double>(est.n_trials),
                      static_cast<double>(est.empty_trials), est.analytic_cubic, est.analytic_exact, est.empirical,
                      est.standard_error});
    const std::string tag = fmt::format("row_{}", i);
    rep.metric(tag + ".dr", region.radius);
    rep.metric(tag + ".cubic_form", est.analytic_cubic);
    rep.metric(tag + ".exact", est.analytic_exact);
    rep.metric(tag + ".empirical", est.empirical);
    rep.metric(tag + ".stderr", est.standard_error);
    rep.metric(tag + ".mean_count", est.mean_count);
    const double z = std::abs(est.empirical - est.analytic_exact) / est.standard_error;
    rep.check(tag + " |empirical - exact| / stderr", 9, z, "<=", 3.0);
  }
  // Ratio of the exact exponent to the bare dr^3 one (4 pi / 3 for the unit ball interval).
  const auto& row = t.rows.front();
  rep.metric("exponent_ratio_exact_over_cubic", std::log(row[6]) / std::log(row[5]));
  rep.tables.push_back(std::move(t));
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

RunReport run_spectrum_study(const Scenario& s) {
  const auto t0 = Clock::now();
  RunReport rep;
  rep.study = "spectrum";
  rep.scenario_hash = s.hash;
  const auto gen = dense_generator(s.effective_potential(), s.grid);
  const double asym = spectrum_asymmetry(gen.eigenvalues);
  rep.metric("dimension", gen.dimension);
  rep.metric("eigenvalue_min", gen.eigenvalues.front());
  rep.metric("eigenvalue_max", gen.eigenvalues.back());
  rep.metric("asymmetry", asym);
  rep.check("spectrum symmetric about zero", 6, asym, "<=", 1e-8);
  Table t{"eigenvalues", {"index", "eigenvalue"}, {}, true};
  for (std::size_t i = 0; i < gen.eigenvalues.size(); ++i) t.rows.push_back({static_cast<double>(i), gen.eigenvalues[i]});
  rep.tables.push_back(std::move(t));
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

RunReport run_segcheck(const SegcheckOptions& opts) {
  const auto t0 = Clock::now();
  if (opts.breakpoints < 2) throw ConfigError("segcheck: need at least two breakpoints");
  if (opts.pairs < 1) throw ConfigError("segcheck: need at least one pair");
  RunReport rep;
  rep.study = "segcheck";
  rep.seeds.emplace_back("seed", opts.seed);
  const auto g = GridSpec::make(opts.grid_points, opts.half_width);

  std::vector<std::pair<std::string, Potential>> vanishing = {{"constant c=0.7", Potential::constant(0.7)}};
  for (double a : {0.5, 1.0, 2.0}) vanishing.emplace_back(fmt::format("linear g={}", a), Potential::linear(a, 0.0));
  for (double w : {0.5, 1.0, 2.0}) vanishing.emplace_back(fmt::format("harmonic omega={}", w), Potential::harmonic(w));
  for (const auto& [name, v] : vanishing) {
    const double m = superoperator_field(v, g).max_abs();
    rep.metric("max_abs_E." + name, m);
    rep.check("max |E| = 0 for " + name, 1, m, "<=", 0.0);
  }
  const double quartic = superoperator_field(Potential::quartic(1.0), g).max_abs();
  rep.metric("max_abs_E.quartic lambda=1", quartic);
  rep.check("max |E| >= 1 for quartic lambda=1", 1, quartic, ">=", 1.0);

  std::mt19937_64 rng(opts.seed);
  const double L = opts.half_width;
  std::uniform_real_distribution<double> pos(-L, L), val(-1.0, 1.0);
  std::vector<double> bp(static_cast<std::size_t>(opts.breakpoints));
  bp.front() = -L;
  bp.back() = L;
  for (std::size_t i = 1; i + 1 < bp.size(); ++i) bp[i] = pos(rng);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  std::vector<double> vals(bp.size());
  for (auto& v : vals) v = val(rng);
  const PiecewiseLinearPotential pl(bp, vals);

  std::vector<std::pair<std::string, Potential>> all = {
      {"constant", Potential::constant(0.7)},       {"linear", Potential::linear(1.3, 0.2)},
      {"harmonic", Potential::harmonic(1.0)},       {"quartic", Potential::quartic(1.0)},
      {"polynomial", Potential::polynomial({0.1, -0.4, 0.3, 0.2, -0.05})}, {"piecewise_linear", Potential::piecewise(pl)}};
  for (const auto& [name, v] : all) {
    const auto E = superoperator_field(v, g);
    const int n = g.n_points;
    double worst = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) worst = std::max(worst, std::abs(E(a, b) + E(b, a)));
    rep.metric("antisymmetry." + name, worst);
    rep.check("E(Q,q) + E(q,Q) = 0 for " + name, 2, worst, "<=", 0.0);
  }

  Table t{"segment_errors", {"q", "Q", "segment_sum", "exact", "abs_error"}, {}, false};
  double worst = 0.0;
  for (int i = 0; i < opts.pairs; ++i) {
    const double q = pos(rng), Q = pos(rng);
    const double sum = segment_sum(pl, q, Q), exact = pl.value(Q) - pl.value(q);
    const double err = std::abs(sum - exact);
    worst = std::max(worst, err);
    t.rows.push_back({q, Q, sum, exact, err});
  }
  rep.tables.push_back(std::move(t));
  rep.metric("segment_sum.max_error", worst);
  rep.metric("segment_sum.breakpoints", static_cast<double>(bp.size()));
  rep.check("segment sum exact", 3, worst, "<=", 1e-12);
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

}  // namespace qlab
