#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qlab/errors.hpp"
#include "qlab/evolvers.hpp"
#include "test_support.hpp"

using namespace qlab;
using qlab::test::gaussian_density_element;

namespace {

const double kS = 1.0 / std::sqrt(2.0);

struct Centroid {
  double x = 0.0, p = 0.0;
};

Centroid centroid(const PhaseSpaceDistribution& f) {
  const auto& g = f.grid;
  double m = 0.0, mx = 0.0, mp = 0.0;
  for (int i = 0; i < g.n_points; ++i)
    for (int k = 0; k < g.n_points; ++k) {
      const double w = f(i, k);
      m += w;
      mx += w * g.coordinate(i);
      mp += w * g.momentum(k);
    }
  return {mx / m, mp / m};
}

EvolverConfig config_for(double t_end, double dt_target, long records = 1) {
  EvolverConfig cfg;
  cfg.n_steps = std::lround(t_end / dt_target);
  cfg.dt = t_end / static_cast<double>(cfg.n_steps);
  cfg.record_every = std::max(1L, cfg.n_steps / records);
  return cfg;
}

void conjugate(DensityGrid& f) {
  for (auto& z : f.values) z = std::conj(z);
}

}  // namespace

TEST_CASE("classical engine: harmonic quarter period rotates the ensemble") {
  const auto g = GridSpec::make(64, 10.0);
  const auto f0 = make_gaussian_phase_space(1.0, 0.0, kS, kS, g);
  const auto traj = liouville_evolve_xp(f0, Potential::harmonic(1.0), config_for(std::numbers::pi / 2, 1e-3));
  const auto c = centroid(traj.states.back());
  CHECK(std::abs(c.x - 0.0) <= g.spacing());
  CHECK(std::abs(c.p + 1.0) <= g.momentum_spacing());
  CHECK(std::abs(traj.states.back().mass() - f0.mass()) <= 1e-9);
}

TEST_CASE("classical engine: free streaming") {
  const auto g = GridSpec::make(128, 14.0);
  const auto f0 = make_gaussian_phase_space(0.0, 1.0, kS, kS, g);
  const auto traj = liouville_evolve_xp(f0, Potential::constant(3.0), config_for(2.0, 1e-2));
  const auto c = centroid(traj.states.back());
  CHECK(std::abs(c.x - 2.0) <= 1e-9);
  CHECK(std::abs(c.p - 1.0) <= 1e-9);
}

TEST_CASE("record 0 is the initial state") {
  const auto g = GridSpec::make(64, 10.0);
  const auto f0 = make_gaussian_phase_space(0.5, 0.0, kS, kS, g);
  auto cfg = config_for(0.1, 1e-2);
  const auto cl = liouville_evolve_xp(f0, Potential::harmonic(1.0), cfg);
  CHECK(cl.times.front() == 0.0);
  CHECK(cl.states.front().values == f0.values);
  const auto rho = to_density(f0);
  const auto vn = von_neumann_evolve(rho, Potential::quartic(0.1), cfg);
  CHECK(vn.states.front().values == rho.values);
  CHECK(record_steps(cfg) == std::vector<long>{0, 10});
  cfg.n_steps = 7;
  cfg.record_every = 3;
  CHECK(record_steps(cfg) == std::vector<long>{0, 3, 6, 7});
}

TEST_CASE("qq engine reproduces the transformed classical trajectory for harmonic v") {
  const auto g = GridSpec::make(128, 10.0);
  const auto f0 = make_gaussian_phase_space(1.0, 0.0, kS, kS, g);
  const auto v = Potential::harmonic(1.0);
  const auto cfg = config_for(std::numbers::pi / 2, 1e-3, 2);
  const auto cl = liouville_evolve_xp(f0, v, cfg);
  const auto qq = qq_liouville_evolve(to_density(f0), v, superoperator_field(v, g), cfg);
  REQUIRE(cl.states.size() == qq.states.size());
  for (std::size_t r = 0; r < cl.states.size(); ++r)
    CHECK(max_abs_diff(to_density(cl.states[r]).values, qq.states[r].values) <= 1e-6);
}

TEST_CASE("driven linear potential: classical and quantum agree") {
  const auto g = GridSpec::make(128, 14.0);
  const auto f0 = make_gaussian_phase_space(-1.0, 0.5, kS, kS, g);
  const auto v = Potential::linear(0.5, 0.2, LinearDrive{0.7, 3.0});
  const auto cfg = config_for(1.0, 5e-3, 4);
  const auto cl = liouville_evolve_xp(f0, v, cfg);
  const auto vn = von_neumann_evolve(to_density(f0), v, cfg);
  for (std::size_t r = 0; r < cl.states.size(); ++r)
    CHECK(max_abs_diff(to_density(cl.states[r]).values, vn.states[r].values) <= 1e-6);
}

TEST_CASE("von Neumann and qq engines: identical where E vanishes, different otherwise") {
  const auto g = GridSpec::make(64, 10.0);
  const auto rho = to_density(make_gaussian_phase_space(0.5, -0.5, kS, kS, g));
  const auto cfg = config_for(0.5, 1e-3);

  for (const auto& v : {Potential::constant(0.0), Potential::harmonic(1.0)}) {
    const auto qq = qq_liouville_evolve(rho, v, superoperator_field(v, g), cfg);
    const auto vn = von_neumann_evolve(rho, v, cfg);
    CHECK(max_abs_diff(qq.states.back().values, vn.states.back().values) <= 1e-12);
  }
}

TEST_CASE("quartic: von Neumann departs from the Liouville form by t = 1") {
  const auto g = GridSpec::make(128, 10.0);
  const auto rho = to_density(make_gaussian_phase_space(0.0, 1.0, kS, kS, g));
  const auto v = Potential::quartic(1.0);
  auto cfg = config_for(1.0, 1e-3);
  cfg.tail_threshold = 1e-4;  // classical filaments outgrow the grid for anharmonic v
  const auto qq = qq_liouville_evolve(rho, v, superoperator_field(v, g), cfg);
  const auto vn = von_neumann_evolve(rho, v, cfg);
  CHECK(max_abs_diff(qq.states.back().values, vn.states.back().values) > 1e-3);

  const auto& d0 = vn.diagnostics.front();
  for (const auto& d : vn.diagnostics) {
    CHECK(std::abs(d.trace - d0.trace) <= 1e-9);
    CHECK(d.hermiticity_defect - d0.hermiticity_defect <= 1e-9);
  }
  for (const auto& d : qq.diagnostics) CHECK(std::abs(d.trace - d0.trace) <= 1e-9);
}

TEST_CASE("a step followed by its time reverse is the identity") {
  // Both generators are real, so evolution by -dt is conj . U(dt) . conj.
  const auto g = GridSpec::make(64, 10.0);
  const auto rho = to_density(make_gaussian_phase_space(0.7, 0.3, kS, kS, g));
  EvolverConfig cfg;
  cfg.dt = 1e-2;
  const auto v = Potential::quartic(0.5);
  const auto E = superoperator_field(v, g);

  auto back_qq = qq_liouville_evolve(rho, v, E, cfg).states.back();
  conjugate(back_qq);
  back_qq = qq_liouville_evolve(back_qq, v, E, cfg).states.back();
  conjugate(back_qq);
  CHECK(max_abs_diff(back_qq.values, rho.values) <= 1e-10);

  auto back_vn = von_neumann_evolve(rho, v, cfg).states.back();
  conjugate(back_vn);
  back_vn = von_neumann_evolve(back_vn, v, cfg).states.back();
  conjugate(back_vn);
  CHECK(max_abs_diff(back_vn.values, rho.values) <= 1e-10);
}

TEST_CASE("Strang splitting is second order") {
  // Harmonic flow of a coherent state is known in closed form.
  const auto g = GridSpec::make(64, 10.0);
  const double cx = 0.0, cp = 1.0;
  const auto rho = to_density(make_gaussian_phase_space(cx, cp, kS, kS, g));
  const double T = std::numbers::pi;
  std::vector<double> err;
  for (double dt : {0.04, 0.02, 0.01}) {
    const auto traj = von_neumann_evolve(rho, Potential::harmonic(1.0), config_for(T, dt));
    const auto& f = traj.states.back();
    const double t = f.time;
    const double x = cx * std::cos(t) + cp * std::sin(t), p = cp * std::cos(t) - cx * std::sin(t);
    double e = 0.0;
    for (int a = 0; a < g.n_points; ++a)
      for (int b = 0; b < g.n_points; ++b)
        e = std::max(e, std::abs(f(a, b) - gaussian_density_element(g.coordinate(a), g.coordinate(b), x, p, kS, kS)));
    err.push_back(e);
  }
  CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.2));
  CHECK(err[1] / err[2] == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("boundary contamination is reported with the step index") {
  const auto g = GridSpec::make(64, 10.0);
  const auto f0 = make_gaussian_phase_space(0.0, 3.0, kS, kS, g);
  EvolverConfig cfg;
  cfg.dt = 1e-2;
  cfg.n_steps = 400;
  cfg.record_every = 10;
  try {
    liouville_evolve_xp(f0, Potential::constant(0.0), cfg);
    FAIL("expected a boundary error");
  } catch (const BoundaryError& e) {
    CHECK(e.step() > 0);
    CHECK(e.step() % 10 == 0);
  }
  CHECK_THROWS_AS(von_neumann_evolve(to_density(f0), Potential::constant(0.0), cfg), BoundaryError);
}

TEST_CASE("configuration checks") {
  const auto g = GridSpec::make(64, 10.0);
  const auto rho = to_density(make_gaussian_phase_space(0.0, 0.0, kS, kS, g));
  EvolverConfig cfg;
  cfg.dt = -1e-3;
  CHECK_THROWS_AS(von_neumann_evolve(rho, Potential::constant(0.0), cfg), ConfigError);
  cfg.dt = 1e-3;
  cfg.n_steps = 0;
  CHECK_THROWS_AS(von_neumann_evolve(rho, Potential::constant(0.0), cfg), ConfigError);

  cfg.n_steps = 2;
  cfg.dt = 0.5 * g.spacing() * g.spacing();
  CHECK(!von_neumann_evolve(rho, Potential::constant(0.0), cfg).warnings.empty());
  cfg.dt = 1e-3;
  CHECK(von_neumann_evolve(rho, Potential::constant(0.0), cfg).warnings.empty());
}
