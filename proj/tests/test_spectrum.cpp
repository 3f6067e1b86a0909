#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "qlab/errors.hpp"
#include "qlab/evolvers.hpp"

using namespace qlab;

TEST_CASE("generator spectrum is symmetric about zero") {
  CHECK(spectrum_asymmetry(dense_generator(Potential::constant(0.0), GridSpec::make(8, 3.0)).eigenvalues) <= 1e-10);
  const auto g = GridSpec::make(16, 4.0);
  for (const auto& v : {Potential::harmonic(1.0), Potential::quartic(1.0), Potential::polynomial({0.0, 0.3, 0.0, 0.2})})
    CHECK(spectrum_asymmetry(dense_generator(v, g).eigenvalues) <= 1e-8);
}

TEST_CASE("generator matrix is real symmetric with the expected diagonal") {
  const auto g = GridSpec::make(8, 3.0);
  const auto v = Potential::quartic(1.0);
  const auto gen = dense_generator(v, g);
  const int d = gen.dimension;
  REQUIRE(d == 64);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) REQUIRE(gen.matrix[r * d + c] == gen.matrix[c * d + r]);
  // Laplacian diagonals cancel; what is left is v(Q) - v(q) + E(Q,q).
  const int a = 6, b = 1;
  const double Q = g.coordinate(a), q = g.coordinate(b);
  CHECK(gen.matrix[(a * 8 + b) * d + (a * 8 + b)] ==
        doctest::Approx(v.value(Q) - v.value(q) + v.anharmonic_coupling(Q, q)).epsilon(1e-12));
}

TEST_CASE("harmonic generator eigenvalues are level differences") {
  const auto g = GridSpec::make(16, 4.0);
  const auto v = Potential::harmonic(1.0);
  const auto levels = one_body_levels(v, g);
  std::vector<double> diffs;
  for (double em : levels)
    for (double en : levels) diffs.push_back(em - en);
  std::sort(diffs.begin(), diffs.end());
  const auto ev = dense_generator(v, g).eigenvalues;
  REQUIRE(ev.size() == diffs.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < ev.size(); ++i) worst = std::max(worst, std::abs(ev[i] - diffs[i]));
  CHECK(worst <= 1e-8);

  CHECK(levels[1] - levels[0] == doctest::Approx(1.0).epsilon(0.1));
  CHECK(levels[2] - levels[1] == doctest::Approx(1.0).epsilon(0.1));
  const double gap = levels[1] - levels[0];
  CHECK(std::any_of(ev.begin(), ev.end(), [&](double e) { return std::abs(e - gap) <= 1e-8; }));
  CHECK(std::any_of(ev.begin(), ev.end(), [&](double e) { return std::abs(e + gap) <= 1e-8; }));
}

TEST_CASE("large grids are refused") {
  CHECK_THROWS_AS(dense_generator(Potential::constant(0.0), GridSpec::make(64, 4.0)), DomainError);
  CHECK_NOTHROW(dense_generator(Potential::constant(0.0), GridSpec::make(32, 4.0)));
}
