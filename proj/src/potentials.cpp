#include "qlab/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "qlab/errors.hpp"

namespace qlab {

std::string_view to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::constant: return "constant";
    case PotentialKind::linear: return "linear";
    case PotentialKind::harmonic: return "harmonic";
    case PotentialKind::quartic: return "quartic";
    case PotentialKind::polynomial: return "polynomial";
    case PotentialKind::piecewise_linear: return "piecewise_linear";
  }
  return "unknown";
}

// --- piecewise-linear ---------------------------------------------------------

PiecewiseLinearPotential::PiecewiseLinearPotential(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.size() < 2) throw DomainError("piecewise-linear potential needs at least two breakpoints");
  if (breakpoints_.size() != values_.size())
    throw DomainError(fmt::format("piecewise-linear potential: {} breakpoints but {} values", breakpoints_.size(),
                                  values_.size()));
  slopes_.resize(breakpoints_.size() - 1);
  for (std::size_t n = 0; n + 1 < breakpoints_.size(); ++n) {
    const double len = breakpoints_[n + 1] - breakpoints_[n];
    if (!(len > 0.0))
      throw DomainError(fmt::format("breakpoints must be strictly increasing (s_{} = {}, s_{} = {})", n,
                                    breakpoints_[n], n + 1, breakpoints_[n + 1]));
    slopes_[n] = (values_[n + 1] - values_[n]) / len;
    if (!std::isfinite(slopes_[n])) throw DomainError("piecewise-linear potential: non-finite slope");
  }
}

std::size_t PiecewiseLinearPotential::segment_of(double x) const {
  // First breakpoint >= x closes the segment that owns x (left-slope rule).
  const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x);
  if (it == breakpoints_.begin()) return 0;
  if (it == breakpoints_.end()) return slopes_.size() - 1;
  return static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
}

double PiecewiseLinearPotential::value(double x) const {
  const std::size_t n = segment_of(x);
  return values_[n] + slopes_[n] * (x - breakpoints_[n]);
}

double PiecewiseLinearPotential::derivative(double x) const { return slopes_[segment_of(x)]; }

std::vector<double> PiecewiseLinearPotential::linearity_lengths() const {
  std::vector<double> d(slopes_.size());
  for (std::size_t n = 0; n < d.size(); ++n) d[n] = breakpoints_[n + 1] - breakpoints_[n];
  return d;
}

// --- Potential ----------------------------------------------------------------

Potential::Potential(PotentialKind kind, std::vector<double> coefficients)
    : kind_(kind), coefficients_(std::move(coefficients)) {
  for (double c : coefficients_)
    if (!std::isfinite(c)) throw DomainError("potential coefficients must be finite");
}

Potential Potential::constant(double c) { return Potential(PotentialKind::constant, {c}); }

Potential Potential::linear(double a, double b, LinearDrive drive) {
  Potential v(PotentialKind::linear, {b, a});
  if (!std::isfinite(drive.amplitude) || !std::isfinite(drive.frequency))
    throw DomainError("linear drive parameters must be finite");
  v.drive_ = drive;
  return v;
}

Potential Potential::harmonic(double omega) {
  return Potential(PotentialKind::harmonic, {0.0, 0.0, 0.5 * omega * omega});
}

Potential Potential::quartic(double lambda) { return Potential(PotentialKind::quartic, {0.0, 0.0, 0.0, 0.0, lambda}); }

Potential Potential::polynomial(std::vector<double> coefficients) {
  if (coefficients.empty()) throw DomainError("polynomial potential needs at least one coefficient");
  return Potential(PotentialKind::polynomial, std::move(coefficients));
}

Potential Potential::piecewise(PiecewiseLinearPotential pl) {
  Potential v(PotentialKind::piecewise_linear, {});
  v.pl_ = std::move(pl);
  return v;
}

double Potential::value(double x, double t) const {
  if (pl_) return pl_->value(x);
  double s = 0.0;
  for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) s = s * x + *it;
  if (time_dependent()) s += drive_.amplitude * std::sin(drive_.frequency * t) * x;
  return s;
}

double Potential::derivative(double x, double t) const {
  if (pl_) return pl_->derivative(x);
  double s = 0.0;
  for (std::size_t k = coefficients_.size(); k-- > 1;) s = s * x + static_cast<double>(k) * coefficients_[k];
  if (time_dependent()) s += drive_.amplitude * std::sin(drive_.frequency * t);
  return s;
}

double Potential::anharmonic_coupling(double Q, double q) const {
  if (pl_) return (Q - q) * pl_->derivative(0.5 * (Q + q)) - pl_->value(Q) + pl_->value(q);
  const double mid = 0.5 * (Q + q);
  double e = 0.0;
  for (std::size_t k = 3; k < coefficients_.size(); ++k) {
    const double c = coefficients_[k];
    if (c == 0.0) continue;
    const int p = static_cast<int>(k);
    e += c * ((Q - q) * p * std::pow(mid, p - 1) - std::pow(Q, p) + std::pow(q, p));
  }
  return e;
}

// --- superoperator field --------------------------------------------------------

double SuperoperatorField::max_abs() const {
  double m = 0.0;
  for (double e : values) m = std::max(m, std::abs(e));
  return m;
}

SuperoperatorField superoperator_field(const Potential& v, const GridSpec& grid) {
  const int n = grid.n_points;
  SuperoperatorField f{grid, std::vector<double>(grid.size(), 0.0)};
  for (int a = 0; a < n; ++a) {
    const double Q = grid.coordinate(a);
    for (int b = a + 1; b < n; ++b) {
      const double e = v.anharmonic_coupling(Q, grid.coordinate(b));
      f.values[static_cast<std::size_t>(a) * n + b] = e;
      f.values[static_cast<std::size_t>(b) * n + a] = -e;
    }
  }
  return f;
}

double midpoint_term(const Potential& v, double q, double Q) {
  if (Q == q) return 0.0;
  return (Q - q) * v.derivative(0.5 * (Q + q));
}

double segment_sum(const PiecewiseLinearPotential& v, double q, double Q) {
  const auto bp = v.breakpoints();
  for (double s : {q, Q})
    if (!(s >= v.lower() && s <= v.upper()))
      throw DomainError(fmt::format("segment_sum: {} outside breakpoint range [{}, {}]", s, v.lower(), v.upper()));
  if (q == Q) return 0.0;
  const double lo = std::min(q, Q);
  const double hi = std::max(q, Q);

  double sum = 0.0;
  double left = lo;
  auto it = std::upper_bound(bp.begin(), bp.end(), lo);
  for (; it != bp.end() && *it < hi; ++it) {
    sum += (*it - left) * v.derivative(0.5 * (left + *it));
    left = *it;
  }
  sum += (hi - left) * v.derivative(0.5 * (left + hi));
  return Q > q ? sum : -sum;
}

PiecewiseLinearPotential linearize(const Potential& V, double delta, double lo, double hi) {
  if (!(delta > 0.0)) throw DomainError("linearize: delta must be positive");
  if (!(hi > lo)) throw DomainError("linearize: empty range");
  const auto segments = static_cast<long>(std::ceil((hi - lo) / delta * (1.0 - 1e-12)));
  std::vector<double> s(static_cast<std::size_t>(segments) + 1);
  std::vector<double> vals(s.size());
  for (std::size_t n = 0; n < s.size(); ++n) {
    s[n] = lo + static_cast<double>(n) * delta;
    vals[n] = V.value(s[n]);
  }
  return PiecewiseLinearPotential(std::move(s), std::move(vals));
}

PiecewiseLinearPotential linearize(const Potential& V, std::span<const double> deltas, double lo, double hi) {
  if (deltas.empty()) throw DomainError("linearize: empty delta list");
  std::vector<double> s{lo};
  for (double d : deltas) {
    if (!(d > 0.0)) throw DomainError("linearize: every delta_n must be positive");
    s.push_back(s.back() + d);
  }
  if (s.back() < hi - 1e-12 * std::max(1.0, std::abs(hi)))
    throw DomainError(fmt::format("linearize: deltas cover [{}, {}] but range ends at {}", lo, s.back(), hi));
  std::vector<double> vals(s.size());
  for (std::size_t n = 0; n < s.size(); ++n) vals[n] = V.value(s[n]);
  return PiecewiseLinearPotential(std::move(s), std::move(vals));
}

}  // namespace qlab
