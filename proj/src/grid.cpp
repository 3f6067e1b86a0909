#include "qlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <map>
#include <memory>

#include "fft_cache.hpp"
#include "qlab/errors.hpp"

namespace qlab {

using std::numbers::pi;

const SquareFft& fft_for(int n) {
  thread_local std::map<int, std::unique_ptr<SquareFft>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<SquareFft>(n);
  return *slot;
}

GridSpec GridSpec::make(int n_points, double half_width) {
  if (n_points < 8 || n_points % 2 != 0)
    throw ConfigError(fmt::format("grid.n must be an even integer >= 8, got {}", n_points));
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw ConfigError(fmt::format("grid.L must be positive, got {}", half_width));
  return GridSpec{n_points, half_width};
}

double PhaseSpaceDistribution::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.spacing() * grid.momentum_spacing();
}

namespace {

inline int wrap(int i, int n) {
  i %= n;
  return i < 0 ? i + n : i;
}

inline double parity(int k) { return (k & 1) ? -1.0 : 1.0; }

// Relative tail of exp(-(s - c)^2 / (2 sigma^2)) at the nearer end of a
// centered periodic axis [-h, h).
double gaussian_edge_tail(double center, double sigma, double half) {
  const double gap = std::min(center + half, half - center);
  if (gap <= 0.0) return 1.0;
  return std::exp(-gap * gap / (2.0 * sigma * sigma));
}

// Spectral shift of every odd-d column of an (x, y) array by +dir * D/2 in x.
// Even columns are left untouched.
void half_shift_odd_columns(std::vector<cplx>& v, const GridSpec& g, int dir) {
  const int n = g.n_points;
  std::vector<cplx> work = v;
  const auto& fft = fft_for(n);
  fft.forward(work, Axis::first);
  const double h = 0.5 * g.spacing();
  for (int r = 0; r < n; ++r) {
    // Multiplier is real at the Nyquist mode so that conjugate-symmetric
    // column pairs stay conjugate-symmetric.
    const cplx mult = (r == n / 2) ? cplx{1.0, 0.0} : std::polar(1.0, dir * g.wavenumber(r) * h);
    for (int m = 0; m < n; ++m) {
      if (((m - n / 2) & 1) == 0) continue;
      work[static_cast<std::size_t>(r) * n + m] *= mult / static_cast<double>(n);
    }
  }
  fft.backward(work, Axis::first);
  for (int i = 0; i < n; ++i)
    for (int m = 0; m < n; ++m)
      if ((m - n / 2) & 1) v[static_cast<std::size_t>(i) * n + m] = work[static_cast<std::size_t>(i) * n + m];
}

// Lattice point (i, m) of the shifted (x, y) array that carries the pair (a, b).
inline std::pair<int, int> xy_index_of(int a, int b, int n) {
  int d = wrap(a - b + n / 2, n) - n / 2;
  const int i = (d % 2 == 0) ? a - d / 2 : a - (d + 1) / 2;
  return {wrap(i, n), d + n / 2};
}

}  // namespace

PhaseSpaceDistribution make_gaussian_phase_space(double center_x, double center_p, double sigma_x,
                                                 double sigma_p, const GridSpec& grid) {
  if (!(sigma_x > 0.0) || !(sigma_p > 0.0))
    throw DomainError("make_gaussian_phase_space: widths must be positive");
  const double tail_x = gaussian_edge_tail(center_x, sigma_x, grid.half_width);
  const double tail_p = gaussian_edge_tail(center_p, sigma_p, grid.momentum_half_width());
  if (tail_x >= 1e-12 || tail_p >= 1e-12)
    throw DomainError(fmt::format(
        "grid too small for Gaussian support: boundary tails x={:.3g}, p={:.3g} (need < 1e-12)", tail_x,
        tail_p));
  const int n = grid.n_points;
  PhaseSpaceDistribution f{grid, std::vector<double>(grid.size()), 0.0};
  const double norm = 1.0 / (2.0 * pi * sigma_x * sigma_p);
  for (int i = 0; i < n; ++i) {
    const double ux = (grid.coordinate(i) - center_x) / sigma_x;
    for (int k = 0; k < n; ++k) {
      const double up = (grid.momentum(k) - center_p) / sigma_p;
      f.values[static_cast<std::size_t>(i) * n + k] = norm * std::exp(-0.5 * (ux * ux + up * up));
    }
  }
  return f;
}

std::vector<cplx> gaussian_wavepacket(double x0, double p0, double sigma, const GridSpec& grid) {
  if (!(sigma > 0.0)) throw DomainError("gaussian_wavepacket: sigma must be positive");
  std::vector<cplx> psi(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) {
    const double x = grid.coordinate(i);
    const double u = (x - x0) / sigma;
    psi[i] = std::polar(std::exp(-0.25 * u * u), p0 * x);
  }
  return psi;
}

DensityGrid pure_state_density(std::span<const cplx> psi, const GridSpec& grid) {
  const int n = grid.n_points;
  if (psi.size() != static_cast<std::size_t>(n)) throw ConfigError("pure_state_density: size mismatch");
  double norm = 0.0;
  for (const auto& z : psi) norm += std::norm(z);
  norm *= grid.spacing();
  if (!(norm > 0.0)) throw DomainError("pure_state_density: zero wave function");
  DensityGrid rho{grid, std::vector<cplx>(grid.size()), 0.0};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) rho(a, b) = psi[a] * std::conj(psi[b]) / norm;
  return rho;
}

DensityGrid make_cat_state(double separation, double sigma, const GridSpec& grid) {
  auto left = gaussian_wavepacket(-0.5 * separation, 0.0, sigma, grid);
  const auto right = gaussian_wavepacket(0.5 * separation, 0.0, sigma, grid);
  for (std::size_t i = 0; i < left.size(); ++i) left[i] += right[i];
  const double tail = std::max(std::abs(left.front()), std::abs(left.back()));
  double peak = 0.0;
  for (const auto& z : left) peak = std::max(peak, std::abs(z));
  if (tail >= 1e-12 * peak) throw DomainError("make_cat_state: packets reach the grid boundary");
  return pure_state_density(left, grid);
}

MixedGrid xp_to_xy(const PhaseSpaceDistribution& f) {
  const GridSpec& g = f.grid;
  const int n = g.n_points;
  MixedGrid out{g, std::vector<cplx>(g.size()), f.time};
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      out.values[static_cast<std::size_t>(i) * n + k] = parity(k) * f.values[static_cast<std::size_t>(i) * n + k];
  fft_for(n).backward(out.values, Axis::second);
  const double scale = g.momentum_spacing() * parity(n / 2);
  for (int i = 0; i < n; ++i)
    for (int m = 0; m < n; ++m) out.values[static_cast<std::size_t>(i) * n + m] *= scale * parity(m);
  return out;
}

std::vector<cplx> xy_to_xp_complex(const MixedGrid& f) {
  const GridSpec& g = f.grid;
  const int n = g.n_points;
  std::vector<cplx> out(g.size());
  for (int i = 0; i < n; ++i)
    for (int m = 0; m < n; ++m)
      out[static_cast<std::size_t>(i) * n + m] = parity(m) * f.values[static_cast<std::size_t>(i) * n + m];
  fft_for(n).forward(out, Axis::second);
  const double scale = g.spacing() / (2.0 * pi) * parity(n / 2);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(i) * n + k] *= scale * parity(k);
  return out;
}

PhaseSpaceDistribution xy_to_xp(const MixedGrid& f) {
  const auto c = xy_to_xp_complex(f);
  PhaseSpaceDistribution out{f.grid, std::vector<double>(c.size()), f.time};
  std::transform(c.begin(), c.end(), out.values.begin(), [](cplx z) { return z.real(); });
  return out;
}

DensityGrid xy_to_Qq(const MixedGrid& f) {
  const GridSpec& g = f.grid;
  const int n = g.n_points;
  std::vector<cplx> shifted = f.values;
  half_shift_odd_columns(shifted, g, +1);
  DensityGrid out{g, std::vector<cplx>(g.size()), f.time};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const auto [i, m] = xy_index_of(a, b, n);
      out(a, b) = shifted[static_cast<std::size_t>(i) * n + m];
    }
  return out;
}

MixedGrid Qq_to_xy(const DensityGrid& f) {
  const GridSpec& g = f.grid;
  const int n = g.n_points;
  MixedGrid out{g, std::vector<cplx>(g.size()), f.time};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const auto [i, m] = xy_index_of(a, b, n);
      out.values[static_cast<std::size_t>(i) * n + m] = f(a, b);
    }
  half_shift_odd_columns(out.values, g, -1);
  return out;
}

StateDiagnostics diagnostics(const DensityGrid& f) {
  const int n = f.grid.n_points;
  StateDiagnostics d;
  cplx tr{0.0, 0.0};
  double defect = 0.0;
  for (int a = 0; a < n; ++a) {
    tr += f(a, a);
    for (int b = a; b < n; ++b) defect = std::max(defect, std::abs(f(a, b) - std::conj(f(b, a))));
  }
  d.trace = tr * f.grid.spacing();
  d.hermiticity_defect = defect;
  const auto rec = xy_to_xp_complex(Qq_to_xy(f));
  double mn = rec.empty() ? 0.0 : rec.front().real();
  for (const auto& z : rec) mn = std::min(mn, z.real());
  d.min_reconstructed_density = mn;
  return d;
}

StateDiagnostics diagnostics(const PhaseSpaceDistribution& f) {
  const DensityGrid rho = to_density(f);
  StateDiagnostics d = diagnostics(rho);
  d.min_reconstructed_density = *std::min_element(f.values.begin(), f.values.end());
  return d;
}

namespace {
template <typename T>
double boundary_tail_impl(std::span<const T> v, int n) {
  double peak = 0.0;
  for (const auto& z : v) peak = std::max(peak, std::abs(z));
  if (peak == 0.0) return 0.0;
  double edge = 0.0;
  for (int j = 0; j < n; ++j) {
    edge = std::max({edge, std::abs(v[j]), std::abs(v[static_cast<std::size_t>(n - 1) * n + j]),
                     std::abs(v[static_cast<std::size_t>(j) * n]),
                     std::abs(v[static_cast<std::size_t>(j) * n + n - 1])});
  }
  return edge / peak;
}
}  // namespace

double boundary_tail(std::span<const cplx> values, int n) { return boundary_tail_impl(values, n); }
double boundary_tail(std::span<const double> values, int n) { return boundary_tail_impl(values, n); }

double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw ConfigError("max_abs_diff: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double l2_diff(std::span<const cplx> a, std::span<const cplx> b, double cell_area) {
  if (a.size() != b.size()) throw ConfigError("l2_diff: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s * cell_area);
}

}  // namespace qlab
