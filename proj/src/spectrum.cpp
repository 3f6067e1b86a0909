#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "qlab/errors.hpp"
#include "qlab/evolvers.hpp"

namespace qlab {

namespace {

constexpr int kMaxDensePoints = 32;

Eigen::MatrixXd one_body_matrix(const Potential& v, const GridSpec& g) {
  const int n = g.n_points;
  const double c = 0.5 / (g.spacing() * g.spacing());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    h(a, a) = 2.0 * c + v.value(g.coordinate(a));
    h(a, (a + 1) % n) -= c;
    h(a, (a + n - 1) % n) -= c;
  }
  return h;
}

}  // namespace

GeneratorSpectrum dense_generator(const Potential& v, const GridSpec& grid) {
  const int n = grid.n_points;
  if (n > kMaxDensePoints)
    throw DomainError(fmt::format("dense_generator: {} points per axis exceeds the dense limit {}", n, kMaxDensePoints));
  const int dim = n * n;
  const Eigen::MatrixXd h = one_body_matrix(v, grid);
  const SuperoperatorField e = superoperator_field(v, grid);

  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(dim, dim);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const int row = a * n + b;
      for (int c = 0; c < n; ++c) {
        L(row, c * n + b) += h(a, c);  // H acting on Q
        L(row, a * n + c) -= h(b, c);  // H acting on q
      }
      L(row, row) += e(a, b);
    }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(L, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("dense_generator: eigen-solve failed");

  GeneratorSpectrum out;
  out.dimension = dim;
  out.matrix.resize(static_cast<std::size_t>(dim) * dim);
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(out.matrix.data(), dim, dim) = L;
  out.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + dim);
  return out;
}

std::vector<double> one_body_levels(const Potential& v, const GridSpec& grid) {
  if (grid.n_points > 4096) throw DomainError("one_body_levels: grid too large for a dense solve");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(one_body_matrix(v, grid), Eigen::EigenvaluesOnly);
  return {solver.eigenvalues().data(), solver.eigenvalues().data() + grid.n_points};
}

double spectrum_asymmetry(const std::vector<double>& ev) {
  // For sorted ev the mirror partner of ev[i] is ev[n-1-i].
  double worst = 0.0;
  const std::size_t n = ev.size();
  for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(ev[i] + ev[n - 1 - i]));
  return worst;
}

}  // namespace qlab
