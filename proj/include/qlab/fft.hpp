#pragma once

#include <complex>
#include <memory>
#include <span>

namespace qlab {

using cplx = std::complex<double>;

/// Which index of a row-major N x N array a batched 1D transform runs over.
enum class Axis {
  first,   // along i in data[i*N + j], one transform per column j
  second,  // along j, one transform per row i
};

/// FFTW plans for an N x N complex array: batched 1D along either axis and
/// full 2D. Transforms are unnormalized (backward(forward(x)) = N x for 1D,
/// N^2 x for 2D). Plans are built with FFTW_ESTIMATE so results do not depend
/// on timing; execution is safe from multiple threads on distinct arrays.
class SquareFft {
 public:
  explicit SquareFft(int n);
  ~SquareFft();
  SquareFft(const SquareFft&) = delete;
  SquareFft& operator=(const SquareFft&) = delete;
  SquareFft(SquareFft&&) noexcept;
  SquareFft& operator=(SquareFft&&) noexcept;

  int size() const noexcept { return n_; }

  void forward(std::span<cplx> data, Axis axis) const;
  void backward(std::span<cplx> data, Axis axis) const;
  void forward2d(std::span<cplx> data) const;
  void backward2d(std::span<cplx> data) const;

 private:
  struct Plans;
  int n_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace qlab
