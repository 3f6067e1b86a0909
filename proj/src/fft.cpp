#include "qlab/fft.hpp"

#include <fftw3.h>

#include <cassert>
#include <mutex>
#include <stdexcept>

namespace qlab {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::span<cplx> data) {
  return reinterpret_cast<fftw_complex*>(data.data());
}

}  // namespace

struct SquareFft::Plans {
  fftw_plan first_fwd = nullptr;
  fftw_plan first_bwd = nullptr;
  fftw_plan second_fwd = nullptr;
  fftw_plan second_bwd = nullptr;
  fftw_plan full_fwd = nullptr;
  fftw_plan full_bwd = nullptr;

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    for (fftw_plan p : {first_fwd, first_bwd, second_fwd, second_bwd, full_fwd, full_bwd})
      if (p) fftw_destroy_plan(p);
  }
};

SquareFft::SquareFft(int n) : n_(n), plans_(std::make_unique<Plans>()) {
  if (n < 2) throw std::invalid_argument("SquareFft: n must be >= 2");
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(planner_mutex());
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n * n));
  int len[1] = {n};
  // Along the first index: n transforms, element stride n, batch distance 1.
  plans_->first_fwd =
      fftw_plan_many_dft(1, len, n, buf, nullptr, n, 1, buf, nullptr, n, 1, FFTW_FORWARD, flags);
  plans_->first_bwd =
      fftw_plan_many_dft(1, len, n, buf, nullptr, n, 1, buf, nullptr, n, 1, FFTW_BACKWARD, flags);
  plans_->second_fwd =
      fftw_plan_many_dft(1, len, n, buf, nullptr, 1, n, buf, nullptr, 1, n, FFTW_FORWARD, flags);
  plans_->second_bwd =
      fftw_plan_many_dft(1, len, n, buf, nullptr, 1, n, buf, nullptr, 1, n, FFTW_BACKWARD, flags);
  plans_->full_fwd = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, flags);
  plans_->full_bwd = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, flags);
  fftw_free(buf);
}

SquareFft::~SquareFft() = default;
SquareFft::SquareFft(SquareFft&&) noexcept = default;
SquareFft& SquareFft::operator=(SquareFft&&) noexcept = default;

void SquareFft::forward(std::span<cplx> data, Axis axis) const {
  assert(data.size() == static_cast<std::size_t>(n_) * n_);
  fftw_execute_dft(axis == Axis::first ? plans_->first_fwd : plans_->second_fwd,
                   as_fftw(data), as_fftw(data));
}

void SquareFft::backward(std::span<cplx> data, Axis axis) const {
  assert(data.size() == static_cast<std::size_t>(n_) * n_);
  fftw_execute_dft(axis == Axis::first ? plans_->first_bwd : plans_->second_bwd,
                   as_fftw(data), as_fftw(data));
}

void SquareFft::forward2d(std::span<cplx> data) const {
  assert(data.size() == static_cast<std::size_t>(n_) * n_);
  fftw_execute_dft(plans_->full_fwd, as_fftw(data), as_fftw(data));
}

void SquareFft::backward2d(std::span<cplx> data) const {
  assert(data.size() == static_cast<std::size_t>(n_) * n_);
  fftw_execute_dft(plans_->full_bwd, as_fftw(data), as_fftw(data));
}

}  // namespace qlab
