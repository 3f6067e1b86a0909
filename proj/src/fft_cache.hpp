#pragma once

#include "qlab/fft.hpp"

namespace qlab {

/// Per-thread cache of plans keyed by grid size.
const SquareFft& fft_for(int n);

}  // namespace qlab
