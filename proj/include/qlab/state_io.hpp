#pragma once

// Text serialization of grid states:
//
//   # grid n=<N> L=<L> axes=<a>,<b> time=<t>
//   i,j,re,im
//   ...
//
// Values are written with 17 significant digits, so a write/read cycle
// reproduces every double exactly.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qlab/grid.hpp"

namespace qlab {

struct StateRecord {
  GridSpec grid;
  std::string axes;
  double time = 0.0;
  std::vector<cplx> values;
};

void write_state_csv(std::ostream& os, const GridSpec& grid, const std::string& axes, double time,
                     std::span<const cplx> values);
void write_state_csv(const std::filesystem::path& path, const DensityGrid& f);
void write_state_csv(const std::filesystem::path& path, const PhaseSpaceDistribution& f);

StateRecord read_state_csv(std::istream& is);
StateRecord read_state_csv(const std::filesystem::path& path);

DensityGrid to_density_grid(const StateRecord& r);
PhaseSpaceDistribution to_phase_space_distribution(const StateRecord& r);

}  // namespace qlab
