#pragma once

// Result files of a study, all inside one output directory:
//
//   <table>.csv        header row, then numbers with 17 significant digits
//   <table>.dat        two columns (first vs second) for gnuplot, curves only
//   snapshots/<name>.csv   grid states in the state_io format
//   summary.txt        key=value report (metrics, checks, seeds, warnings)
//   index.txt          every file written, relative to the directory

#include <filesystem>
#include <string>
#include <vector>

#include "qlab/studies.hpp"

namespace qlab {

/// Creates the directory and verifies it is writable. Throws IoError.
void prepare_output_dir(const std::filesystem::path& dir);

/// Writes every file of the report; returns the paths relative to dir.
std::vector<std::filesystem::path> emit_outputs(const RunReport& report, const std::filesystem::path& dir);

/// Shortest text that reads back to the same double.
std::string format_number(double v);

std::string format_hash(std::uint64_t h);

}  // namespace qlab
