#include "qlab/state_io.hpp"

#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "qlab/errors.hpp"

namespace qlab {

namespace {

double parse_double(std::string_view s, int line) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end)
    throw ConfigError(fmt::format("state csv line {}: cannot parse number '{}'", line, s));
  return v;
}

int parse_int(std::string_view s, int line) {
  int v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end)
    throw ConfigError(fmt::format("state csv line {}: cannot parse integer '{}'", line, s));
  return v;
}

}  // namespace

void write_state_csv(std::ostream& os, const GridSpec& grid, const std::string& axes, double time,
                     std::span<const cplx> values) {
  const int n = grid.n_points;
  if (values.size() != grid.size()) throw ConfigError("write_state_csv: value count does not match grid");
  os << fmt::format("# grid n={} L={:.17g} axes={} time={:.17g}\n", n, grid.half_width, axes, time);
  os << "i,j,re,im\n";
  fmt::memory_buffer buf;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const cplx z = values[static_cast<std::size_t>(i) * n + j];
      fmt::format_to(std::back_inserter(buf), "{},{},{:.17g},{:.17g}\n", i, j, z.real(), z.imag());
    }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void write_state_csv(const std::filesystem::path& path, const DensityGrid& f) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  write_state_csv(os, f.grid, "Q,q", f.time, f.values);
}

void write_state_csv(const std::filesystem::path& path, const PhaseSpaceDistribution& f) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  std::vector<cplx> c(f.values.begin(), f.values.end());
  write_state_csv(os, f.grid, "x,p", f.time, c);
}

StateRecord read_state_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# grid ", 0) != 0)
    throw ConfigError("state csv line 1: missing '# grid' header");

  StateRecord rec;
  int n = -1;
  double half = -1.0;
  std::istringstream hs(line.substr(7));
  std::string tok;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw ConfigError("state csv line 1: malformed header token '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    const std::string_view val = std::string_view(tok).substr(eq + 1);
    if (key == "n")
      n = parse_int(val, 1);
    else if (key == "L")
      half = parse_double(val, 1);
    else if (key == "axes")
      rec.axes = std::string(val);
    else if (key == "time")
      rec.time = parse_double(val, 1);
    else
      throw ConfigError("state csv line 1: unknown header key '" + key + "'");
  }
  rec.grid = GridSpec::make(n, half);
  rec.values.assign(rec.grid.size(), cplx{});

  if (!std::getline(is, line) || line != "i,j,re,im") throw ConfigError("state csv line 2: expected column header");
  std::vector<char> seen(rec.grid.size(), 0);
  int lineno = 2;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::string_view sv(line);
    std::string_view fields[4];
    for (int f = 0; f < 4; ++f) {
      const auto comma = sv.find(',');
      if ((f < 3) == (comma == std::string_view::npos))
        throw ConfigError(fmt::format("state csv line {}: expected 4 fields", lineno));
      fields[f] = sv.substr(0, comma);
      if (f < 3) sv.remove_prefix(comma + 1);
    }
    const int i = parse_int(fields[0], lineno);
    const int j = parse_int(fields[1], lineno);
    if (i < 0 || j < 0 || i >= n || j >= n)
      throw ConfigError(fmt::format("state csv line {}: index out of range", lineno));
    const std::size_t idx = static_cast<std::size_t>(i) * n + j;
    if (seen[idx]) throw ConfigError(fmt::format("state csv line {}: duplicate entry ({},{})", lineno, i, j));
    seen[idx] = 1;
    rec.values[idx] = cplx{parse_double(fields[2], lineno), parse_double(fields[3], lineno)};
  }
  return rec;
}

StateRecord read_state_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open state file: " + path.string());
  return read_state_csv(is);
}

DensityGrid to_density_grid(const StateRecord& r) { return DensityGrid{r.grid, r.values, r.time}; }

PhaseSpaceDistribution to_phase_space_distribution(const StateRecord& r) {
  PhaseSpaceDistribution f{r.grid, std::vector<double>(r.values.size()), r.time};
  for (std::size_t i = 0; i < r.values.size(); ++i) f.values[i] = r.values[i].real();
  return f;
}

}  // namespace qlab
