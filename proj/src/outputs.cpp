#include "qlab/outputs.hpp"

#include <fmt/format.h>
#include <fstream>

#include "qlab/errors.hpp"
#include "qlab/state_io.hpp"

namespace qlab {

namespace fs = std::filesystem;

namespace {

class Writer {
 public:
  explicit Writer(const fs::path& path) : path_(path), os_(path, std::ios::binary | std::ios::trunc) {
    if (!os_) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  }
  std::ostream& os() { return os_; }
  void close() {
    os_.close();
    if (!os_) throw IoError(fmt::format("error writing '{}'", path_.string()));
  }

 private:
  fs::path path_;
  std::ofstream os_;
};

std::string join_row(const std::vector<double>& row, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += sep;
    out += format_number(row[i]);
  }
  return out;
}

}  // namespace

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

std::string format_hash(std::uint64_t h) { return fmt::format("{:016x}", h); }

void prepare_output_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
  const auto probe = dir / ".write_probe";
  {
    Writer w(probe);
    w.close();
  }
  fs::remove(probe, ec);
}

std::vector<fs::path> emit_outputs(const RunReport& report, const fs::path& dir) {
  prepare_output_dir(dir);
  std::vector<fs::path> files;
  const std::string hash = format_hash(report.scenario_hash);

  for (const auto& t : report.tables) {
    const fs::path csv = t.name + ".csv";
    Writer w(dir / csv);
    for (std::size_t i = 0; i < t.columns.size(); ++i) w.os() << (i ? "," : "") << t.columns[i];
    w.os() << '\n';
    for (const auto& row : t.rows) w.os() << join_row(row, ",") << '\n';
    w.close();
    files.push_back(csv);

    if (t.curve && t.columns.size() >= 2) {
      const fs::path dat = t.name + ".dat";
      Writer d(dir / dat);
      d.os() << "# " << t.columns[0] << ' ' << t.columns[1] << "  scenario " << hash << '\n';
      for (const auto& row : t.rows) d.os() << format_number(row[0]) << ' ' << format_number(row[1]) << '\n';
      d.close();
      files.push_back(dat);
    }
  }

  if (!report.snapshots.empty()) {
    std::error_code ec;
    fs::create_directories(dir / "snapshots", ec);
    if (ec) throw IoError(fmt::format("cannot create '{}': {}", (dir / "snapshots").string(), ec.message()));
    for (const auto& s : report.snapshots) {
      const fs::path rel = fs::path("snapshots") / (s.name + ".csv");
      std::visit([&](const auto& state) { write_state_csv(dir / rel, state); }, s.state);
      files.push_back(rel);
    }
  }

  {
    Writer w(dir / "summary.txt");
    auto& os = w.os();
    os << "study=" << report.study << '\n';
    os << "scenario_hash=" << hash << '\n';
    os << "result=" << (report.pass() ? "PASS" : "FAIL") << '\n';
    os << "wall_seconds=" << fmt::format("{:.3f}", report.wall_seconds) << '\n';
    for (const auto& [k, v] : report.seeds) os << "seed." << k << '=' << v << '\n';
    for (const auto& [k, v] : report.metrics) os << "metric." << k << '=' << format_number(v) << '\n';
    for (std::size_t i = 0; i < report.checks.size(); ++i) {
      const auto& c = report.checks[i];
      const std::string p = fmt::format("check.{}.", i);
      os << p << "name=" << c.name << '\n';
      os << p << "criterion=" << c.criterion << '\n';
      os << p << "observed=" << format_number(c.observed) << '\n';
      os << p << "relation=" << c.relation << '\n';
      os << p << "threshold=" << format_number(c.threshold) << '\n';
      os << p << "result=" << (c.pass ? "PASS" : "FAIL") << '\n';
    }
    for (std::size_t i = 0; i < report.warnings.size(); ++i) os << "warning." << i << '=' << report.warnings[i] << '\n';
    w.close();
    files.emplace_back("summary.txt");
  }

  files.emplace_back("index.txt");
  Writer w(dir / "index.txt");
  w.os() << "# scenario " << hash << '\n';
  for (const auto& f : files) w.os() << f.generic_string() << '\n';
  w.close();
  return files;
}

}  // namespace qlab
