#include "qlab/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <set>
#include <sstream>

#include "qlab/errors.hpp"

namespace qlab {

namespace {

struct Entry {
  std::string raw;
  int line = 0;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

// Strips a trailing comment that is not inside quotes.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

class Reader {
 public:
  Reader(std::map<std::string, Entry> entries, std::string origin)
      : entries_(std::move(entries)), origin_(std::move(origin)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    const auto it = entries_.find(key);
    if (it != entries_.end())
      throw ConfigError(fmt::format("{}:{}: {}: {}", origin_, it->second.line, key, msg));
    throw ConfigError(fmt::format("{}: {}: {}", origin_, key, msg));
  }

  std::string str(const std::string& key, const std::string& fallback) const {
    return has(key) ? unquote(entries_.at(key).raw) : fallback;
  }

  double num(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    if (!has(key)) {
      if (!fallback) fail(key, "required key is missing");
      return *fallback;
    }
    return parse_double(key, entries_.at(key).raw);
  }

  long integer(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    const auto& s = entries_.at(key).raw;
    long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      // Accept integral values written as floating point, e.g. 1e5.
      const double d = parse_double(key, s);
      if (d != std::floor(d) || std::abs(d) > 9e15) fail(key, fmt::format("expected an integer, got '{}'", s));
      return static_cast<long>(d);
    }
    return v;
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto s = unquote(entries_.at(key).raw);
    if (s == "true") return true;
    if (s == "false") return false;
    fail(key, fmt::format("expected true or false, got '{}'", s));
  }

  std::vector<std::string> list(const std::string& key) const {
    const auto& s = entries_.at(key).raw;
    if (s.size() < 2 || s.front() != '[' || s.back() != ']')
      fail(key, fmt::format("expected a bracketed list, got '{}'", s));
    std::vector<std::string> out;
    const std::string body = s.substr(1, s.size() - 2);
    if (trim(body).empty()) return out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) fail(key, "empty list element");
      out.push_back(unquote(item));
    }
    return out;
  }

  std::vector<double> numbers(const std::string& key) const {
    std::vector<double> out;
    for (const auto& s : list(key)) out.push_back(parse_double(key, s));
    return out;
  }

  double parse_double(const std::string& key, const std::string& s) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
      fail(key, fmt::format("expected a finite number, got '{}'", s));
    return v;
  }

  const std::map<std::string, Entry>& entries() const { return entries_; }

 private:
  std::map<std::string, Entry> entries_;
  std::string origin_;
};

const std::vector<std::string> kKeys = {
    "grid.n",
    "grid.L",
    "potential.kind",
    "potential.params.c",
    "potential.params.a",
    "potential.params.b",
    "potential.params.drive_amplitude",
    "potential.params.drive_frequency",
    "potential.params.omega",
    "potential.params.lambda",
    "potential.params.coefficients",
    "potential.breakpoints",
    "potential.values",
    "initial.kind",
    "initial.x",
    "initial.p",
    "initial.sigma_x",
    "initial.sigma_p",
    "initial.separation",
    "initial.sigma",
    "engine",
    "evolve.dt",
    "evolve.t_end",
    "evolve.records",
    "evolve.tail_threshold",
    "evolve.hamiltonian",
    "noise.nu",
    "noise.seed",
    "noise.realizations",
    "noise.mode",
    "noise.distribution",
    "probes",
    "output.dir",
    "void.dr",
    "void.rho",
    "void.duration",
    "void.geometry",
    "void.trials",
    "void.seed",
};

// Keys that belong to one potential kind only.
const std::map<std::string, std::set<PotentialKind>> kPotentialKeyKinds = {
    {"potential.params.c", {PotentialKind::constant}},
    {"potential.params.a", {PotentialKind::linear}},
    {"potential.params.b", {PotentialKind::linear}},
    {"potential.params.drive_amplitude", {PotentialKind::linear}},
    {"potential.params.drive_frequency", {PotentialKind::linear}},
    {"potential.params.omega", {PotentialKind::harmonic}},
    {"potential.params.lambda", {PotentialKind::quartic}},
    {"potential.params.coefficients", {PotentialKind::polynomial}},
    {"potential.breakpoints", {PotentialKind::piecewise_linear}},
    {"potential.values", {PotentialKind::piecewise_linear}},
};

PotentialKind parse_kind(const Reader& r) {
  const auto s = r.str("potential.kind", "constant");
  for (auto k : {PotentialKind::constant, PotentialKind::linear, PotentialKind::harmonic, PotentialKind::quartic,
                 PotentialKind::polynomial, PotentialKind::piecewise_linear})
    if (s == to_string(k)) return k;
  r.fail("potential.kind",
         fmt::format("unknown kind '{}' (constant, linear, harmonic, quartic, polynomial, piecewise_linear)", s));
}

std::uint64_t parse_seed(const Reader& r, const std::string& key) {
  const long v = r.integer(key, 0);
  if (v < 0) r.fail(key, "seed must be >= 0");
  return static_cast<std::uint64_t>(v);
}

}  // namespace

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

const std::vector<std::string>& scenario_keys() { return kKeys; }

Potential PotentialSpec::build() const {
  switch (kind) {
    case PotentialKind::constant: return Potential::constant(c);
    case PotentialKind::linear: return Potential::linear(a, b, drive);
    case PotentialKind::harmonic: return Potential::harmonic(omega);
    case PotentialKind::quartic: return Potential::quartic(lambda);
    case PotentialKind::polynomial: return Potential::polynomial(coefficients);
    case PotentialKind::piecewise_linear: return Potential::piecewise(PiecewiseLinearPotential(breakpoints, values));
  }
  throw ConfigError("unreachable potential kind");
}

Potential Scenario::effective_potential() const {
  return hamiltonian ? potential.build() : Potential::constant(0.0);
}

PhaseSpaceDistribution Scenario::initial_phase_space() const {
  if (initial.kind != InitialSpec::Kind::gaussian)
    throw ConfigError("initial.kind = cat has no classical phase-space form; use a gaussian for this study");
  return make_gaussian_phase_space(initial.x, initial.p, initial.sigma_x, initial.sigma_p, grid);
}

DensityGrid Scenario::initial_density() const {
  if (initial.kind == InitialSpec::Kind::cat) return make_cat_state(initial.separation, initial.sigma, grid);
  return to_density(initial_phase_space());
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  std::map<std::string, Entry> entries;
  {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto body = trim(strip_comment(line));
      if (body.empty()) continue;
      const auto eq = body.find('=');
      if (eq == std::string::npos)
        throw ConfigError(fmt::format("{}:{}: expected 'key = value', got '{}'", origin, lineno, body));
      const auto key = trim(std::string_view(body).substr(0, eq));
      const auto value = trim(std::string_view(body).substr(eq + 1));
      if (key.empty()) throw ConfigError(fmt::format("{}:{}: empty key", origin, lineno));
      if (value.empty()) throw ConfigError(fmt::format("{}:{}: {}: empty value", origin, lineno, key));
      if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end())
        throw ConfigError(fmt::format("{}:{}: unknown key '{}'", origin, lineno, key));
      if (const auto it = entries.find(key); it != entries.end())
        throw ConfigError(
            fmt::format("{}:{}: duplicate key '{}' (first set on line {})", origin, lineno, key, it->second.line));
      entries.emplace(key, Entry{value, lineno});
    }
  }
  const Reader r(entries, origin);

  Scenario s;
  s.source = origin;
  {
    std::string canonical;
    for (const auto& [k, e] : entries) canonical += k + "=" + e.raw + "\n";
    s.hash = fnv1a(canonical);
  }

  const long n = r.integer("grid.n", 128);
  const double L = r.num("grid.L", 10.0);
  try {
    s.grid = GridSpec::make(static_cast<int>(n), L);
  } catch (const ConfigError& e) {
    r.fail(r.has("grid.n") ? "grid.n" : "grid.L", e.what());
  }

  auto& pot = s.potential;
  pot.kind = parse_kind(r);
  pot.declared = r.has("potential.kind");
  for (const auto& [key, kinds] : kPotentialKeyKinds)
    if (r.has(key) && !kinds.count(pot.kind))
      r.fail(key, fmt::format("does not apply to potential.kind = {}", to_string(pot.kind)));
  switch (pot.kind) {
    case PotentialKind::constant: pot.c = r.num("potential.params.c", 0.0); break;
    case PotentialKind::linear:
      pot.a = r.num("potential.params.a");
      pot.b = r.num("potential.params.b", 0.0);
      pot.drive.amplitude = r.num("potential.params.drive_amplitude", 0.0);
      pot.drive.frequency = r.num("potential.params.drive_frequency", 0.0);
      break;
    case PotentialKind::harmonic:
      pot.omega = r.num("potential.params.omega");
      if (!(pot.omega > 0.0)) r.fail("potential.params.omega", "must be > 0");
      break;
    case PotentialKind::quartic: pot.lambda = r.num("potential.params.lambda"); break;
    case PotentialKind::polynomial:
      if (!r.has("potential.params.coefficients")) r.fail("potential.params.coefficients", "required key is missing");
      pot.coefficients = r.numbers("potential.params.coefficients");
      if (pot.coefficients.empty()) r.fail("potential.params.coefficients", "needs at least one coefficient");
      break;
    case PotentialKind::piecewise_linear:
      for (const char* key : {"potential.breakpoints", "potential.values"})
        if (!r.has(key)) r.fail(key, "required key is missing");
      pot.breakpoints = r.numbers("potential.breakpoints");
      pot.values = r.numbers("potential.values");
      try {
        (void)PiecewiseLinearPotential(pot.breakpoints, pot.values);
      } catch (const DomainError& e) {
        r.fail("potential.breakpoints", e.what());
      }
      break;
  }

  try {
    (void)pot.build();
  } catch (const DomainError& e) {
    r.fail("potential.kind", e.what());
  }

  auto& ini = s.initial;
  const auto ikind = r.str("initial.kind", "gaussian");
  if (ikind == "gaussian") {
    ini.kind = InitialSpec::Kind::gaussian;
    for (const char* key : {"initial.separation", "initial.sigma"})
      if (r.has(key)) r.fail(key, "does not apply to initial.kind = gaussian");
    ini.x = r.num("initial.x", 0.0);
    ini.p = r.num("initial.p", 0.0);
    ini.sigma_x = r.num("initial.sigma_x", ini.sigma_x);
    ini.sigma_p = r.num("initial.sigma_p", ini.sigma_p);
    if (!(ini.sigma_x > 0.0)) r.fail("initial.sigma_x", "must be > 0");
    if (!(ini.sigma_p > 0.0)) r.fail("initial.sigma_p", "must be > 0");
  } else if (ikind == "cat") {
    ini.kind = InitialSpec::Kind::cat;
    for (const char* key : {"initial.x", "initial.p", "initial.sigma_x", "initial.sigma_p"})
      if (r.has(key)) r.fail(key, "does not apply to initial.kind = cat");
    ini.separation = r.num("initial.separation", ini.separation);
    ini.sigma = r.num("initial.sigma", ini.sigma);
    if (!(ini.separation > 0.0)) r.fail("initial.separation", "must be > 0");
    if (!(ini.sigma > 0.0)) r.fail("initial.sigma", "must be > 0");
  } else {
    r.fail("initial.kind", fmt::format("unknown kind '{}' (gaussian, cat)", ikind));
  }

  s.engine = r.str("engine", "all");
  if (s.engine != "all" && s.engine != "classical" && s.engine != "qq" && s.engine != "vonneumann" &&
      s.engine != "lindblad")
    r.fail("engine", fmt::format("unknown engine '{}' (all, classical, qq, vonneumann, lindblad)", s.engine));

  const double dt = r.num("evolve.dt", 1e-3);
  s.t_end = r.num("evolve.t_end", 1.0);
  if (!(dt > 0.0)) r.fail("evolve.dt", "must be > 0");
  if (!(s.t_end > 0.0)) r.fail("evolve.t_end", "must be > 0");
  const long records = r.integer("evolve.records", 10);
  if (records < 1) r.fail("evolve.records", "must be >= 1");
  s.evolve.n_steps = std::max(1L, std::lround(s.t_end / dt));
  s.evolve.dt = s.t_end / static_cast<double>(s.evolve.n_steps);
  if (s.evolve.n_steps % records != 0)
    r.fail("evolve.records", fmt::format("must divide the step count t_end/dt = {}", s.evolve.n_steps));
  s.evolve.record_every = s.evolve.n_steps / records;
  s.evolve.tail_threshold = r.num("evolve.tail_threshold", 1e-10);
  if (!(s.evolve.tail_threshold > 0.0)) r.fail("evolve.tail_threshold", "must be > 0");
  s.hamiltonian = r.boolean("evolve.hamiltonian", true);
  s.evolve.kinetic = s.hamiltonian;

  auto& noise = s.noise;
  noise.present = std::any_of(entries.begin(), entries.end(), [](const auto& kv) { return kv.first.rfind("noise.", 0) == 0; });
  if (r.has("noise.nu")) {
    const auto& raw = entries.at("noise.nu").raw;
    if (!raw.empty() && raw.front() == '[') {
      noise.nu = r.numbers("noise.nu");
      if (noise.nu.size() != static_cast<std::size_t>(n))
        r.fail("noise.nu", fmt::format("list has {} values, grid has {} points", noise.nu.size(), n));
    } else {
      noise.nu.assign(static_cast<std::size_t>(n), r.num("noise.nu"));
    }
    for (double v : noise.nu)
      if (v < 0.0) r.fail("noise.nu", "must be >= 0");
  } else {
    noise.nu.assign(static_cast<std::size_t>(n), 0.0);
  }
  noise.seed = parse_seed(r, "noise.seed");
  noise.realizations = r.integer("noise.realizations", 1000);
  if (noise.realizations < 2) r.fail("noise.realizations", "must be >= 2 for standard errors");
  try {
    noise.mode = parse_noise_mode(r.str("noise.mode", "quenched"));
  } catch (const ConfigError& e) {
    r.fail("noise.mode", e.what());
  }
  if (r.str("noise.distribution", "gaussian") != "gaussian") r.fail("noise.distribution", "only gaussian is supported");

  if (r.has("probes")) {
    for (const auto& item : r.list("probes")) {
      const auto colon = item.find(':');
      int a = -1, b = -1;
      bool ok = colon != std::string::npos;
      if (ok) {
        const auto sa = trim(item.substr(0, colon)), sb = trim(item.substr(colon + 1));
        ok = std::from_chars(sa.data(), sa.data() + sa.size(), a).ptr == sa.data() + sa.size() &&
             std::from_chars(sb.data(), sb.data() + sb.size(), b).ptr == sb.data() + sb.size() && !sa.empty() &&
             !sb.empty();
      }
      if (!ok) r.fail("probes", fmt::format("expected index pairs 'i:j', got '{}'", item));
      if (a < 0 || b < 0 || a >= n || b >= n)
        r.fail("probes", fmt::format("probe {}:{} outside the grid (0..{})", a, b, n - 1));
      s.probes.emplace_back(a, b);
    }
  }

  s.output_dir = r.str("output.dir", "out");

  auto& vd = s.void_study;
  vd.region.radius = r.num("void.dr", 0.5);
  vd.region.density = r.num("void.rho", 1.0);
  vd.region.duration = r.num("void.duration", 1.0);
  try {
    vd.region.geometry = parse_geometry(r.str("void.geometry", "ball"));
  } catch (const ConfigError& e) {
    r.fail("void.geometry", e.what());
  }
  vd.trials = r.integer("void.trials", 100000);
  vd.seed = parse_seed(r, "void.seed");
  if (!(vd.region.radius > 0.0)) r.fail("void.dr", "must be > 0");
  if (!(vd.region.density > 0.0)) r.fail("void.rho", "must be > 0");
  if (!(vd.region.duration > 0.0)) r.fail("void.duration", "must be > 0");
  if (vd.trials < 100) r.fail("void.trials", "must be >= 100");

  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open scenario file '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.string());
}

}  // namespace qlab
