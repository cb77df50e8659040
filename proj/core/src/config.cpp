#include "coagflux/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "coagflux/grid.hpp"
#include "coagflux/kernel.hpp"

namespace coagflux {

namespace pt = boost::property_tree;

namespace {

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"kernel", {"kind", "value", "gamma", "lambda", "c1", "c2"}},
      {"grid", {"x_min", "x_max", "bins_per_decade"}},
      {"source", {"epsilon", "mass_rate", "snap_to_pivot"}},
      {"initial", {"kind", "prefactor", "exponent", "lo", "hi", "atoms"}},
      {"control",
       {"method", "safety", "dt_max", "dt_min", "sample_every", "horizon", "truncation",
        "count_floor", "seed"}},
      {"output",
       {"directory", "formats", "probe_stride", "probes", "deltas", "spectrum_stride"}},
  };
  return keys;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::string current;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(current));
      current.clear();
    } else {
      current += c;
    }
  }
  const std::string last = trim(current);
  if (!last.empty() || !out.empty()) out.push_back(last);
  return out;
}

/// Reads typed values out of the tree, collecting errors instead of throwing.
class Reader {
 public:
  Reader(const pt::ptree& tree, std::vector<std::string>& errors)
      : tree_(tree), errors_(errors) {}

  bool has(const std::string& path) const { return tree_.get_optional<std::string>(path).has_value(); }

  std::string text(const std::string& path, std::string fallback) const {
    auto v = tree_.get_optional<std::string>(path);
    return v ? trim(*v) : fallback;
  }

  double number(const std::string& path, double fallback) const {
    auto v = tree_.get_optional<std::string>(path);
    if (!v) return fallback;
    return parse_number(path, trim(*v), fallback);
  }

  long long integer(const std::string& path, long long fallback) const {
    auto v = tree_.get_optional<std::string>(path);
    if (!v) return fallback;
    const std::string s = trim(*v);
    try {
      std::size_t used = 0;
      const long long value = std::stoll(s, &used);
      if (used == s.size()) return value;
    } catch (const std::exception&) {
    }
    errors_.push_back(fmt::format("{}: expected an integer, got '{}'", path, s));
    return fallback;
  }

  bool boolean(const std::string& path, bool fallback) const {
    auto v = tree_.get_optional<std::string>(path);
    if (!v) return fallback;
    const std::string s = trim(*v);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    errors_.push_back(fmt::format("{}: expected true/false, got '{}'", path, s));
    return fallback;
  }

  std::vector<double> numbers(const std::string& path, std::vector<double> fallback) const {
    auto v = tree_.get_optional<std::string>(path);
    if (!v) return fallback;
    std::vector<double> out;
    for (const std::string& item : split(*v, ',')) {
      if (item.empty()) continue;
      out.push_back(parse_number(path, item, 0.0));
    }
    return out;
  }

  double parse_number(const std::string& path, const std::string& s, double fallback) const {
    try {
      std::size_t used = 0;
      const double value = std::stod(s, &used);
      if (used == s.size() && std::isfinite(value)) return value;
    } catch (const std::exception&) {
    }
    errors_.push_back(fmt::format("{}: expected a finite number, got '{}'", path, s));
    return fallback;
  }

 private:
  const pt::ptree& tree_;
  std::vector<std::string>& errors_;
};

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string num_list(const std::vector<double>& values) {
  std::vector<std::string> parts;
  for (double v : values) parts.push_back(num(v));
  return join(parts, ", ");
}

pt::ptree read_tree(std::string_view text, std::vector<std::string>& errors) {
  // The INI reader only knows ';' comments; accept '#' as well.
  std::string cleaned;
  std::istringstream lines{std::string(text)};
  for (std::string line; std::getline(lines, line);) {
    const std::string t = trim(line);
    if (!t.empty() && t.front() == '#') line = ";" + line;
    cleaned += line;
    cleaned += '\n';
  }
  pt::ptree tree;
  std::istringstream in(cleaned);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    errors.push_back(fmt::format("line {}: {}", e.line(), e.message()));
  }
  return tree;
}

void check_unknown(const pt::ptree& tree, std::vector<std::string>& errors) {
  const auto& keys = known_keys();
  for (const auto& [section, body] : tree) {
    const auto it = keys.find(section);
    if (it == keys.end()) {
      if (body.empty()) {
        errors.push_back(fmt::format("top-level key '{}' outside any section", section));
      } else {
        errors.push_back(fmt::format("unknown section [{}]", section));
      }
      continue;
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) {
        errors.push_back(fmt::format("unknown key '{}' in [{}]", key, section));
      }
    }
  }
}

ScenarioConfig from_tree(const pt::ptree& tree, std::vector<std::string>& errors) {
  Reader r(tree, errors);
  ScenarioConfig c;

  const std::string kind = r.text("kernel.kind", "constant");
  if (kind == "constant") {
    c.kernel.kind = KernelSpec::Kind::constant;
    c.kernel.value = r.number("kernel.value", 2.0);
    c.kernel.gamma = r.number("kernel.gamma", 0.0);
    c.kernel.lambda = r.number("kernel.lambda", 0.0);
    c.kernel.c1 = r.number("kernel.c1", 0.5 * c.kernel.value);
    c.kernel.c2 = r.number("kernel.c2", 0.5 * c.kernel.value);
  } else if (kind == "power_pair") {
    c.kernel.kind = KernelSpec::Kind::power_pair;
    c.kernel.value = 0.0;
    if (r.has("kernel.value")) errors.push_back("kernel.value: only used by kind = constant");
    c.kernel.gamma = r.number("kernel.gamma", 0.0);
    c.kernel.lambda = r.number("kernel.lambda", 0.0);
    c.kernel.c1 = r.number("kernel.c1", 1.0);
    c.kernel.c2 = r.number("kernel.c2", c.kernel.c1);
  } else {
    errors.push_back(fmt::format("kernel.kind: expected constant or power_pair, got '{}'", kind));
  }

  c.grid.x_min = r.number("grid.x_min", c.grid.x_min);
  c.grid.x_max = r.number("grid.x_max", c.grid.x_max);
  c.grid.bins_per_decade = static_cast<int>(r.integer("grid.bins_per_decade", c.grid.bins_per_decade));

  c.source.epsilon = r.number("source.epsilon", c.source.epsilon);
  c.source.mass_rate = r.number("source.mass_rate", c.source.mass_rate);
  c.snap_epsilon_to_pivot = r.boolean("source.snap_to_pivot", false);

  const std::string init = r.text("initial.kind", "zero");
  if (init == "zero") {
    c.initial = initial::Zero{};
  } else if (init == "power_law") {
    initial::PowerLaw law;
    law.prefactor = r.number("initial.prefactor", 1.0);
    law.exponent = r.number("initial.exponent", -1.5);
    law.lo = r.number("initial.lo", c.grid.x_min);
    law.hi = r.number("initial.hi", c.grid.x_max);
    c.initial = law;
  } else if (init == "point_masses") {
    initial::PointMasses masses;
    for (const std::string& item : split(r.text("initial.atoms", ""), ',')) {
      if (item.empty()) continue;
      const auto pair = split(item, ':');
      if (pair.size() != 2) {
        errors.push_back(fmt::format("initial.atoms: expected size:number, got '{}'", item));
        continue;
      }
      masses.atoms.emplace_back(r.parse_number("initial.atoms", pair[0], 0.0),
                                r.parse_number("initial.atoms", pair[1], 0.0));
    }
    c.initial = masses;
  } else {
    errors.push_back(fmt::format(
        "initial.kind: expected zero, power_law or point_masses, got '{}'", init));
  }

  const std::string method = r.text("control.method", "rk4");
  if (method == "euler") c.control.method = StepMethod::euler;
  else if (method == "heun") c.control.method = StepMethod::heun;
  else if (method == "rk4") c.control.method = StepMethod::rk4;
  else errors.push_back(fmt::format("control.method: expected euler, heun or rk4, got '{}'", method));
  c.control.safety = r.number("control.safety", c.control.safety);
  c.control.dt_max = r.number("control.dt_max", c.control.dt_max);
  c.control.dt_min = r.number("control.dt_min", c.control.dt_min);
  c.control.sample_every = r.number("control.sample_every", 0.0);
  c.control.count_floor = r.number("control.count_floor", 0.0);
  c.horizon = r.number("control.horizon", c.horizon);
  const std::string trunc = r.text("control.truncation", "truncate_top");
  if (trunc == "truncate_top") c.truncation = TruncationPolicy::truncate_top;
  else if (trunc == "pile_top") c.truncation = TruncationPolicy::pile_top;
  else errors.push_back(fmt::format("control.truncation: expected truncate_top or pile_top, got '{}'", trunc));
  const long long seed = r.integer("control.seed", 1);
  if (seed < 0) errors.push_back("control.seed: must be non-negative");
  c.seed = static_cast<std::uint64_t>(std::max(seed, 0LL));

  c.output_directory = r.text("output.directory", c.output_directory);
  if (r.has("output.formats")) {
    c.formats.clear();
    for (const std::string& f : split(r.text("output.formats", ""), ',')) {
      if (f.empty()) continue;
      if (f != "csv" && f != "json") {
        errors.push_back(fmt::format("output.formats: unknown format '{}'", f));
      }
      c.formats.push_back(f);
    }
  }
  c.probe_stride = static_cast<int>(r.integer("output.probe_stride", c.probe_stride));
  c.probes = r.numbers("output.probes", {});
  c.deltas = r.numbers("output.deltas", c.deltas);
  c.spectrum_stride = static_cast<int>(r.integer("output.spectrum_stride", c.spectrum_stride));
  return c;
}

std::vector<std::string> warnings_for(const ScenarioConfig& c) {
  std::vector<std::string> warnings;
  if (c.control.sample_every > 0.0 && c.horizon > 0.0 &&
      c.control.sample_every > c.horizon / 200.0) {
    warnings.push_back(fmt::format(
        "control.sample_every = {} is coarser than horizon/200 = {}; time-integrated "
        "diagnostics lose accuracy",
        c.control.sample_every, c.horizon / 200.0));
  }
  try {
    const Grid grid = Grid::build_geometric(c.grid.x_min, c.grid.x_max, c.grid.bins_per_decade);
    if (project_initial(grid, c.initial, c.source.epsilon).disjoint_support) {
      warnings.push_back("initial data does not intersect the grid above epsilon; starting from zero");
    }
  } catch (const std::exception&) {
    // Reported by validate().
  }
  return warnings;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error("invalid configuration:\n  " + join(errors, "\n  ")),
      errors_(std::move(errors)) {}

std::vector<std::string> validate(const ScenarioConfig& c) {
  std::vector<std::string> errors;
  try {
    c.kernel.validate();
  } catch (const std::exception& e) {
    errors.push_back(e.what());
  }
  const RegimeClassification regime = classify_exponents(c.kernel.gamma, c.kernel.lambda);
  if (!regime.flux_regime && !regime.source_regime) {
    errors.push_back("kernel exponents outside the admissible regime: " +
                     regime.explain(c.kernel.gamma, c.kernel.lambda));
  } else if (!regime.flux_regime) {
    // Source regime alone is accepted; the flux bounds are not guaranteed.
  }
  std::optional<Grid> grid;
  try {
    grid = Grid::build_geometric(c.grid.x_min, c.grid.x_max, c.grid.bins_per_decade);
  } catch (const std::exception& e) {
    errors.push_back(e.what());
  }
  if (!(c.source.epsilon > 0.0)) {
    errors.push_back("source.epsilon must be positive");
  } else if (grid) {
    const auto loc = grid->locate(c.source.epsilon);
    if (loc.where == Grid::Location::Where::below) {
      errors.push_back(fmt::format(
          "source.epsilon = {} lies below the grid (x_min = {}); lower grid.x_min to at "
          "most epsilon",
          c.source.epsilon, c.grid.x_min));
    } else if (loc.where == Grid::Location::Where::above) {
      errors.push_back(fmt::format(
          "source.epsilon = {} lies above the grid (x_max = {}); extend grid.x_max",
          c.source.epsilon, grid->upper()));
    }
  }
  if (c.source.mass_rate < 0.0) errors.push_back("source.mass_rate must be non-negative");
  if (!(c.horizon >= 0.0)) errors.push_back("control.horizon must be non-negative");
  try {
    c.control.validate();
  } catch (const std::exception& e) {
    errors.push_back(e.what());
  }
  if (c.probe_stride < 0) errors.push_back("output.probe_stride must be non-negative");
  if (c.spectrum_stride < 0) errors.push_back("output.spectrum_stride must be non-negative");
  for (double d : c.deltas) {
    if (!(d > 0.0 && d < 1.0)) {
      errors.push_back(fmt::format("output.deltas: {} is outside (0, 1)", d));
    }
  }
  for (double z : c.probes) {
    if (!(z > 0.0)) errors.push_back(fmt::format("output.probes: {} is not positive", z));
  }
  if (const auto* law = std::get_if<initial::PowerLaw>(&c.initial)) {
    if (!(law->lo > 0.0) || !(law->hi > law->lo)) {
      errors.push_back("initial: power-law support needs 0 < lo < hi");
    }
  }
  if (const auto* masses = std::get_if<initial::PointMasses>(&c.initial)) {
    for (const auto& [size, number] : masses->atoms) {
      if (!(size > 0.0) || number < 0.0) {
        errors.push_back("initial.atoms: sizes must be positive and numbers non-negative");
        break;
      }
    }
  }
  return errors;
}

LoadedConfig parse_config(std::string_view text, bool strict,
                          const ConfigOverrides& overrides) {
  std::vector<std::string> errors;
  pt::ptree tree = read_tree(text, errors);
  for (const auto& [path, value] : overrides) {
    if (std::count(path.begin(), path.end(), '.') != 1) {
      errors.push_back(fmt::format("override '{}': expected section.key", path));
      continue;
    }
    tree.put(path, value);
  }
  check_unknown(tree, errors);
  LoadedConfig loaded;
  loaded.config = from_tree(tree, errors);
  if (errors.empty()) {
    for (std::string& e : validate(loaded.config)) errors.push_back(std::move(e));
  }
  if (errors.empty()) {
    loaded.warnings = warnings_for(loaded.config);
    if (strict) {
      for (const std::string& w : loaded.warnings) errors.push_back("strict: " + w);
    }
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return loaded;
}

LoadedConfig load_config(const std::filesystem::path& path, bool strict,
                         const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read configuration file " + path.string()});
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), strict, overrides);
}

std::string serialize_config(const ScenarioConfig& c) {
  std::ostringstream out;
  out << "[kernel]\n";
  out << "kind = " << to_string(c.kernel.kind) << "\n";
  if (c.kernel.kind == KernelSpec::Kind::constant) out << "value = " << num(c.kernel.value) << "\n";
  out << "gamma = " << num(c.kernel.gamma) << "\n";
  out << "lambda = " << num(c.kernel.lambda) << "\n";
  out << "c1 = " << num(c.kernel.c1) << "\n";
  out << "c2 = " << num(c.kernel.c2) << "\n\n";

  out << "[grid]\n";
  out << "x_min = " << num(c.grid.x_min) << "\n";
  out << "x_max = " << num(c.grid.x_max) << "\n";
  out << "bins_per_decade = " << c.grid.bins_per_decade << "\n\n";

  out << "[source]\n";
  out << "epsilon = " << num(c.source.epsilon) << "\n";
  out << "mass_rate = " << num(c.source.mass_rate) << "\n";
  out << "snap_to_pivot = " << (c.snap_epsilon_to_pivot ? "true" : "false") << "\n\n";

  out << "[initial]\n";
  if (std::holds_alternative<initial::Zero>(c.initial)) {
    out << "kind = zero\n";
  } else if (const auto* law = std::get_if<initial::PowerLaw>(&c.initial)) {
    out << "kind = power_law\n";
    out << "prefactor = " << num(law->prefactor) << "\n";
    out << "exponent = " << num(law->exponent) << "\n";
    out << "lo = " << num(law->lo) << "\n";
    out << "hi = " << num(law->hi) << "\n";
  } else if (const auto* masses = std::get_if<initial::PointMasses>(&c.initial)) {
    out << "kind = point_masses\n";
    std::vector<std::string> atoms;
    for (const auto& [size, number] : masses->atoms) atoms.push_back(num(size) + ":" + num(number));
    out << "atoms = " << join(atoms, ", ") << "\n";
  }
  out << "\n";

  out << "[control]\n";
  out << "method = " << to_string(c.control.method) << "\n";
  out << "safety = " << num(c.control.safety) << "\n";
  out << "dt_max = " << num(c.control.dt_max) << "\n";
  out << "dt_min = " << num(c.control.dt_min) << "\n";
  out << "sample_every = " << num(c.control.sample_every) << "\n";
  out << "count_floor = " << num(c.control.count_floor) << "\n";
  out << "horizon = " << num(c.horizon) << "\n";
  out << "truncation = " << to_string(c.truncation) << "\n";
  out << "seed = " << c.seed << "\n\n";

  out << "[output]\n";
  out << "directory = " << c.output_directory << "\n";
  out << "formats = " << join(c.formats, ", ") << "\n";
  out << "probe_stride = " << c.probe_stride << "\n";
  out << "probes = " << num_list(c.probes) << "\n";
  out << "deltas = " << num_list(c.deltas) << "\n";
  out << "spectrum_stride = " << c.spectrum_stride << "\n";
  return out.str();
}

std::string normalize_config(std::string_view text) {
  return serialize_config(parse_config(text).config);
}

}  // namespace coagflux
