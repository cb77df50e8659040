#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "coagflux/record.hpp"
#include "coagflux/scenario.hpp"

namespace coagflux {

/// Integrates and writes moments.csv, spectrum_<k>.csv, flux.csv,
/// flux_ledger.csv and config.ini into `out`. Returns 0.
int cmd_run(const ScenarioConfig& config, const std::filesystem::path& out);

/// Runs, writes the trajectory files and verify.json, and returns 1 when any
/// diagnostic record fails.
int cmd_verify(const ScenarioConfig& config, const std::filesystem::path& out,
               std::ostream& log);

struct OracleComparison {
  std::vector<DiagnosticRecord> records;
  double worst_transform = 0.0;  // relative to the eps-source transform
  double final_density = 0.0;    // against the stationary profile
};

/// Constant kernel only (throws std::invalid_argument otherwise). At every
/// sample, the relative distance of the numerical transform from the
/// eps-source closed form on log-spaced lambda in [0.1, 10]; at the last
/// sample, the stationary density distance on [10 eps, 1e-2 x_max] and the
/// transform distance from the flux solution on lambda in [1, 100].
OracleComparison oracle_compare(const ScenarioConfig& config);
/// Writes oracle.json and returns 0; errors surface as exceptions.
int cmd_oracle_compare(const ScenarioConfig& config, const std::filesystem::path& out,
                       std::ostream& log);

/// One swept key ("section.key") and its values.
struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

/// Parses "section.key=v1,v2,...".
SweepAxis parse_sweep_axis(const std::string& text);

/// The cartesian product of the axes, first axis slowest.
std::vector<std::vector<std::pair<std::string, std::string>>> sweep_points(
    const std::vector<SweepAxis>& axes);

/// Runs every point of the product of `axes` applied to the template text in
/// out/point_<index>, `threads` at a time, and writes out/index.csv. Each
/// point runs cmd_verify. Returns 1 when any point failed to load, run or
/// verify.
int cmd_sweep(const std::string& template_text, const std::vector<SweepAxis>& axes,
              const std::filesystem::path& out, unsigned threads, bool strict,
              std::ostream& log);

}  // namespace coagflux
