#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coagflux/scenario.hpp"

namespace coagflux {

/// Every problem found while loading a configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

struct LoadedConfig {
  ScenarioConfig config;
  std::vector<std::string> warnings;
};

/// "section.key=value" assignments applied on top of the file contents.
using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;

/// Parses the INI-style text ([kernel], [grid], [source], [initial],
/// [control], [output]). Unknown sections or keys are errors. With `strict`,
/// warnings (e.g. a sample cadence coarser than horizon/200) become errors too.
LoadedConfig parse_config(std::string_view text, bool strict = false,
                          const ConfigOverrides& overrides = {});
LoadedConfig load_config(const std::filesystem::path& path, bool strict = false,
                         const ConfigOverrides& overrides = {});

/// Checks the cross-field invariants (regime, epsilon inside the grid, ...).
/// Returns the list of errors; empty when valid.
std::vector<std::string> validate(const ScenarioConfig& config);

/// Canonical text form: every key written, 17 significant digits.
std::string serialize_config(const ScenarioConfig& config);

/// serialize_config(parse_config(text).config).
std::string normalize_config(std::string_view text);

}  // namespace coagflux
