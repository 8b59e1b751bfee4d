#pragma once

// Flat key=value experiment configuration, presets and their text echo.
//
//   # comment
//   mode=simo_n1
//   K=1,2,4,8
//   gamma_thr_db=0.1,0.5,1
//   profiles=1:1,1.4071:0.1414     (conditioning mode)

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oso/mcengine.hpp"

namespace oso {

struct ConfigEntry {
  std::string value;
  std::string context;  // "file.cfg:3", "--Lr", "preset fig3"
};

using ConfigEntries = std::map<std::string, ConfigEntry, std::less<>>;

/// Every key build_config accepts, in echo order.
const std::vector<std::string_view>& config_keys();

/// Parses key=value lines; blank lines and '#' comments are skipped.
/// Throws ConfigError on malformed or duplicate lines.
ConfigEntries read_config_entries(std::istream& in, std::string_view source);
/// Throws IoError if the file cannot be opened.
ConfigEntries read_config_file(const std::filesystem::path& path);

/// Later entries win.
void apply_overrides(ConfigEntries& base, const ConfigEntries& overrides);

/// Rejects unknown keys, reports every missing required key at once, and
/// validates the result. All errors are ConfigError with the entry's context.
ExperimentConfig build_config(const ConfigEntries& entries);

/// File values overridden by flag values.
ExperimentConfig parse_config(const std::optional<std::filesystem::path>& file,
                              const ConfigEntries& flags);

/// Echo that build_config maps back to an identical ExperimentConfig.
ConfigEntries to_entries(const ExperimentConfig& cfg, std::string_view context);
std::string serialize_config(const ExperimentConfig& cfg);

struct NamedConfig {
  std::string name;
  ExperimentConfig config;
};

struct Preset {
  std::string name;
  std::vector<NamedConfig> runs;
};

const std::vector<std::string_view>& preset_names();
/// Throws ConfigError for unknown presets.
Preset make_preset(std::string_view name);

}  // namespace oso
