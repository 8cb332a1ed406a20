#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <cbfed/config.hpp>
#include <cbfed/diagnostics.hpp>

#include "json.hpp"

namespace cbfed::cli {

struct StudyConfig {
  std::size_t hvi_samples = 16;
  double uniqueness_delta = 1e-6;
  Ladders ladders{{}, {0.2, 0.1, 0.05}, {}};
  double energy_tolerance = 1e-5;
  std::vector<double> forcing_sweep;  ///< extra forcing amplitudes for the a-priori check
};

struct LoadedConfig {
  SimConfig sim;
  StudyConfig study;
  std::vector<std::string> warnings;
  nlohmann::json resolved;  ///< canonical form; the run hash is taken over its dump
  std::string hash;
};

/// Parse TOML text. Relative paths resolve against base_dir. Overrides are
/// "dotted.key=value" with value parsed as a TOML value, or taken as a string.
/// Every problem found is reported in one ConfigError.
LoadedConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                          const std::vector<std::string>& overrides = {});

/// Empty path means defaults (plus overrides).
LoadedConfig load_config(const std::filesystem::path& path,
                         const std::vector<std::string>& overrides = {});

/// Canonical JSON of a configuration.
nlohmann::json resolved_json(const SimConfig& sim, const StudyConfig& study);

/// 64-bit FNV-1a of the string, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

/// TOML text that reproduces `cfg`; laws that are not built in are written
/// next to it as law_<i>.json and referenced by file name.
std::string write_config_toml(const LoadedConfig& cfg, const std::filesystem::path& dir);

/// Warnings for a command about to run (e.g. an inadmissible uniqueness regime).
std::vector<std::string> command_warnings(const LoadedConfig& cfg, const std::string& command);

}  // namespace cbfed::cli
