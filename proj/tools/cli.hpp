#pragma once

// Command-line front end: settings resolution, experiment dispatch and
// CSV / JSON / manifest emission.

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "entforge/experiments.hpp"

namespace entforge::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,
  kExitInvariant = 2,   // failed property check, or unconverged Monte Carlo under --strict
  kExitNoBracket = 3,
};

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr std::string_view kSeedEnvVar = "ENTFORGE_SEED";

/// Flat key -> raw value map. Keys are the long flag names with '-' as '_'.
using Settings = std::map<std::string, std::string>;

/// Every key accepted in a config file or on the command line.
const std::vector<std::string>& known_keys();

/// Reads `key = value` lines. Blank lines and '#' comments are skipped.
/// Throws std::invalid_argument on a malformed line or an unknown key.
Settings read_config_file(const std::filesystem::path& path);
Settings parse_config_text(std::string_view text);

/// Flags override file values; each overridden value that differs produces
/// a warning.
Settings merge_settings(const Settings& file, const Settings& flags, std::vector<std::string>& warnings);

/// "a:b:log:n", "a:b:lin:n" or a comma list.
std::vector<double> parse_epsilon_grid(std::string_view text);
/// Comma list of integers.
std::vector<int> parse_int_list(std::string_view text);

struct Invocation {
  std::string subcommand;
  ExperimentConfig config;
  bool strict = false;
  Settings resolved;  // every setting after defaults, as written to the manifest
  std::vector<std::string> warnings;
};

bool is_subcommand(std::string_view name);

/// Applies defaults for `subcommand`, then the merged settings. The seed
/// falls back to `env_seed` (the ENTFORGE_SEED value) when not set.
/// Throws std::invalid_argument on bad values.
Invocation resolve(std::string_view subcommand, const Settings& merged,
                   std::optional<std::string> env_seed = std::nullopt);

/// 17 significant digits, round-trip exact.
std::string format_number(double value);

std::string sha256_hex(const std::filesystem::path& file);

/// Runs the experiment and writes outputs under config.output_path.
int dispatch(const Invocation& inv, std::ostream& log);

}  // namespace entforge::cli
