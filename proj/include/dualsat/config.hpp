#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dualsat/montecarlo.hpp"

namespace dualsat {

/// Flat `key = value` configuration, one entry per line, `#` starts a
/// comment. Keys are namespaced (`experiment.trials`, `linkbudget.noise_dbw`,
/// ...). Lists are comma separated. Unknown or repeated keys and malformed
/// values throw ConfigError naming the key; missing keys keep their defaults.
ExperimentConfig parse_config(std::string_view text);

/// Reads and parses a config file. An unreadable file throws ConfigError with
/// an empty key.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every key with its resolved value, in the canonical order. Parsing the
/// output gives back an equal configuration.
std::string format_config(const ExperimentConfig& config);

/// All recognised keys in canonical order.
std::vector<std::string> config_keys();

/// Shortest decimal that round-trips, independent of the locale.
std::string format_number(double x);

}  // namespace dualsat
