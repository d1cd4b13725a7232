#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "swipt/trainer.hpp"

namespace swipt {

struct PlotOptions {
    int size_px = 480;
};

struct RunConfig {
    TrainConfig train;
    std::string profile = "desk";
    std::filesystem::path output_dir = "runs";
    PlotOptions plot;
    double lambda = 0.0;  // single-point training (train command)
};

using KeyValues = std::map<std::string, std::string>;

struct ConfigKey {
    std::string name;
    std::string meaning;
};

// Every accepted key, in documentation order.
const std::vector<ConfigKey>& config_schema();

// `key = value` lines; `#` starts a comment. Throws ConfigError naming the
// line for anything else, and on duplicate keys.
KeyValues parse_key_values(std::istream& in);

// Layering: built-in desk defaults for the chosen M, then file values, then
// the paper-scale constants when requested, then explicit overrides.
// Throws ConfigError whose message starts with the offending key.
RunConfig build_config(const KeyValues& file, const KeyValues& overrides = {},
                       bool paper_scale = false);
RunConfig load_config(const std::filesystem::path& path, const KeyValues& overrides = {},
                      bool paper_scale = false);

// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "SWIPT_OUTPUT_ROOT";

}  // namespace swipt
