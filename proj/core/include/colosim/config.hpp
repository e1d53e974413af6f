#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "colosim/experiment.hpp"

namespace colosim {

// Sections: top-level run fields, "cluster", "workload", "attack",
// "scheduler" and an optional "migration". Missing fields keep defaults;
// unknown fields are a ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);

// Throws ConfigError on unreadable or malformed files.
nlohmann::json read_config_file(const std::filesystem::path& path);

}  // namespace colosim
