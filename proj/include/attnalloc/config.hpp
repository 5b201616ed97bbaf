#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "attnalloc/experiment.hpp"

namespace attnalloc {

/// Reads an INI-style document with [experiment], [world], [fit], [link] and [channel]
/// sections. Keys not given keep their defaults; unknown sections or keys are rejected.
ExperimentConfig read_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Writes every key with its current value; read_config of the output reproduces `config`.
void write_config(std::ostream& out, const ExperimentConfig& config);

nlohmann::json config_to_json(const ExperimentConfig& config);

}  // namespace attnalloc
