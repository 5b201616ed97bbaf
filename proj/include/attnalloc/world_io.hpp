#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "attnalloc/attention_data.hpp"

namespace attnalloc {

inline constexpr const char* kWorldVersion = "uoal-sim/1";

nlohmann::json world_to_json(const World& world);
/// Throws ParseError on a wrong version or missing field, ConfigError on invariant violations.
World world_from_json(const nlohmann::json& doc, const std::string& source = "<json>");

void save_world(const World& world, const std::filesystem::path& path);
World load_world(const std::filesystem::path& path);

}  // namespace attnalloc
