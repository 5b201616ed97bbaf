#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "attnalloc/predict.hpp"

namespace attnalloc {

inline constexpr const char* kModelVersion = "attn-mf/1";

nlohmann::json model_to_json(const FactorModel& model);
FactorModel model_from_json(const nlohmann::json& doc, const std::string& source = "<json>");

void save_model(const FactorModel& model, const std::filesystem::path& path);
FactorModel load_model(const std::filesystem::path& path);

}  // namespace attnalloc
