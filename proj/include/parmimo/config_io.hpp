#pragma once

#include <filesystem>

#include <json.hpp>

#include "parmimo/model.hpp"

namespace parmimo {

// Reads the fields of SystemConfig from a JSON object; absent fields keep their
// defaults and unknown fields are rejected with ConfigError. `ignored` lists
// keys that belong to other sections of the same document.
SystemConfig system_config_from_json(const nlohmann::json& doc, std::initializer_list<const char*> ignored = {});
nlohmann::json to_json(const SystemConfig& cfg);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace parmimo
