#pragma once

#include <filesystem>

#include <json.hpp>

#include "nandguard/ftl.hpp"
#include "nandguard/pipeline.hpp"

namespace nandguard {

// Everything a scenario file can set. Device settings only matter when an
// image is created; an existing image keeps its own.
struct ToolConfig {
  Geometry geometry;
  CodecConfig codec;
  FtlConfig ftl;
  PipelineConfig pipeline;
};

// Unknown keys, wrong types and invalid values all throw ConfigError.
ToolConfig parse_config(const nlohmann::json& doc);
ToolConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ToolConfig& config);

}  // namespace nandguard
