#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "abshr/pipeline.hpp"

namespace abshr {

/// Name-addressable view of one PipelineConfig member; shared by the JSON,
/// TOML and command-line front ends so they accept exactly the same keys.
struct ConfigField {
  std::string name;
  std::variant<double PipelineConfig::*, int PipelineConfig::*, std::string PipelineConfig::*>
      member;
  std::string help;
};

const std::vector<ConfigField>& config_fields();

// Parses `text` into the field's type; throws ArgumentError on bad input.
void set_config_field(PipelineConfig& config, const ConfigField& field, const std::string& text);

/// Overlays values from a JSON object or a flat TOML document. Unknown keys
/// throw ArgumentError. The result is validated.
PipelineConfig parse_config(const std::string& text, bool is_toml, PipelineConfig base = {});

/// Format chosen by extension: `.toml` is TOML, anything else JSON.
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});

std::string config_to_json(const PipelineConfig& config);

}  // namespace abshr
