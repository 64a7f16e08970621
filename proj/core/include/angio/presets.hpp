#pragma once

#include "angio/parameters.hpp"

#include <string>
#include <utility>
#include <vector>

namespace angio {

/// Named parameter overrides; values are given in the written unit of each key.
struct ScenarioPreset {
  std::string name;
  std::string description;
  std::vector<std::pair<std::string, double>> overrides;
};

const std::vector<ScenarioPreset>& presets();

/// Throws InputError listing the known names when `name` is unknown.
const ScenarioPreset& preset(const std::string& name);

/// Sets one parameter from a value in its written unit. Throws InputError for
/// unknown keys.
void apply_override(ParameterSet& params, const std::string& key, double written);

void apply_preset(ParameterSet& params, const ScenarioPreset& p);

}  // namespace angio
