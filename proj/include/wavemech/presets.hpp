#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wavemech/config.hpp"

namespace wavemech {

struct Preset {
  std::string name;
  std::string description;
  ExperimentConfig config;
};

/// Built-in scenario catalog, one entry per checked claim.
const std::vector<Preset>& presets();
std::optional<ExperimentConfig> find_preset(const std::string& name);

}  // namespace wavemech
