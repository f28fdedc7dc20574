#pragma once

#include <filesystem>
#include <string>

#include "motm/world.hpp"

namespace motm {

// Scenario files are JSON:
//   {"name": str, "start": [x, y, theta_deg], "object": [x, y], "drop": [x, y],
//    "obstacles": [{"type": "disc", "center": [x, y], "radius": r} |
//                  {"type": "rect", "center": [x, y], "size": [w, h]}]}

std::string scenario_to_json(const Scenario& scenario);

/// Throws std::runtime_error with a description of the first schema violation.
Scenario scenario_from_json(const std::string& text);

Scenario load_scenario_file(const std::filesystem::path& path);
void save_scenario_file(const Scenario& scenario, const std::filesystem::path& path);

/// Builtin name or path to a scenario file.
Scenario resolve_scenario(const std::string& name_or_path);

}  // namespace motm
