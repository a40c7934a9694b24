#pragma once

#include <string>

#include "patchgame/simulation.hpp"

namespace patchgame {

// Applies a JSON config file over the built-in defaults. Every section is
// optional; present keys override, absent keys keep their defaults.
// Sections: simulation, risk, costs, beliefs, engine, payoff, attacker,
// defender, rl, threat.
void apply_config_file(SimulationConfig& cfg, const std::string& path);
void apply_config_text(SimulationConfig& cfg, const std::string& json_text);

// The full effective configuration as JSON (documents the defaults).
std::string config_to_json(const SimulationConfig& cfg);

} // namespace patchgame
