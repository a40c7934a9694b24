#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "patchgame/system_model.hpp"
#include "patchgame/taxonomy.hpp"

namespace patchgame {

// Append-only record of everything that happened in a run.
struct HistoryEntry {
    enum class Kind { ExploitAttempt, MoveAttempt, Scan, Prepare, Patch, Deploy, Reset };
    int step = 0;
    Kind kind = Kind::ExploitAttempt;
    std::string asset_id;
    std::string vuln_id;   // empty when not applicable
    std::string technique; // empty when not applicable
    bool success = false;
};

// Normalized risk features recomputed every step.
struct FeatureVector {
    std::map<std::string, double> vuln_criticality;     // vuln id -> [0,1]
    std::map<std::string, double> asset_criticality;    // asset id -> [0,1]
    std::map<std::string, double> network_centrality;   // asset id -> [0,1]
    std::map<std::string, double> business_value_norm;  // asset id -> [0,1]
    std::vector<uint8_t> recent_patches;                // by sorted vuln order
    std::map<std::string, int> recent_exploit_attempts; // asset id -> count
    double external_threat_level = 0.0;
};

// Ground-truth game state.
struct GameState {
    CkcStage k = CkcStage::Reconnaissance;
    FeatureVector phi;
    std::map<std::string, int> patch; // vuln id -> {0,1}
    std::map<std::string, int> comp;  // asset id -> {0,1,2}
    double det = 0.0;                 // detection confidence in [0,1]
    int step = 0;
    std::vector<HistoryEntry> history;
    std::map<std::string, int> attack_recency; // asset id -> last-attack step
    // Detection probability added at run time by Deploy actions.
    std::map<std::string, double> deployed_detection;

    int patch_state(const std::string& vuln_id) const {
        auto it = patch.find(vuln_id);
        return it == patch.end() ? 0 : it->second;
    }
    int comp_level(const std::string& asset_id) const {
        auto it = comp.find(asset_id);
        return it == comp.end() ? 0 : it->second;
    }
};

// State at step 0: patch flags from the scenario, nothing compromised,
// no detection confidence.
GameState initial_state(const SystemModel& system);

// Detection probability for an asset including run-time deployments
// (noisy-OR of static mechanisms and deployed monitors).
double effective_detection_prob(const SystemModel& system, const GameState& state,
                                const std::string& asset_id);

struct AttackerAction {
    enum class Kind { Exploit, Move, Scan, Prepare, Idle };
    Kind kind = Kind::Idle;
    std::string asset_id;     // Exploit/Scan target, Move destination
    std::string vuln_id;      // Exploit only
    std::string src_asset_id; // Move only
    std::string technique;    // technique id labeling the action
};

struct DefenderAction {
    enum class Kind { Patch, Deploy, Reset };
    Kind kind = Kind::Patch;
    std::string vuln_id;  // Patch
    std::string asset_id; // Patch host asset, Deploy/Reset target
    double detection_prob = 0.0; // Deploy only
};

} // namespace patchgame
