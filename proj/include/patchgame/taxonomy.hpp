#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace patchgame {

// Kill-chain stages, in attack-progression order.
enum class CkcStage {
    Reconnaissance = 0,
    Weaponization,
    Delivery,
    Exploitation,
    Installation,
    CommandAndControl,
    ActionsOnObjectives,
};

inline constexpr int kStageCount = 7;

// ATT&CK Enterprise tactics. Each tactic belongs to exactly one stage.
enum class Tactic {
    Reconnaissance = 0,
    ResourceDevelopment,
    InitialAccess,
    Discovery,
    Execution,
    CredentialAccess,
    LateralMovement,
    Persistence,
    PrivilegeEscalation,
    DefenseEvasion,
    CommandAndControl,
    Collection,
    Exfiltration,
    Impact,
};

inline constexpr int kTacticCount = 14;

CkcStage tactic_to_stage(Tactic t);

// Tactics whose stage is k, in enum order.
std::vector<Tactic> tactics_of_stage(CkcStage k);

const std::string& stage_name(CkcStage k);
const std::string& tactic_name(Tactic t);
std::optional<CkcStage> parse_stage(const std::string& name);
std::optional<Tactic> parse_tactic(const std::string& name);

std::array<CkcStage, kStageCount> all_stages();
std::array<Tactic, kTacticCount> all_tactics();

// Registry of the ATT&CK techniques the simulator understands. Kept small:
// a representative subset covering every tactic.
struct Technique {
    std::string id; // "T1190"
    Tactic tactic;
};

// Tactic of a known technique id; nullopt for unknown ids.
std::optional<Tactic> technique_tactic(const std::string& technique_id);

const std::vector<Technique>& known_techniques();

} // namespace patchgame
