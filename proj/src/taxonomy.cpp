#include "patchgame/taxonomy.hpp"

#include <unordered_map>

namespace patchgame {

CkcStage tactic_to_stage(Tactic t) {
    switch (t) {
        case Tactic::Reconnaissance: return CkcStage::Reconnaissance;
        case Tactic::ResourceDevelopment: return CkcStage::Weaponization;
        case Tactic::InitialAccess: return CkcStage::Delivery;
        case Tactic::Discovery: return CkcStage::Delivery;
        case Tactic::Execution: return CkcStage::Exploitation;
        case Tactic::CredentialAccess: return CkcStage::Exploitation;
        case Tactic::LateralMovement: return CkcStage::Exploitation;
        case Tactic::Persistence: return CkcStage::Installation;
        case Tactic::PrivilegeEscalation: return CkcStage::Installation;
        case Tactic::DefenseEvasion: return CkcStage::Installation;
        case Tactic::CommandAndControl: return CkcStage::CommandAndControl;
        case Tactic::Collection: return CkcStage::ActionsOnObjectives;
        case Tactic::Exfiltration: return CkcStage::ActionsOnObjectives;
        case Tactic::Impact: return CkcStage::ActionsOnObjectives;
    }
    return CkcStage::Reconnaissance; // unreachable
}

std::vector<Tactic> tactics_of_stage(CkcStage k) {
    std::vector<Tactic> out;
    for (Tactic t : all_tactics()) {
        if (tactic_to_stage(t) == k) out.push_back(t);
    }
    return out;
}

namespace {

const std::array<std::string, kStageCount> kStageNames = {
    "Reconnaissance",      "Weaponization", "Delivery",
    "Exploitation",        "Installation",  "CommandAndControl",
    "ActionsOnObjectives",
};

const std::array<std::string, kTacticCount> kTacticNames = {
    "Reconnaissance",   "ResourceDevelopment", "InitialAccess",
    "Discovery",        "Execution",           "CredentialAccess",
    "LateralMovement",  "Persistence",         "PrivilegeEscalation",
    "DefenseEvasion",   "CommandAndControl",   "Collection",
    "Exfiltration",     "Impact",
};

} // namespace

const std::string& stage_name(CkcStage k) { return kStageNames[static_cast<int>(k)]; }
const std::string& tactic_name(Tactic t) { return kTacticNames[static_cast<int>(t)]; }

std::optional<CkcStage> parse_stage(const std::string& name) {
    for (int i = 0; i < kStageCount; ++i) {
        if (kStageNames[i] == name) return static_cast<CkcStage>(i);
    }
    return std::nullopt;
}

std::optional<Tactic> parse_tactic(const std::string& name) {
    for (int i = 0; i < kTacticCount; ++i) {
        if (kTacticNames[i] == name) return static_cast<Tactic>(i);
    }
    return std::nullopt;
}

std::array<CkcStage, kStageCount> all_stages() {
    std::array<CkcStage, kStageCount> out{};
    for (int i = 0; i < kStageCount; ++i) out[i] = static_cast<CkcStage>(i);
    return out;
}

std::array<Tactic, kTacticCount> all_tactics() {
    std::array<Tactic, kTacticCount> out{};
    for (int i = 0; i < kTacticCount; ++i) out[i] = static_cast<Tactic>(i);
    return out;
}

const std::vector<Technique>& known_techniques() {
    static const std::vector<Technique> kTechniques = {
        {"T1595", Tactic::Reconnaissance},      // active scanning
        {"T1592", Tactic::Reconnaissance},      // gather host information
        {"T1583", Tactic::ResourceDevelopment}, // acquire infrastructure
        {"T1587", Tactic::ResourceDevelopment}, // develop capabilities
        {"T1190", Tactic::InitialAccess},       // exploit public-facing app
        {"T1189", Tactic::InitialAccess},       // drive-by compromise
        {"T1566", Tactic::InitialAccess},       // phishing
        {"T1046", Tactic::Discovery},           // network service discovery
        {"T1018", Tactic::Discovery},           // remote system discovery
        {"T1203", Tactic::Execution},           // exploitation for client execution
        {"T1059", Tactic::Execution},           // command and scripting interpreter
        {"T1555", Tactic::CredentialAccess},    // credentials from password stores
        {"T1552", Tactic::CredentialAccess},    // unsecured credentials
        {"T1110", Tactic::CredentialAccess},    // brute force
        {"T1021", Tactic::LateralMovement},     // remote services
        {"T1210", Tactic::LateralMovement},     // exploitation of remote services
        {"T1547", Tactic::Persistence},         // boot or logon autostart
        {"T1053", Tactic::Persistence},         // scheduled task/job
        {"T1068", Tactic::PrivilegeEscalation}, // exploitation for privilege escalation
        {"T1548", Tactic::PrivilegeEscalation}, // abuse elevation control
        {"T1562", Tactic::DefenseEvasion},      // impair defenses
        {"T1070", Tactic::DefenseEvasion},      // indicator removal
        {"T1071", Tactic::CommandAndControl},   // application layer protocol
        {"T1573", Tactic::CommandAndControl},   // encrypted channel
        {"T1105", Tactic::CommandAndControl},   // ingress tool transfer
        {"T1005", Tactic::Collection},          // data from local system
        {"T1560", Tactic::Collection},          // archive collected data
        {"T1041", Tactic::Exfiltration},        // exfiltration over C2 channel
        {"T1048", Tactic::Exfiltration},        // exfiltration over alternative protocol
        {"T1485", Tactic::Impact},              // data destruction
        {"T1489", Tactic::Impact},              // service stop
    };
    return kTechniques;
}

std::optional<Tactic> technique_tactic(const std::string& technique_id) {
    static const std::unordered_map<std::string, Tactic> kIndex = [] {
        std::unordered_map<std::string, Tactic> m;
        for (const auto& t : known_techniques()) m.emplace(t.id, t.tactic);
        return m;
    }();
    auto it = kIndex.find(technique_id);
    if (it == kIndex.end()) return std::nullopt;
    return it->second;
}

} // namespace patchgame
