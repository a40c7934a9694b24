#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace patchgame {

enum class AssetType { It, Dmz, Ot };

enum class ExploitMaturity { None, Poc, Functional, Weaponized };

enum class AttackComplexity { Low, High };

enum class PrivilegesRequired { None, Low, High };

struct Host {
    std::string id;
    std::string segment; // informational (lan/dmz/ot), not validated
};

struct Component {
    std::string id;
};

struct Vulnerability {
    std::string id; // CVE string
    std::string component_id;
    double cvss = 0.0;  // [0, 10]
    double epss = 0.0;  // [0, 1]
    bool exploit_available = false;
    bool ransomware_associated = false;
    std::vector<std::string> cwe_ids;
    bool patched = false;
    ExploitMaturity exploit_maturity = ExploitMaturity::None;
    AttackComplexity attack_complexity = AttackComplexity::Low;
    PrivilegesRequired privileges_required = PrivilegesRequired::None;
};

struct Asset {
    std::string id;
    std::string host_id;
    double business_value = 0.0; // money, >= 0
    double criticality = 0.0;    // [0, 1]
    AssetType asset_type = AssetType::It;
    std::vector<std::string> component_ids;
};

struct DetectionMechanism {
    std::string target_id;      // asset id
    double detection_prob = 0.0; // [0, 1]
};

struct EntryPoint {
    std::string id;
    std::vector<std::string> targets; // asset ids directly reachable from outside
};

using Edge = std::pair<std::string, std::string>;

// Static description of the defended environment. Immutable after load;
// shared read-only across simulation runs.
struct SystemModel {
    std::string name;
    std::vector<Host> hosts;                 // sorted by id
    std::vector<Asset> assets;               // sorted by id
    std::vector<Component> components;       // sorted by id
    std::vector<Vulnerability> vulnerabilities; // sorted by id
    std::vector<Edge> host_edges;            // sorted
    std::vector<Edge> asset_edges;           // sorted, directed
    std::vector<Edge> component_edges;       // sorted
    std::vector<EntryPoint> entry_points;    // sorted by id
    std::vector<DetectionMechanism> detection_mechanisms; // sorted by target

    const Asset* find_asset(const std::string& id) const;
    const Vulnerability* find_vulnerability(const std::string& id) const;
    const Host* find_host(const std::string& id) const;

    // Assets that contain the given component.
    std::vector<const Asset*> assets_of_component(const std::string& component_id) const;

    // Vulnerability instances on an asset, ordered by vulnerability id.
    std::vector<const Vulnerability*> vulnerabilities_on_asset(const std::string& asset_id) const;

    // Combined detection probability for an asset (noisy-OR over mechanisms).
    double detection_prob(const std::string& asset_id) const;

    double total_business_value() const;
    double max_business_value() const;
};

struct RiskParams {
    double i_max = 0.9; // cap on the impact fraction, must be in (0, 1)
};

// Scenario file I/O. Throws std::runtime_error on parse or validation
// failures; the message names the first violated invariant.
SystemModel load_scenario(const std::string& path);
SystemModel parse_scenario_text(const std::string& json_text);
std::string serialize_scenario(const SystemModel& system);

void validate(const SystemModel& system); // throws on first violation

// min(cvss/10, i_max), in [0, i_max].
double impact_fraction(const Vulnerability& v, const RiskParams& p);

// BV(a) * I(v) * L(v). L defaults to the vulnerability's EPSS score and may
// be overridden with a provider-computed likelihood.
double financial_risk(const Vulnerability& v, const Asset& a, const RiskParams& p,
                      std::optional<double> likelihood_override = std::nullopt);

// financial_risk / patch_cost. Throws std::invalid_argument for
// patch_cost <= 0.
double risk_cost_ratio(const Vulnerability& v, const Asset& a, double patch_cost,
                       const RiskParams& p,
                       std::optional<double> likelihood_override = std::nullopt);

const std::string& asset_type_name(AssetType t);
const std::string& exploit_maturity_name(ExploitMaturity m);

} // namespace patchgame
