#pragma once

#include <array>

#include "patchgame/system_model.hpp"
#include "patchgame/taxonomy.hpp"

namespace patchgame {

enum class AvailabilityCostMode {
    // Mature public exploits make exploitation cheaper.
    Inverse,
    // Cost grows with maturity and EPSS.
    Literal,
};

struct CostParams {
    double defender_rate = 100.0; // money/hour
    double attacker_rate = 80.0;  // money/hour

    // Hours by CVSS attack complexity {low, high}.
    double patch_hours[2] = {2.0, 6.0};
    double exploit_hours[2] = {4.0, 12.0};

    // Labor weight by attack complexity {low, high}.
    double ac_weight[2] = {1.0, 1.5};

    double downtime_norm = 1.0 / 2000.0; // 1/hours
    double downtime_base_hours = 1.0;
    double downtime_reboot_multiplier = 4.0;

    // Asset-type factor, indexed by AssetType {it, dmz, ot}.
    double asset_type_factor[3] = {1.0, 1.2, 2.0};

    double patch_size_factor = 0.1;          // phi(v)
    double dependency_unit_fraction = 0.002; // c_d as a fraction of BV
    double reboot_unit_fraction = 0.005;     // c_r as a fraction of BV

    // Weight by (attack complexity, privileges required).
    double vuln_weight[2][3] = {{1.0, 1.2, 1.4}, {1.5, 1.7, 2.0}};

    double availability_cost_scale = 400.0;
    AvailabilityCostMode availability_cost_mode = AvailabilityCostMode::Inverse;

    // Detection-risk factor by criticality band: < 0.3, < 0.7, else.
    double detection_risk_scale[3] = {0.1, 0.2, 0.35};

    // Tactic-specific overhead per kill-chain stage.
    std::array<double, kStageCount> tactic_factor = {0.05, 0.1, 0.15, 0.25,
                                                     0.2,  0.3, 0.3};

    // Exploit-maturity score used by the availability cost {none, poc,
    // functional, weaponized}.
    double maturity_score[4] = {0.0, 0.3, 0.6, 1.0};
};

struct PatchCostBreakdown {
    double labor = 0.0;
    double downtime = 0.0;
    double size = 0.0;
    double dependency = 0.0;
    double reboot = 0.0;
    double total = 0.0;
};

struct AttackCostBreakdown {
    double exploit = 0.0;
    double detect = 0.0;
    double tactic = 0.0;
    double total = 0.0;
};

// True when the vulnerability implies a reboot (CWE-787 / CWE-416).
bool requires_reboot(const Vulnerability& v);

// Number of dependent assets/components affected by patching v on a:
// degree of a in the asset graph plus degree of v's component in the
// component graph.
int dependency_count(const SystemModel& system, const Vulnerability& v, const Asset& a);

double detection_risk_factor(const Asset& a, const CostParams& p);

PatchCostBreakdown patch_cost(const Vulnerability& v, const Asset& a, int deps, bool reboot,
                              const CostParams& p);

AttackCostBreakdown attack_cost(const Vulnerability& v, const Asset& a, Tactic t,
                                const CostParams& p);

// Convenience: patch cost with deps/reboot derived from the system model.
PatchCostBreakdown patch_cost_for(const SystemModel& system, const Vulnerability& v,
                                  const Asset& a, const CostParams& p);

} // namespace patchgame
