#include "patchgame/cost_model.hpp"

#include <algorithm>

namespace patchgame {

bool requires_reboot(const Vulnerability& v) {
    for (const auto& cwe : v.cwe_ids) {
        if (cwe == "CWE-787" || cwe == "CWE-416") return true;
    }
    return false;
}

int dependency_count(const SystemModel& system, const Vulnerability& v, const Asset& a) {
    int deps = 0;
    for (const auto& [src, dst] : system.asset_edges) {
        if (src == a.id || dst == a.id) ++deps;
    }
    for (const auto& [src, dst] : system.component_edges) {
        if (src == v.component_id || dst == v.component_id) ++deps;
    }
    return deps;
}

double detection_risk_factor(const Asset& a, const CostParams& p) {
    if (a.criticality < 0.3) return p.detection_risk_scale[0];
    if (a.criticality < 0.7) return p.detection_risk_scale[1];
    return p.detection_risk_scale[2];
}

PatchCostBreakdown patch_cost(const Vulnerability& v, const Asset& a, int deps, bool reboot,
                              const CostParams& p) {
    const int ac = static_cast<int>(v.attack_complexity);
    PatchCostBreakdown out;

    out.labor = p.patch_hours[ac] * p.defender_rate * p.ac_weight[ac];

    double downtime_hours = p.downtime_base_hours;
    if (reboot) downtime_hours *= p.downtime_reboot_multiplier;
    out.downtime = a.business_value * p.downtime_norm * downtime_hours *
                   p.asset_type_factor[static_cast<int>(a.asset_type)];

    out.size = p.patch_size_factor * out.labor;
    out.dependency = static_cast<double>(deps) * p.dependency_unit_fraction * a.business_value;
    out.reboot = reboot ? p.reboot_unit_fraction * a.business_value : 0.0;
    out.total = out.labor + out.downtime + out.size + out.dependency + out.reboot;
    return out;
}

AttackCostBreakdown attack_cost(const Vulnerability& v, const Asset& a, Tactic t,
                                const CostParams& p) {
    const int ac = static_cast<int>(v.attack_complexity);
    const int pr = static_cast<int>(v.privileges_required);
    const double maturity = p.maturity_score[static_cast<int>(v.exploit_maturity)];

    double avail;
    if (p.availability_cost_mode == AvailabilityCostMode::Inverse) {
        avail = p.availability_cost_scale * (1.0 - maturity) * (1.0 - v.epss);
    } else {
        avail = p.availability_cost_scale * maturity * v.epss;
    }

    AttackCostBreakdown out;
    out.exploit = p.exploit_hours[ac] * p.attacker_rate * p.vuln_weight[ac][pr] + avail;
    out.detect = detection_risk_factor(a, p) * out.exploit;
    out.tactic = p.tactic_factor[static_cast<int>(tactic_to_stage(t))] * out.exploit;
    out.total = out.exploit + out.detect + out.tactic;
    return out;
}

PatchCostBreakdown patch_cost_for(const SystemModel& system, const Vulnerability& v,
                                  const Asset& a, const CostParams& p) {
    return patch_cost(v, a, dependency_count(system, v, a), requires_reboot(v), p);
}

} // namespace patchgame
