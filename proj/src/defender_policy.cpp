#include "patchgame/defender_policy.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace patchgame {

const std::string& strategy_name(StrategyKind k) {
    static const std::string names[] = {"cvss_only", "cvss_exploit_aware", "business_value",
                                        "cost_aware", "adaptive_threat_intel"};
    return names[static_cast<int>(k)];
}

std::optional<StrategyKind> parse_strategy(const std::string& name) {
    for (StrategyKind k : all_strategies()) {
        if (strategy_name(k) == name) return k;
    }
    return std::nullopt;
}

std::vector<StrategyKind> all_strategies() {
    return {StrategyKind::CvssOnly, StrategyKind::CvssExploitAware, StrategyKind::BusinessValue,
            StrategyKind::CostAware, StrategyKind::AdaptiveThreatIntel};
}

const std::vector<WeightConfig>& default_weight_configs() {
    static const std::vector<WeightConfig> kConfigs = {
        {"balanced", 0.20, 0.20, 0.15, 0.05, 0.20, 0.20},
        {"cost_focused", 0.20, 0.10, 0.10, 0.05, 0.15, 0.40},
        {"threat_focused", 0.15, 0.15, 0.30, 0.20, 0.10, 0.10},
        {"severity_focused", 0.40, 0.25, 0.10, 0.05, 0.10, 0.10},
        {"value_focused", 0.10, 0.05, 0.05, 0.05, 0.55, 0.20},
        {"likelihood_focused", 0.10, 0.40, 0.20, 0.10, 0.10, 0.10},
    };
    return kConfigs;
}

double median_business_value(const SystemModel& system) {
    std::vector<double> values;
    for (const auto& a : system.assets) values.push_back(a.business_value);
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double business_impact_factor(double business_value, double median_bv,
                              const DefenderWeights& w) {
    const double denom = business_value + median_bv;
    if (denom <= 0.0) return 1.0;
    return 1.0 + w.f_bv_scale * business_value / denom;
}

double recency_factor(int steps_since_attack, const DefenderWeights& w) {
    if (steps_since_attack < 0 || steps_since_attack > w.recency_horizon) return 0.0;
    return std::exp(-static_cast<double>(steps_since_attack) / w.recency_tau);
}

double expected_ckc_multiplier(const Asset& a, const StageDist& stage_belief,
                               const DefenderWeights& w) {
    double m = 0.0;
    for (int k = 0; k < kStageCount; ++k) {
        m += stage_belief[k] * w.risk_multiplier[static_cast<int>(a.asset_type)][k];
    }
    return m;
}

std::map<std::string, double> score_assets(const SystemModel& system, const DefenderBelief& b,
                                           const GameState& state, const ThreatScores& scores,
                                           const DefenderWeights& w) {
    const double median_bv = median_business_value(system);
    std::map<std::string, double> out;

    for (const auto& a : system.assets) {
        double max_epss = 0.0;
        for (const auto* v : system.vulnerabilities_on_asset(a.id)) {
            if (state.patch_state(v->id) == 0) max_epss = std::max(max_epss, v->epss);
        }

        double centrality = 0.0;
        auto cit = state.phi.network_centrality.find(a.id);
        if (cit != state.phi.network_centrality.end()) centrality = cit->second;

        double s = w.w_b * a.business_value + w.w_c * centrality + w.w_t * a.criticality;
        s += w.w_t * max_epss;

        auto rec = state.attack_recency.find(a.id);
        if (rec != state.attack_recency.end()) {
            s += w.w_r * recency_factor(state.step - rec->second, w);
        }

        auto cb = b.comp.find(a.id);
        if (cb != b.comp.end() && cb->second[1] + cb->second[2] > w.compromised_mass_threshold) {
            s *= w.compromise_boost;
        }

        s *= 1.0 + w.w_tr * scores.relevance(a.id);
        if (a.business_value != 0.0) s *= business_impact_factor(a.business_value, median_bv, w);
        s *= expected_ckc_multiplier(a, b.stage, w);
        out[a.id] = s;
    }
    return out;
}

std::vector<ScoredVulnerability> score_vulnerabilities(
    const SystemModel& system, const std::map<std::string, double>& asset_scores,
    const GameState& state, const ThreatScores& scores, const DefenderWeights& w,
    const CostParams& costs, const RiskParams& risk, const WeightConfig* weight_config) {
    const double median_bv = median_business_value(system);
    const double max_bv = system.max_business_value();
    std::vector<ScoredVulnerability> out;

    // Reference for normalizing risk-to-cost ratios into [0, 1] with the
    // candidate ordering intact.
    double max_rcr = 0.0;
    if (weight_config != nullptr) {
        for (const auto& a : system.assets) {
            for (const auto* v : system.vulnerabilities_on_asset(a.id)) {
                if (state.patch_state(v->id) != 0) continue;
                const double pc = patch_cost_for(system, *v, a, costs).total;
                max_rcr = std::max(
                    max_rcr, risk_cost_ratio(*v, a, pc, risk, scores.likelihood(v->id)));
            }
        }
    }

    for (const auto& a : system.assets) {
        for (const auto* v : system.vulnerabilities_on_asset(a.id)) {
            if (state.patch_state(v->id) != 0) continue;
            const double pc = patch_cost_for(system, *v, a, costs).total;
            const double likelihood = scores.likelihood(v->id);

            double s;
            if (weight_config == nullptr) {
                s = risk_cost_ratio(*v, a, pc, risk, likelihood);
            } else {
                const double rcr = risk_cost_ratio(*v, a, pc, risk, likelihood);
                s = weight_config->cvss * (v->cvss / 10.0) + weight_config->epss * v->epss +
                    weight_config->exploit_available * (v->exploit_available ? 1.0 : 0.0) +
                    weight_config->ransomware * (v->ransomware_associated ? 1.0 : 0.0) +
                    weight_config->business_value *
                        (max_bv > 0.0 ? a.business_value / max_bv : 0.0) +
                    weight_config->rcr * (max_rcr > 0.0 ? rcr / max_rcr : 0.0);
            }

            auto rec = state.attack_recency.find(a.id);
            if (rec != state.attack_recency.end()) {
                s *= 1.0 + w.w_r * recency_factor(state.step - rec->second, w);
            }
            if (a.business_value != 0.0) {
                s *= business_impact_factor(a.business_value, median_bv, w);
            }
            s *= 1.0 + w.l_adjust_weight * likelihood;
            if (v->attack_complexity == AttackComplexity::High) s *= w.epsilon_complexity_high;

            auto as = asset_scores.find(a.id);
            const double asset_score = as == asset_scores.end() ? 1.0 : as->second;
            out.push_back({v->id, a.id, asset_score * s, pc});
        }
    }

    std::sort(out.begin(), out.end(), [](const ScoredVulnerability& x,
                                         const ScoredVulnerability& y) {
        if (x.score != y.score) return x.score > y.score;
        if (x.vuln_id != y.vuln_id) return x.vuln_id < y.vuln_id;
        return x.asset_id < y.asset_id;
    });
    return out;
}

PatchPlan plan_patches(const std::vector<ScoredVulnerability>& scored, const DefenderBelief& b,
                       double budget_remaining, int n, const DefenderWeights& w) {
    PatchPlan plan;
    if (budget_remaining <= 0.0 || n <= 0) return plan;

    double urgency = 0.0;
    for (int k = static_cast<int>(CkcStage::Exploitation); k < kStageCount; ++k) {
        urgency += b.stage[k];
    }
    plan.step_budget =
        std::min(budget_remaining, budget_remaining * w.adapt_base_fraction * (1.0 + urgency));

    std::set<std::string> planned;
    for (const auto& item : scored) {
        if (static_cast<int>(plan.items.size()) >= n) break;
        if (planned.count(item.vuln_id) > 0) continue;
        if (plan.total_cost + item.patch_cost > plan.step_budget) continue;
        plan.items.push_back(item);
        plan.total_cost += item.patch_cost;
        planned.insert(item.vuln_id);
    }
    return plan;
}

double baseline_strategy_score(const Vulnerability& v, const Asset& a, StrategyKind kind,
                               const SystemModel& system, const CostParams& costs,
                               const RiskParams& risk, const DefenderWeights& w) {
    switch (kind) {
        case StrategyKind::CvssOnly: return v.cvss;
        case StrategyKind::CvssExploitAware: return v.cvss * (1.0 + w.epss_weight * v.epss);
        case StrategyKind::BusinessValue: {
            const double max_bv = system.max_business_value();
            const double bv_norm = max_bv > 0.0 ? a.business_value / max_bv : 0.0;
            return v.cvss * (0.1 + bv_norm);
        }
        case StrategyKind::CostAware: {
            const double pc = patch_cost_for(system, v, a, costs).total;
            return risk_cost_ratio(v, a, pc, risk);
        }
        case StrategyKind::AdaptiveThreatIntel:
            throw std::invalid_argument(
                "baseline_strategy_score: adaptive strategy is scored via "
                "score_vulnerabilities");
    }
    return 0.0;
}

std::vector<ScoredVulnerability> score_baseline(const SystemModel& system,
                                                const GameState& state, StrategyKind kind,
                                                const CostParams& costs, const RiskParams& risk,
                                                const DefenderWeights& w) {
    std::vector<ScoredVulnerability> out;
    for (const auto& a : system.assets) {
        for (const auto* v : system.vulnerabilities_on_asset(a.id)) {
            if (state.patch_state(v->id) != 0) continue;
            const double pc = patch_cost_for(system, *v, a, costs).total;
            out.push_back({v->id, a.id, baseline_strategy_score(*v, a, kind, system, costs,
                                                                risk, w),
                           pc});
        }
    }
    std::sort(out.begin(), out.end(), [](const ScoredVulnerability& x,
                                         const ScoredVulnerability& y) {
        if (x.score != y.score) return x.score > y.score;
        if (x.vuln_id != y.vuln_id) return x.vuln_id < y.vuln_id;
        return x.asset_id < y.asset_id;
    });
    return out;
}

} // namespace patchgame
