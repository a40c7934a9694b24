#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "patchgame/beliefs.hpp"
#include "patchgame/cost_model.hpp"
#include "patchgame/game_state.hpp"
#include "patchgame/system_model.hpp"
#include "patchgame/threat_intel.hpp"
#include "patchgame/weight_config.hpp"

namespace patchgame {

enum class StrategyKind {
    CvssOnly,
    CvssExploitAware,
    BusinessValue,
    CostAware,
    AdaptiveThreatIntel,
};

const std::string& strategy_name(StrategyKind k);
std::optional<StrategyKind> parse_strategy(const std::string& name);
std::vector<StrategyKind> all_strategies();

struct DefenderWeights {
    double w_t = 1.0;    // threat
    double w_r = 0.5;    // attack recency
    double w_b = 2e-5;   // business value (applied to raw money)
    double w_c = 0.5;    // centrality
    double w_tr = 0.5;   // threat relevance
    double compromise_boost = 1.5; // fixed multiplier for believed-compromised assets

    // Risk multiplier by asset type {it, dmz, ot} and kill-chain stage.
    double risk_multiplier[3][kStageCount] = {
        {1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0},
        {1.0, 1.0, 1.5, 1.5, 1.0, 1.0, 1.0},
        {1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0},
    };

    double f_bv_scale = 0.5;  // f_bv(BV) = 1 + scale * BV / (BV + median BV)
    double recency_tau = 5.0; // Recency(dt) = exp(-dt / tau)
    int recency_horizon = 10; // zero beyond this many steps
    double epsilon_complexity_high = 0.9; // scoring factor for high-complexity exploits
    double l_adjust_weight = 0.2;         // s_v *= 1 + weight * L(v)
    double epss_weight = 1.0;             // CvssExploitAware boost
    double adapt_base_fraction = 0.25;    // per-step budget fraction
    double compromised_mass_threshold = 0.5;
};

double business_impact_factor(double business_value, double median_business_value,
                              const DefenderWeights& w);
double recency_factor(int steps_since_attack, const DefenderWeights& w);
double median_business_value(const SystemModel& system);

// Expected-stage risk multiplier under the stage belief.
double expected_ckc_multiplier(const Asset& a, const StageDist& stage_belief,
                               const DefenderWeights& w);

std::map<std::string, double> score_assets(const SystemModel& system, const DefenderBelief& b,
                                           const GameState& state, const ThreatScores& scores,
                                           const DefenderWeights& w);

struct ScoredVulnerability {
    std::string vuln_id;
    std::string asset_id;
    double score = 0.0;      // combined (asset score x vulnerability score)
    double patch_cost = 0.0;
};

// Risk-ranked unpatched (vulnerability, asset) pairs, descending score,
// ties broken by vulnerability then asset id. An optional weight
// configuration replaces the risk-to-cost base with the adaptive blend.
std::vector<ScoredVulnerability> score_vulnerabilities(
    const SystemModel& system, const std::map<std::string, double>& asset_scores,
    const GameState& state, const ThreatScores& scores, const DefenderWeights& w,
    const CostParams& costs, const RiskParams& risk,
    const WeightConfig* weight_config = nullptr);

struct PatchPlan {
    std::vector<ScoredVulnerability> items;
    double total_cost = 0.0;
    double step_budget = 0.0; // B_step the plan was built against
};

// Greedy selection of the highest-scored vulnerabilities whose cumulative
// cost fits the adapted per-step budget, at most n items.
PatchPlan plan_patches(const std::vector<ScoredVulnerability>& scored, const DefenderBelief& b,
                       double budget_remaining, int n, const DefenderWeights& w);

// Scores for the four static strategies. Throws std::invalid_argument for
// the adaptive kind, which is driven through score_vulnerabilities.
double baseline_strategy_score(const Vulnerability& v, const Asset& a, StrategyKind kind,
                               const SystemModel& system, const CostParams& costs,
                               const RiskParams& risk, const DefenderWeights& w);

// Full ranked list for a static strategy (unpatched pairs only).
std::vector<ScoredVulnerability> score_baseline(const SystemModel& system,
                                                const GameState& state, StrategyKind kind,
                                                const CostParams& costs, const RiskParams& risk,
                                                const DefenderWeights& w);

} // namespace patchgame
