#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "patchgame/attack_graph.hpp"
#include "patchgame/cost_model.hpp"
#include "patchgame/game_state.hpp"
#include "patchgame/rng.hpp"
#include "patchgame/system_model.hpp"
#include "patchgame/threat_intel.hpp"

namespace patchgame {

struct PayoffParams {
    double c_det = 50.0; // detection penalty scale
    double psi = 1.0;    // defender cost weight
    double gamma = 0.95; // discount, expected in (0.9, 0.99)
};

struct EngineParams {
    double det_decay = 0.05;          // proportional decay of s_det per step
    int recency_window = 5;           // steps counted as "recent" in phi
    double reset_cost_fraction = 0.05; // Reset(a) costs this fraction of BV
    double scan_cost = 50.0;
    double prepare_cost = 100.0;
    double move_cost = 150.0;
    double deploy_cost = 300.0;
    double deploy_detection_prob = 0.2; // detection added by Deploy
};

// State-independent feature ingredients, computed once per system:
// betweenness centrality and shortest-path exposure counts.
struct FeatureBasis {
    std::map<std::string, double> centrality;          // normalized by max
    std::map<std::string, double> asset_path_exposure; // normalized by max
    std::map<std::string, double> vuln_path_frequency; // normalized by max
    double max_business_value = 0.0;
};

FeatureBasis compute_feature_basis(const SystemModel& system);

// Raw betweenness centrality of assets over the union of asset edges and
// host-edge-induced asset pairs (undirected, unweighted).
std::map<std::string, double> betweenness_centrality(const SystemModel& system);

FeatureVector compute_feature_vector(const SystemModel& system, const GameState& state,
                                     const ThreatScores& scores, int window,
                                     const FeatureBasis& basis);

struct AttemptEvent {
    int step = 0;
    AttackerAction action;
    Tactic tactic = Tactic::Execution;
    bool success = false;
    int achieved_level = 0;           // compromise level after the attempt
    double success_probability = 0.0; // probability the sample was drawn against
};

struct TransitionResult {
    GameState state;
    std::optional<AttemptEvent> attempt; // the attacker attempt, if any
    double defender_spend = 0.0;
    double attacker_spend = 0.0;
};

// Recomputes threat scores for a (possibly updated) patch state.
using ScoreProvider = std::function<ThreatScores(const GameState&)>;

// One step of the ground-truth dynamics, in fixed order: defender patch
// effects, attacker compromise outcome (sampled against the attack-graph
// edge probability), detection confidence, kill-chain stage, then the
// feature vector from freshly provided threat scores. Throws
// std::invalid_argument for illegal actions (unknown vulnerability,
// missing graph node or edge).
TransitionResult transition(const GameState& state, const AttackerAction& attacker_action,
                            const std::vector<DefenderAction>& defender_actions,
                            const SystemModel& system, AttackGraph& graph,
                            const ThreatScores& scores, const CtiCorpus& corpus,
                            const EngineParams& params, const CostParams& costs,
                            const FeatureBasis& basis, const ScoreProvider& fresh_scores,
                            Rng& rng);

// Reward from compromised assets minus the cost of the action taken this
// step minus the detection penalty.
double attacker_payoff(const GameState& state, const AttackerAction& action,
                       const SystemModel& system, const CostParams& costs,
                       const PayoffParams& pp, const EngineParams& ep);

// Penalty for compromised assets minus weighted defense costs.
double defender_payoff(const GameState& state, const std::vector<DefenderAction>& actions,
                       const SystemModel& system, const CostParams& costs,
                       const PayoffParams& pp, const EngineParams& ep);

enum class Verdict { Continue, BudgetExhausted, AllPatched, Horizon, BreakEven };

const std::string& verdict_name(Verdict v);

struct Budgets {
    double defender = 7500.0;
    double attacker = 15000.0;
};

// First triggered condition, checked in order: defender budget depleted
// (only meaningful for a positive budget), every vulnerability patched,
// horizon elapsed, defender spend above the residual uncompromised value.
Verdict check_termination(const GameState& state, double defender_spent, double attacker_spent,
                          const Budgets& budgets, int horizon, const SystemModel& system);

} // namespace patchgame
