#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "patchgame/attack_graph.hpp"
#include "patchgame/beliefs.hpp"
#include "patchgame/cost_model.hpp"
#include "patchgame/engine.hpp"
#include "patchgame/rng.hpp"

namespace patchgame {

struct ExploitabilityParams {
    double theta_patch = 0.8; // patch-belief threshold
    int theta_f = 3;          // consecutive-failure threshold
    double epsilon = 0.05;    // residual score under either guard
    double eta_slope = 0.2;   // frustration penalty min(slope * f, cap)
    double eta_cap = 0.8;
    double k_logistic = 1.0;
    double tau_bv_fraction = 0.7; // high-value threshold as fraction of max BV
    double explore_rate = 0.1;
    int cooldown_after = 2; // consecutive tactic failures before cooldown
    int cooldown_len = 3;
    double attempt_damping = 0.8; // score *= damping^attempts(asset, vuln)
    double tactic_fit_stage_match = 0.5;
    double tactic_fit_mismatch = 0.2;
    // Consecutive-failure counters cool off by one every this many steps,
    // so abandoned targets become viable again later in a campaign.
    int failure_decay_period = 5;
};

struct AttackerState {
    AttackerBelief belief;
    CkcStage stage = CkcStage::Reconnaissance;
    std::map<std::string, int> failures; // vuln id -> consecutive failures
    std::array<int, kTacticCount> tactic_failures{};
    std::array<int, kTacticCount> cooldowns{}; // steps remaining
    std::map<std::pair<std::string, std::string>, int> attempts; // (asset, vuln)
    double budget_spent = 0.0;

    int steps_seen = 0;

    bool in_cooldown(Tactic t) const { return cooldowns[static_cast<int>(t)] > 0; }

    // Once per step: tick tactic cooldowns and periodically cool the
    // per-vulnerability failure counters.
    void tick_cooldowns(int failure_decay_period = 0) {
        for (int& c : cooldowns) {
            if (c > 0) --c;
        }
        ++steps_seen;
        if (failure_decay_period > 0 && steps_seen % failure_decay_period == 0) {
            for (auto& [id, count] : failures) {
                if (count > 0) --count;
            }
        }
    }
    int failure_count(const std::string& vuln_id) const {
        auto it = failures.find(vuln_id);
        return it == failures.end() ? 0 : it->second;
    }
    int attempt_count(const std::string& asset_id, const std::string& vuln_id) const {
        auto it = attempts.find({asset_id, vuln_id});
        return it == attempts.end() ? 0 : it->second;
    }
};

// Frustration penalty eta(f) in [0, 1).
double frustration_penalty(int failures, const ExploitabilityParams& p);

// Mapping-overlap alignment between a tactic and a vulnerability: 1 when
// the tactic itself is mapped, stage-match factor when only the stage
// agrees, mismatch factor otherwise.
double tactic_fit(Tactic t, const Vulnerability& v, const CtiCorpus& corpus);

// Exploitability score in [0, 1]. Applies the guard thresholds, chains
// believed exploit probability -> expected return -> ROI -> logistic map,
// then dampens by detection belief and tactic fit. Throws
// std::invalid_argument when the attack cost is zero.
double exploitability(const Vulnerability& v, const Asset& a, Tactic t,
                      const AttackerBelief& belief, int failure_count, double likelihood,
                      const ExploitabilityParams& p, const RiskParams& risk,
                      const CostParams& costs, const CtiCorpus& corpus);

// Candidate pair for an exploit attempt.
struct TargetChoice {
    std::string asset_id;
    std::string vuln_id;
    std::string technique;
    double expected_value = 0.0;
    double score = 0.0; // exploitability
};

// Assets the attacker can currently operate against: entry-reachable,
// already compromised, or lateral-adjacent to a compromised asset.
std::vector<std::string> reachable_assets(const SystemModel& system, const AttackGraph& graph,
                                          const GameState& state);

// Highest-scoring non-cooled tactic of the current stage; uniformly random
// tactic of the stage when the score table is empty. Throws when the stage
// has no tactics.
Tactic select_tactic(const AttackerState& st, const SystemModel& system,
                     const AttackGraph& graph, const CtiCorpus& corpus,
                     const ThreatScores& scores, const GameState& state,
                     const ExploitabilityParams& p, const RiskParams& risk,
                     const CostParams& costs, Rng& rng);

// Argmax expected-value candidate under the tactic, with occasional
// EV-proportional exploration. nullopt when no candidate is reachable.
std::optional<TargetChoice> select_target(const AttackerState& st, Tactic tactic,
                                          const SystemModel& system, const AttackGraph& graph,
                                          const CtiCorpus& corpus, const ThreatScores& scores,
                                          const GameState& state,
                                          const ExploitabilityParams& p, const RiskParams& risk,
                                          const CostParams& costs, Rng& rng);

struct ExecuteResult {
    int outcome = 0; // 1 success, 0 failure
    CkcStage new_stage = CkcStage::Reconnaissance;
};

// Applies an executed attempt to the attacker: belief revision, failure
// counters, cooldowns, one-stage advance on success or fallback on
// failure (to Reconnaissance below Exploitation), and a detection-belief
// draw against the true detection confidence. A missing target is treated
// as a failed step without an attempt.
ExecuteResult execute_action(AttackerState& st, Tactic tactic,
                             const std::optional<TargetChoice>& target, bool success,
                             int achieved_level, double detection_truth, double likelihood,
                             const BeliefParams& bp, const ExploitabilityParams& p, Rng& rng);

// Reconnaissance result: noisy patch-status readings for every
// vulnerability on the scanned asset.
void apply_scan_result(AttackerState& st, const std::string& asset_id,
                       const SystemModel& system, const GameState& truth,
                       const BeliefParams& bp, Rng& rng);

// Deterministic replay of a known five-exploit campaign; each entry is
// retried until it succeeds, then the script moves on.
class ScriptedAttacker {
public:
    explicit ScriptedAttacker(std::vector<std::string> cve_sequence)
        : sequence_(std::move(cve_sequence)) {}

    // Exploit action for the current script position, with the asset
    // resolved from the system model; Idle once the script is exhausted.
    AttackerAction next_action(const SystemModel& system) const;
    void on_outcome(bool success);
    int progress() const { return index_; }
    bool exhausted() const { return index_ >= static_cast<int>(sequence_.size()); }

private:
    std::vector<std::string> sequence_;
    int index_ = 0;
};

// The bundled five-stage campaign script.
ScriptedAttacker default_campaign_script();

// Action at a given script position (0-based); Idle past the end.
AttackerAction scripted_next_action(int script_index, const SystemModel& system);

} // namespace patchgame
