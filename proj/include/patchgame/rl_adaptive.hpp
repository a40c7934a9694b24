#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include "patchgame/rng.hpp"
#include "patchgame/weight_config.hpp"

namespace patchgame {

// Discretized security posture: compromised fraction, count of unpatched
// high-severity vulnerabilities, and remaining budget fraction.
struct RlState {
    int comp_bin = 0;
    int high_risk_bin = 0;
    int budget_bin = 0;

    bool operator<(const RlState& o) const {
        return std::tie(comp_bin, high_risk_bin, budget_bin) <
               std::tie(o.comp_bin, o.high_risk_bin, o.budget_bin);
    }
    bool operator==(const RlState& o) const {
        return comp_bin == o.comp_bin && high_risk_bin == o.high_risk_bin &&
               budget_bin == o.budget_bin;
    }
};

struct RlParams {
    double alpha = 0.1;
    double gamma = 0.95;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    double epsilon_decay_fraction = 0.5; // fraction of episodes spent decaying

    double reward_w_value = 0.30;
    double reward_w_roi = 0.25;
    double reward_w_patch = 0.25;
    double reward_w_critical = 0.20;
    double roi_norm_scale = 50.0;
    double roi_cost_floor = 500.0; // avoids a divide-by-zero ROI early on
    double critical_cvss_threshold = 7.0;
    // Optional threat-aware reward component, disabled by default.
    double beta_threat_term = 0.0;

    int max_steps_per_episode = 25;

    // Expert prior of the hybrid policy: the weight configuration used in
    // states the Q-table has not learned anything about.
    int default_config_index = 0;
    // The learned action replaces the expert prior only when its Q-value
    // beats the prior's by this much.
    double q_override_margin = 0.0;
};

// Left-closed bins over [0, .25, .5, .75, 1] for the fractions and
// {0, 1-2, 3-5, 6+} for the high-risk count.
RlState discretize_state(double comp_fraction, int high_risk_count, double budget_fraction);

struct RewardSnapshot {
    double preserved_value = 0.0;
    double total_business_value = 0.0;
    double cumulative_patch_cost = 0.0;
    int patches_applied = 0; // this step
    int per_step_limit = 1;
    int unpatched_critical = 0;
    int initial_critical = 0;
    double external_threat_level = 0.0;
};

// Weighted mix of value preserved, ROI, patch activity and a critical
// backlog penalty, clipped to [-1, 1].
double compute_reward(const RewardSnapshot& snapshot, const RlParams& p);

class QTable {
public:
    explicit QTable(int n_actions = static_cast<int>(default_weight_configs().size()))
        : n_actions_(n_actions) {}

    int action_count() const { return n_actions_; }
    double value(const RlState& s, int action) const;
    std::vector<double>& row(const RlState& s);
    // Argmax over actions; ties resolve to the lowest index, unseen states
    // to action 0.
    int best_action(const RlState& s) const;
    double max_value(const RlState& s) const;
    std::size_t size() const { return table_.size(); }

    std::string serialize() const;
    static QTable deserialize(const std::string& text);
    void save(const std::string& path) const;
    static QTable load(const std::string& path);

    const std::map<RlState, std::vector<double>>& entries() const { return table_; }

private:
    int n_actions_;
    std::map<RlState, std::vector<double>> table_;
};

// Episodic environment interface for the trainer.
class RlEnvironment {
public:
    virtual ~RlEnvironment() = default;
    virtual RlState reset() = 0;
    virtual int action_count() const = 0;

    struct StepResult {
        RlState state;
        double reward = 0.0;
        bool done = false; // terminal; truncated episodes still bootstrap
    };
    virtual StepResult step(int action) = 0;

    // Environment-specific end-of-episode metrics (value preserved, ROI,
    // compromise count); default leaves them at zero.
    virtual void fill_episode_stats(struct EpisodeStats& stats) const;
};

struct EpisodeStats {
    double total_reward = 0.0;
    int steps = 0;
    double final_value_fraction = 0.0;
    double roi = 0.0;
    int compromised_assets = 0;
};

struct TrainingSummary {
    int episodes = 0;
    double mean_reward = 0.0;
    double mean_roi = 0.0;
    double mean_value_preserved = 0.0;
    double mean_compromised = 0.0;
    std::vector<EpisodeStats> per_episode;

    std::string to_json() const;
};

using EnvFactory = std::function<std::unique_ptr<RlEnvironment>()>;

// Tabular Q-learning with epsilon-greedy exploration decaying linearly
// over the first epsilon_decay_fraction of the episodes. Deterministic for
// a fixed seed.
std::pair<QTable, TrainingSummary> train(const EnvFactory& make_env, int episodes,
                                         uint64_t seed, const RlParams& params);

} // namespace patchgame
