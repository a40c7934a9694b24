#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "patchgame/attack_graph.hpp"
#include "patchgame/attacker_policy.hpp"
#include "patchgame/beliefs.hpp"
#include "patchgame/cost_model.hpp"
#include "patchgame/defender_policy.hpp"
#include "patchgame/engine.hpp"
#include "patchgame/rl_adaptive.hpp"
#include "patchgame/rng.hpp"
#include "patchgame/system_model.hpp"
#include "patchgame/threat_intel.hpp"

namespace patchgame {

enum class AttackerKind { Scripted, Adaptive };

struct SimulationConfig {
    std::string scenario_path;
    std::string corpus_dir;
    std::string likelihood_model_path;

    StrategyKind strategy = StrategyKind::CostAware;
    AttackerKind attacker = AttackerKind::Adaptive;
    Budgets budgets;       // defender 7500, attacker 15000
    int horizon = 60;
    int runs = 100;        // M
    uint64_t master_seed = 42;
    int patch_limit_per_step = 3; // n

    RiskParams risk;
    CostParams costs;
    BeliefParams beliefs;
    EngineParams engine;
    PayoffParams payoff;
    ExploitabilityParams attacker_params;
    DefenderWeights defender;
    RlParams rl;
    int rl_train_episodes = 200; // compare trains this many when no table given

    // Per-CVE exploit-likelihood overrides merged into the model.
    std::map<std::string, double> likelihood_overrides;
    std::optional<QTable> qtable; // drives the adaptive strategy when set
};

struct ScenarioBundle {
    SystemModel system;
    CtiCorpus corpus;
    LikelihoodModel model;
};

ScenarioBundle load_bundle(const SimulationConfig& cfg);

struct StageTally {
    int attempts = 0;
    int successes = 0;
};

struct RunMetrics {
    double protected_value = 0.0;
    double net_value = 0.0;
    double total_patch_cost = 0.0;
    int compromised_assets = 0;
    bool zero_compromise = true;
    std::optional<double> ttd;
    std::map<Tactic, StageTally> stage_successes;
    int steps_taken = 0;
    int patched_count = 0; // patch flags set at the end of the run
    Verdict verdict = Verdict::Continue;
    double attacker_spent = 0.0;
    double attacker_payoff_total = 0.0; // discounted
    double defender_payoff_total = 0.0; // discounted
    int max_stage_reached = 0;
    std::vector<int> compromised_series; // count after each step
};

struct TraceRow {
    int step = 0;
    std::string stage;
    std::string tactic;
    std::string attacker_action;
    double attacker_ev = 0.0; // expected value of the chosen target, if any
    std::string outcome;
    std::string patched; // comma-joined vuln ids patched this step
    int compromised = 0;
    int patch_count = 0;
    double det = 0.0;
    double defender_payoff = 0.0;
    double attacker_payoff = 0.0;
};

struct RunResult {
    RunMetrics metrics;
    std::vector<TraceRow> trace;
};

// One full game loop, seeded from (master_seed, run_index). Steps the
// defender plan, the attacker policy and the ground-truth transition until
// a termination condition fires.
RunResult run_episode(const SimulationConfig& cfg, const ScenarioBundle& bundle, int run_index);

struct StrategySummary {
    StrategyKind strategy = StrategyKind::CvssOnly;
    int runs = 0;
    double protected_value_mean = 0.0;
    double protected_value_std = 0.0;
    double protection_rate = 0.0;
    double compromised_mean = 0.0;
    std::optional<double> ttd_mean; // over runs with at least one detection
    double cost_mean = 0.0;
    double net_value_mean = 0.0;
    std::map<Tactic, double> stage_success_rates;
    std::vector<double> attack_progression; // mean compromised count per step
};

struct BatchReport {
    std::string scenario;
    uint64_t master_seed = 0;
    int runs = 0;
    std::vector<StrategySummary> strategies;
    std::vector<StrategyKind> pareto; // over (net value, cost)

    std::string to_json() const;
    std::string comparison_table() const; // aligned text table
    std::string progression_csv() const;  // strategy,step,mean_compromised
};

// Monte Carlo batch for the configured strategy.
BatchReport run_batch(const SimulationConfig& cfg, const ScenarioBundle& bundle);
// Per-run rows for the batch (columnar text).
std::string run_metrics_csv(const SimulationConfig& cfg, const ScenarioBundle& bundle);

// All five strategies under a common seed, plus the Pareto frontier.
// Trains a Q-table for the adaptive strategy when none is configured.
BatchReport run_compare(const SimulationConfig& cfg, const ScenarioBundle& bundle);

// Indices of non-dominated (utility, cost) points: no other point has
// utility >= and cost <= with at least one strict. Identical points are
// all retained. Throws std::invalid_argument on empty input.
std::vector<std::size_t> pareto_frontier(const std::vector<std::pair<double, double>>& points);

std::string trace_csv(const std::vector<TraceRow>& trace);

// Simulation-backed training environment: each episode is a reduced-
// horizon run against the adaptive attacker where the agent picks the
// weight configuration each step.
class PatchGameEnv : public RlEnvironment {
public:
    PatchGameEnv(const SimulationConfig& cfg, const ScenarioBundle& bundle, uint64_t seed);
    ~PatchGameEnv() override;

    RlState reset() override;
    int action_count() const override;
    StepResult step(int action) override;
    void fill_episode_stats(EpisodeStats& stats) const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Trains on the bundled scenario; deterministic for a fixed seed.
std::pair<QTable, TrainingSummary> train_on_scenario(const SimulationConfig& cfg,
                                                     const ScenarioBundle& bundle,
                                                     int episodes, uint64_t seed);

} // namespace patchgame
