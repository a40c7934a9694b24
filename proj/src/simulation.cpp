#include "patchgame/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace patchgame {

ScenarioBundle load_bundle(const SimulationConfig& cfg) {
    ScenarioBundle bundle;
    bundle.system = load_scenario(cfg.scenario_path);
    bundle.corpus = load_corpus(cfg.corpus_dir);
    bundle.model = load_likelihood_model(cfg.likelihood_model_path);
    for (const auto& [cve, value] : cfg.likelihood_overrides) {
        bundle.model.overrides[cve] = value;
    }
    return bundle;
}

namespace {

std::string action_to_string(const AttackerAction& a) {
    switch (a.kind) {
        case AttackerAction::Kind::Exploit: return "exploit " + a.vuln_id + "@" + a.asset_id;
        case AttackerAction::Kind::Move: return "move " + a.src_asset_id + "->" + a.asset_id;
        case AttackerAction::Kind::Scan: return "scan " + a.asset_id;
        case AttackerAction::Kind::Prepare: return "prepare";
        case AttackerAction::Kind::Idle: return "idle";
    }
    return "idle";
}

StageDist observation_likelihood(const std::optional<CkcStage>& detected,
                                 const BeliefParams& bp) {
    StageDist like{};
    if (!detected.has_value()) {
        like.fill(bp.obs_quiet);
        return like;
    }
    const int d = static_cast<int>(*detected);
    for (int k = 0; k < kStageCount; ++k) {
        const int dist = std::abs(k - d);
        like[k] = dist == 0 ? bp.obs_match : dist == 1 ? bp.obs_near : bp.obs_far;
    }
    return like;
}

const CompDist& indicator_likelihood(Tactic tactic, const BeliefParams& bp) {
    if (tactic == Tactic::Reconnaissance) return bp.recon_detected_likelihood;
    if (tactic == Tactic::LateralMovement) return bp.lateral_detected_likelihood;
    return bp.exploit_detected_likelihood;
}

struct PendingDetection {
    int exec_step = 0;
    std::string asset_id;
    Tactic tactic = Tactic::Execution;
};

// One seeded run: owns the game state, both players and the bookkeeping.
// run_episode and the RL environment both drive it step by step.
class RunContext {
public:
    RunContext(const SimulationConfig& cfg, const ScenarioBundle& bundle, uint64_t seed)
        : cfg_(cfg),
          system_(bundle.system),
          corpus_(bundle.corpus),
          model_(bundle.model),
          rng_(seed),
          basis_(compute_feature_basis(bundle.system)),
          transition_matrix_(stage_transition_matrix(cfg.beliefs)) {
        state_ = initial_state(system_);
        scores_ = provider(state_);
        state_.phi =
            compute_feature_vector(system_, state_, scores_, cfg_.engine.recency_window, basis_);
        graph_ = build_graph(system_, scores_, corpus_);
        attacker_.belief = initial_attacker_belief(system_, cfg_.beliefs);
        defender_belief_ = initial_defender_belief(system_);
        script_ = default_campaign_script();
        initial_critical_ = high_risk_count();
    }

    ThreatScores provider(const GameState& s) const {
        return threat_scores_with_patches(system_, corpus_, model_, s.patch);
    }

    Verdict verdict() const {
        return check_termination(state_, defender_spent_, attacker_spent_, cfg_.budgets,
                                 cfg_.horizon, system_);
    }
    bool finished() const { return verdict() != Verdict::Continue; }

    struct StepOutcome {
        int patches_applied = 0;
        double patch_cost = 0.0;
        std::optional<AttemptEvent> attempt;
        TraceRow trace;
    };

    StepOutcome step(const WeightConfig* weight_override) {
        // Defender: fold last step's detections into the beliefs, then plan.
        defender_belief_ = defender_update_stage(
            defender_belief_, observation_likelihood(detected_stage_, cfg_.beliefs),
            transition_matrix_, scores_.external_level, cfg_.beliefs.w_ckc,
            cfg_.beliefs.belief_floor);
        for (const auto& [asset_id, likelihood] : indicators_) {
            defender_belief_ = defender_update_comp(defender_belief_, asset_id, likelihood);
        }
        detected_stage_.reset();
        indicators_.clear();

        const double remaining = cfg_.budgets.defender - defender_spent_;
        PatchPlan plan = make_plan(weight_override, remaining);
        std::vector<DefenderAction> defender_actions;
        for (const auto& item : plan.items) {
            DefenderAction d;
            d.kind = DefenderAction::Kind::Patch;
            d.vuln_id = item.vuln_id;
            d.asset_id = item.asset_id;
            defender_actions.push_back(std::move(d));
        }

        // Attacker action.
        AttackerAction action;
        Tactic tactic = Tactic::Reconnaissance;
        std::optional<TargetChoice> target;
        bool budget_idle = attacker_spent_ >= cfg_.budgets.attacker;
        if (!budget_idle) {
            if (cfg_.attacker == AttackerKind::Scripted) {
                action = script_.next_action(system_);
            } else {
                attacker_.tick_cooldowns(cfg_.attacker_params.failure_decay_period);
                std::tie(action, tactic, target) = choose_adaptive_action();
            }
        }

        // Ground truth.
        auto fresh = [this](const GameState& s) { return provider(s); };
        TransitionResult tr =
            transition(state_, action, defender_actions, system_, graph_, scores_, corpus_,
                       cfg_.engine, cfg_.costs, basis_, fresh, rng_);
        defender_spent_ += tr.defender_spend;
        attacker_spent_ += tr.attacker_spend;
        if (cfg_.budgets.defender > 0.0 &&
            defender_spent_ > cfg_.budgets.defender + 1e-6) {
            throw std::logic_error("defender spend exceeded budget");
        }

        const int t = state_.step;
        const double discount = std::pow(cfg_.payoff.gamma, t);
        const double att_pay =
            attacker_payoff(tr.state, action, system_, cfg_.costs, cfg_.payoff, cfg_.engine);
        const double def_pay = defender_payoff(tr.state, defender_actions, system_, cfg_.costs,
                                               cfg_.payoff, cfg_.engine);
        attacker_payoff_total_ += discount * att_pay;
        defender_payoff_total_ += discount * def_pay;

        // Attacker-side updates from the outcome.
        const bool success = tr.attempt.has_value() && tr.attempt->success;
        if (cfg_.attacker == AttackerKind::Scripted) {
            script_.on_outcome(success);
        } else if (!budget_idle) {
            apply_adaptive_outcome(action, tactic, target, tr);
            tr.state.k = attacker_.stage; // truth mirrors the attacker's stage
            // Visible patch activity pulls the patch beliefs toward 1.
            for (std::size_t i = 0; i < tr.state.phi.recent_patches.size() &&
                                    i < system_.vulnerabilities.size();
                 ++i) {
                if (tr.state.phi.recent_patches[i] == 0) continue;
                auto it = attacker_.belief.patch.find(system_.vulnerabilities[i].id);
                if (it != attacker_.belief.patch.end()) {
                    it->second += (1.0 - it->second) * cfg_.beliefs.recent_patch_signal;
                }
            }
        }

        // Detection sampling for TTD and next-step observations.
        if (tr.attempt.has_value() && !tr.attempt->action.asset_id.empty() &&
            tr.attempt->action.kind != AttackerAction::Kind::Prepare) {
            pending_.push_back({tr.attempt->step, tr.attempt->action.asset_id,
                                tr.attempt->tactic});
        }
        for (auto it = pending_.begin(); it != pending_.end();) {
            const double p = effective_detection_prob(system_, tr.state, it->asset_id);
            if (rng_.bernoulli(p)) {
                ttd_samples_.push_back(static_cast<double>(t - it->exec_step));
                if (!detected_stage_.has_value())
                    detected_stage_ = tactic_to_stage(it->tactic);
                indicators_.emplace_back(it->asset_id,
                                         indicator_likelihood(it->tactic, cfg_.beliefs));
                it = pending_.erase(it);
            } else {
                ++it;
            }
        }

        // Tally + bookkeeping.
        if (tr.attempt.has_value()) {
            auto& tally = stage_successes_[tr.attempt->tactic];
            ++tally.attempts;
            if (tr.attempt->success) ++tally.successes;
        }
        total_patch_cost_ += tr.defender_spend;
        patch_count_ += static_cast<int>(plan.items.size());

        state_ = std::move(tr.state);
        scores_ = provider(state_);
        apply_state_update(graph_, state_, scores_, system_, corpus_);
        max_stage_reached_ = std::max(max_stage_reached_, static_cast<int>(state_.k));
        compromised_series_.push_back(compromised_count());

        StepOutcome out;
        out.patches_applied = static_cast<int>(plan.items.size());
        out.patch_cost = tr.defender_spend;
        out.attempt = tr.attempt;

        TraceRow row;
        row.step = t;
        row.stage = stage_name(state_.k);
        row.tactic = budget_idle ? "" : tactic_name(tactic);
        row.attacker_action = budget_idle ? "idle (budget)" : action_to_string(action);
        row.attacker_ev = target.has_value() ? target->expected_value : 0.0;
        row.outcome = tr.attempt.has_value() ? (tr.attempt->success ? "success" : "failure")
                                             : "none";
        std::string patched;
        for (const auto& item : plan.items) {
            if (!patched.empty()) patched += ",";
            patched += item.vuln_id;
        }
        row.patched = patched;
        row.compromised = compromised_count();
        row.patch_count = patch_count_;
        row.det = state_.det;
        row.defender_payoff = def_pay;
        row.attacker_payoff = att_pay;
        out.trace = std::move(row);
        return out;
    }

    // Snapshot helpers.
    int compromised_count() const {
        int c = 0;
        for (const auto& a : system_.assets) {
            if (state_.comp_level(a.id) > 0) ++c;
        }
        return c;
    }
    double comp_fraction() const {
        return system_.assets.empty()
                   ? 0.0
                   : static_cast<double>(compromised_count()) / system_.assets.size();
    }
    int high_risk_count() const {
        int c = 0;
        for (const auto& v : system_.vulnerabilities) {
            if (state_.patch_state(v.id) == 0 && v.cvss >= cfg_.rl.critical_cvss_threshold) ++c;
        }
        return c;
    }
    double budget_fraction() const {
        if (cfg_.budgets.defender <= 0.0) return 0.0;
        return std::clamp((cfg_.budgets.defender - defender_spent_) / cfg_.budgets.defender, 0.0,
                          1.0);
    }
    double preserved_value() const {
        double v = 0.0;
        for (const auto& a : system_.assets) {
            if (state_.comp_level(a.id) == 0) v += a.business_value;
        }
        return v;
    }
    RlState rl_state() const {
        return discretize_state(comp_fraction(), high_risk_count(), budget_fraction());
    }

    RunMetrics metrics() const {
        RunMetrics m;
        m.protected_value = preserved_value();
        m.total_patch_cost = total_patch_cost_;
        m.net_value = m.protected_value - m.total_patch_cost;
        m.compromised_assets = compromised_count();
        m.zero_compromise = m.compromised_assets == 0;
        if (!ttd_samples_.empty()) {
            m.ttd = std::accumulate(ttd_samples_.begin(), ttd_samples_.end(), 0.0) /
                    static_cast<double>(ttd_samples_.size());
        }
        m.stage_successes = stage_successes_;
        m.steps_taken = state_.step;
        for (const auto& [vuln_id, flag] : state_.patch) {
            if (flag != 0) ++m.patched_count;
        }
        m.verdict = verdict();
        m.attacker_spent = attacker_spent_;
        m.attacker_payoff_total = attacker_payoff_total_;
        m.defender_payoff_total = defender_payoff_total_;
        m.max_stage_reached = max_stage_reached_;
        m.compromised_series = compromised_series_;
        return m;
    }

    double defender_spent() const { return defender_spent_; }
    double total_patch_cost() const { return total_patch_cost_; }
    int initial_critical() const { return initial_critical_; }
    const GameState& state() const { return state_; }
    const ThreatScores& scores() const { return scores_; }

private:
    PatchPlan make_plan(const WeightConfig* weight_override, double remaining) {
        std::vector<ScoredVulnerability> scored;
        if (cfg_.strategy == StrategyKind::AdaptiveThreatIntel || weight_override != nullptr) {
            const WeightConfig* wc = weight_override;
            if (wc == nullptr) {
                const auto& configs = default_weight_configs();
                // Hybrid policy: expert default unless the learned value
                // clearly prefers another configuration in this state.
                int idx = cfg_.rl.default_config_index;
                if (cfg_.qtable.has_value()) {
                    const RlState s = rl_state();
                    const int best = cfg_.qtable->best_action(s);
                    if (cfg_.qtable->value(s, best) >
                        cfg_.qtable->value(s, idx) + cfg_.rl.q_override_margin) {
                        idx = best;
                    }
                }
                idx = std::clamp(idx, 0, static_cast<int>(configs.size()) - 1);
                wc = &configs[static_cast<std::size_t>(idx)];
            }
            auto asset_scores =
                score_assets(system_, defender_belief_, state_, scores_, cfg_.defender);
            scored = score_vulnerabilities(system_, asset_scores, state_, scores_,
                                           cfg_.defender, cfg_.costs, cfg_.risk, wc);
        } else {
            scored = score_baseline(system_, state_, cfg_.strategy, cfg_.costs, cfg_.risk,
                                    cfg_.defender);
        }
        return plan_patches(scored, defender_belief_, remaining, cfg_.patch_limit_per_step,
                            cfg_.defender);
    }

    // Scan target: the reachable asset with the highest threat relevance.
    AttackerAction scan_action(const char* technique) const {
        AttackerAction action;
        std::string best;
        double best_tr = -1.0;
        for (const auto& asset_id : reachable_assets(system_, graph_, state_)) {
            const double tr = scores_.relevance(asset_id);
            if (tr > best_tr) {
                best_tr = tr;
                best = asset_id;
            }
        }
        if (!best.empty()) {
            action.kind = AttackerAction::Kind::Scan;
            action.asset_id = best;
            action.technique = technique;
        }
        return action;
    }

    std::tuple<AttackerAction, Tactic, std::optional<TargetChoice>> choose_adaptive_action() {
        AttackerAction action;
        Tactic tactic;
        std::optional<TargetChoice> target;

        if (attacker_.stage == CkcStage::Reconnaissance) {
            return {scan_action("T1595"), Tactic::Reconnaissance, target};
        }
        if (attacker_.stage == CkcStage::Weaponization) {
            tactic = Tactic::ResourceDevelopment;
            action.kind = AttackerAction::Kind::Prepare;
            action.technique = "T1587";
            return {action, tactic, target};
        }

        tactic = select_tactic(attacker_, system_, graph_, corpus_, scores_, state_,
                               cfg_.attacker_params, cfg_.risk, cfg_.costs, rng_);
        if (tactic == Tactic::Discovery || tactic == Tactic::Reconnaissance) {
            return {scan_action("T1046"), tactic, target};
        }
        target = select_target(attacker_, tactic, system_, graph_, corpus_, scores_, state_,
                               cfg_.attacker_params, cfg_.risk, cfg_.costs, rng_);
        // When every candidate sits at the guard floor (believed patched or
        // frustrated out), fall back to the stage's scan tactic if it has
        // one rather than burning budget on hopeless exploits.
        const bool guarded =
            target.has_value() && target->score <= cfg_.attacker_params.epsilon + 1e-12;
        if (!target.has_value() || guarded) {
            const auto stage_tactics = tactics_of_stage(attacker_.stage);
            for (Tactic t : stage_tactics) {
                if (t == Tactic::Discovery && !attacker_.in_cooldown(t)) {
                    return {scan_action("T1046"), t, std::nullopt};
                }
            }
        }
        if (target.has_value()) {
            action.kind = AttackerAction::Kind::Exploit;
            action.asset_id = target->asset_id;
            action.vuln_id = target->vuln_id;
            action.technique = target->technique;
            return {action, tactic, target};
        }
        if (tactic == Tactic::LateralMovement) {
            // No exploitable pair; raw movement across the likeliest edge.
            const GraphEdge* best_edge = nullptr;
            double best_p = 0.0;
            for (const auto& e : graph_.edges) {
                if (e.kind != EdgeKind::Lateral) continue;
                if (state_.comp_level(e.src) == 0) continue;
                if (state_.comp_level(e.dst) >= 2) continue;
                const double p =
                    edge_probability(graph_, e, state_, scores_, system_, corpus_);
                if (p > best_p) {
                    best_p = p;
                    best_edge = &e;
                }
            }
            if (best_edge != nullptr) {
                action.kind = AttackerAction::Kind::Move;
                action.src_asset_id = best_edge->src;
                action.asset_id = best_edge->dst;
                action.technique = best_edge->technique;
            }
        }
        return {action, tactic, target};
    }

    void apply_adaptive_outcome(const AttackerAction& action, Tactic tactic,
                                const std::optional<TargetChoice>& target,
                                const TransitionResult& tr) {
        const bool success = tr.attempt.has_value() && tr.attempt->success;
        const int achieved = tr.attempt.has_value() ? tr.attempt->achieved_level : 0;
        const double det_truth = tr.state.det;

        switch (action.kind) {
            case AttackerAction::Kind::Exploit:
                execute_action(attacker_, tactic, target, success, achieved, det_truth,
                               scores_.likelihood(action.vuln_id), cfg_.beliefs,
                               cfg_.attacker_params, rng_);
                break;
            case AttackerAction::Kind::Scan:
                execute_action(attacker_, tactic, std::nullopt, success, achieved, det_truth,
                               0.0, cfg_.beliefs, cfg_.attacker_params, rng_);
                if (success) {
                    apply_scan_result(attacker_, action.asset_id, system_, tr.state,
                                      cfg_.beliefs, rng_);
                }
                break;
            case AttackerAction::Kind::Move:
                execute_action(attacker_, tactic, std::nullopt, success, achieved, det_truth,
                               0.0, cfg_.beliefs, cfg_.attacker_params, rng_);
                if (success) {
                    CompDist pinned{};
                    pinned[std::clamp(achieved, 0, 2)] = 1.0;
                    attacker_.belief.comp[action.asset_id] = pinned;
                }
                break;
            case AttackerAction::Kind::Prepare:
                execute_action(attacker_, tactic, std::nullopt, true, 0, det_truth, 0.0,
                               cfg_.beliefs, cfg_.attacker_params, rng_);
                break;
            case AttackerAction::Kind::Idle:
                // NoTarget: fall back per the standard failure rule.
                execute_action(attacker_, tactic, std::nullopt, false, 0, det_truth, 0.0,
                               cfg_.beliefs, cfg_.attacker_params, rng_);
                break;
        }
        attacker_.budget_spent = attacker_spent_;
    }

    SimulationConfig cfg_;
    const SystemModel& system_;
    const CtiCorpus& corpus_;
    LikelihoodModel model_;
    Rng rng_;
    FeatureBasis basis_;
    std::array<StageDist, kStageCount> transition_matrix_;

    GameState state_;
    ThreatScores scores_;
    AttackGraph graph_;
    AttackerState attacker_;
    DefenderBelief defender_belief_;
    ScriptedAttacker script_{{}};

    double defender_spent_ = 0.0;
    double attacker_spent_ = 0.0;
    double total_patch_cost_ = 0.0;
    int patch_count_ = 0;
    double attacker_payoff_total_ = 0.0;
    double defender_payoff_total_ = 0.0;
    int max_stage_reached_ = 0;
    int initial_critical_ = 0;

    std::vector<PendingDetection> pending_;
    std::vector<double> ttd_samples_;
    std::optional<CkcStage> detected_stage_;
    std::vector<std::pair<std::string, CompDist>> indicators_;
    std::map<Tactic, StageTally> stage_successes_;
    std::vector<int> compromised_series_;
};

} // namespace

RunResult run_episode(const SimulationConfig& cfg, const ScenarioBundle& bundle,
                      int run_index) {
    RunContext ctx(cfg, bundle, Rng::mix(cfg.master_seed, static_cast<uint64_t>(run_index)));
    RunResult result;
    while (!ctx.finished()) {
        auto outcome = ctx.step(nullptr);
        result.trace.push_back(outcome.trace);
    }
    result.metrics = ctx.metrics();
    return result;
}

std::vector<std::size_t> pareto_frontier(const std::vector<std::pair<double, double>>& points) {
    if (points.empty()) throw std::invalid_argument("pareto_frontier: empty input");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
            if (i == j) continue;
            const bool weakly = points[j].first >= points[i].first &&
                                points[j].second <= points[i].second;
            const bool strictly = points[j].first > points[i].first ||
                                  points[j].second < points[i].second;
            if (weakly && strictly) dominated = true;
        }
        if (!dominated) out.push_back(i);
    }
    return out;
}

namespace {

StrategySummary summarize(StrategyKind strategy, const std::vector<RunMetrics>& runs,
                          int horizon) {
    StrategySummary s;
    s.strategy = strategy;
    s.runs = static_cast<int>(runs.size());
    if (runs.empty()) return s;

    double sum = 0.0, sum_sq = 0.0, comp = 0.0, cost = 0.0, net = 0.0;
    int zero = 0;
    double ttd_sum = 0.0;
    int ttd_n = 0;
    std::map<Tactic, StageTally> tallies;
    for (const auto& m : runs) {
        sum += m.protected_value;
        sum_sq += m.protected_value * m.protected_value;
        comp += m.compromised_assets;
        cost += m.total_patch_cost;
        net += m.net_value;
        if (m.zero_compromise) ++zero;
        if (m.ttd.has_value()) {
            ttd_sum += *m.ttd;
            ++ttd_n;
        }
        for (const auto& [tactic, tally] : m.stage_successes) {
            tallies[tactic].attempts += tally.attempts;
            tallies[tactic].successes += tally.successes;
        }
    }
    const double n = static_cast<double>(runs.size());
    s.protected_value_mean = sum / n;
    const double var = std::max(0.0, sum_sq / n - s.protected_value_mean * s.protected_value_mean);
    s.protected_value_std = std::sqrt(var);
    s.protection_rate = static_cast<double>(zero) / n;
    s.compromised_mean = comp / n;
    s.cost_mean = cost / n;
    s.net_value_mean = net / n;
    if (ttd_n > 0) s.ttd_mean = ttd_sum / ttd_n;
    for (const auto& [tactic, tally] : tallies) {
        if (tally.attempts > 0) {
            s.stage_success_rates[tactic] =
                static_cast<double>(tally.successes) / tally.attempts;
        }
    }

    s.attack_progression.assign(static_cast<std::size_t>(horizon), 0.0);
    for (const auto& m : runs) {
        int last = 0;
        for (int step = 0; step < horizon; ++step) {
            if (step < static_cast<int>(m.compromised_series.size())) {
                last = m.compromised_series[static_cast<std::size_t>(step)];
            }
            s.attack_progression[static_cast<std::size_t>(step)] += last;
        }
    }
    for (double& x : s.attack_progression) x /= n;
    return s;
}

} // namespace

BatchReport run_batch(const SimulationConfig& cfg, const ScenarioBundle& bundle) {
    if (cfg.runs < 1) throw std::invalid_argument("run_batch: runs must be >= 1");
    std::vector<RunMetrics> all;
    for (int i = 0; i < cfg.runs; ++i) all.push_back(run_episode(cfg, bundle, i).metrics);

    BatchReport report;
    report.scenario = bundle.system.name;
    report.master_seed = cfg.master_seed;
    report.runs = cfg.runs;
    report.strategies.push_back(summarize(cfg.strategy, all, cfg.horizon));
    report.pareto = {cfg.strategy};
    return report;
}

std::string run_metrics_csv(const SimulationConfig& cfg, const ScenarioBundle& bundle) {
    std::ostringstream out;
    out << "run,protected_value,net_value,patch_cost,compromised,zero_compromise,ttd,steps,"
           "verdict\n";
    for (int i = 0; i < cfg.runs; ++i) {
        const RunMetrics m = run_episode(cfg, bundle, i).metrics;
        out << i << ',' << m.protected_value << ',' << m.net_value << ','
            << m.total_patch_cost << ',' << m.compromised_assets << ','
            << (m.zero_compromise ? 1 : 0) << ',';
        if (m.ttd.has_value()) out << *m.ttd;
        out << ',' << m.steps_taken << ',' << verdict_name(m.verdict) << '\n';
    }
    return out.str();
}

BatchReport run_compare(const SimulationConfig& cfg, const ScenarioBundle& bundle) {
    BatchReport report;
    report.scenario = bundle.system.name;
    report.master_seed = cfg.master_seed;
    report.runs = cfg.runs;

    std::optional<QTable> qtable = cfg.qtable;
    for (StrategyKind kind : all_strategies()) {
        SimulationConfig sub = cfg;
        sub.strategy = kind;
        if (kind == StrategyKind::AdaptiveThreatIntel) {
            if (!qtable.has_value()) {
                auto [trained, summary] = train_on_scenario(
                    cfg, bundle, cfg.rl_train_episodes, Rng::mix(cfg.master_seed, 0x51));
                qtable = std::move(trained);
            }
            sub.qtable = qtable;
        }
        std::vector<RunMetrics> all;
        for (int i = 0; i < sub.runs; ++i) all.push_back(run_episode(sub, bundle, i).metrics);
        report.strategies.push_back(summarize(kind, all, cfg.horizon));
    }

    std::vector<std::pair<double, double>> points;
    for (const auto& s : report.strategies) points.emplace_back(s.net_value_mean, s.cost_mean);
    for (std::size_t idx : pareto_frontier(points)) {
        report.pareto.push_back(report.strategies[idx].strategy);
    }
    return report;
}

std::string BatchReport::to_json() const {
    nlohmann::json doc;
    doc["scenario"] = scenario;
    doc["master_seed"] = master_seed;
    doc["runs"] = runs;
    nlohmann::json strategies_json = nlohmann::json::array();
    for (const auto& s : strategies) {
        nlohmann::json row;
        row["strategy"] = strategy_name(s.strategy);
        row["runs"] = s.runs;
        row["protected_value_mean"] = s.protected_value_mean;
        row["protected_value_std"] = s.protected_value_std;
        row["protection_rate"] = s.protection_rate;
        row["compromised_assets_mean"] = s.compromised_mean;
        if (s.ttd_mean.has_value()) {
            row["ttd_mean"] = *s.ttd_mean;
        } else {
            row["ttd_mean"] = nullptr;
        }
        row["cost_mean"] = s.cost_mean;
        row["net_value_mean"] = s.net_value_mean;
        nlohmann::json rates;
        for (const auto& [tactic, rate] : s.stage_success_rates) {
            rates[tactic_name(tactic)] = rate;
        }
        row["stage_success_rates"] = std::move(rates);
        row["attack_progression"] = s.attack_progression;
        strategies_json.push_back(std::move(row));
    }
    doc["strategies"] = std::move(strategies_json);
    nlohmann::json pareto_json = nlohmann::json::array();
    for (StrategyKind k : pareto) pareto_json.push_back(strategy_name(k));
    doc["pareto"] = std::move(pareto_json);
    return doc.dump(2);
}

std::string BatchReport::comparison_table() const {
    std::ostringstream out;
    out << "strategy,protected_value,protection_rate,compromised_assets,ttd,cost\n";
    for (const auto& s : strategies) {
        out << strategy_name(s.strategy) << ',' << s.protected_value_mean << ','
            << s.protection_rate << ',' << s.compromised_mean << ',';
        if (s.ttd_mean.has_value()) out << *s.ttd_mean;
        out << ',' << s.cost_mean << '\n';
    }
    return out.str();
}

std::string BatchReport::progression_csv() const {
    std::ostringstream out;
    out << "strategy,step,mean_compromised\n";
    for (const auto& s : strategies) {
        for (std::size_t step = 0; step < s.attack_progression.size(); ++step) {
            out << strategy_name(s.strategy) << ',' << step << ','
                << s.attack_progression[step] << '\n';
        }
    }
    return out.str();
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
    std::ostringstream out;
    out << "step,stage,tactic,attacker_action,attacker_ev,outcome,patched,compromised,"
           "patch_count,det,defender_payoff,attacker_payoff\n";
    for (const auto& r : trace) {
        out << r.step << ',' << r.stage << ',' << r.tactic << ',' << r.attacker_action << ','
            << r.attacker_ev << ',' << r.outcome << ",\"" << r.patched << "\","
            << r.compromised << ',' << r.patch_count << ',' << r.det << ','
            << r.defender_payoff << ',' << r.attacker_payoff << '\n';
    }
    return out.str();
}

struct PatchGameEnv::Impl {
    SimulationConfig cfg;
    const ScenarioBundle& bundle;
    uint64_t seed_base;
    uint64_t episode = 0;
    std::unique_ptr<RunContext> ctx;
    int patches_total = 0;

    Impl(const SimulationConfig& c, const ScenarioBundle& b, uint64_t seed)
        : cfg(c), bundle(b), seed_base(seed) {
        cfg.strategy = StrategyKind::AdaptiveThreatIntel;
        cfg.horizon = std::min(cfg.horizon, cfg.rl.max_steps_per_episode);
    }
};

PatchGameEnv::PatchGameEnv(const SimulationConfig& cfg, const ScenarioBundle& bundle,
                           uint64_t seed)
    : impl_(std::make_unique<Impl>(cfg, bundle, seed)) {}

PatchGameEnv::~PatchGameEnv() = default;

RlState PatchGameEnv::reset() {
    impl_->ctx = std::make_unique<RunContext>(impl_->cfg, impl_->bundle,
                                              Rng::mix(impl_->seed_base, impl_->episode));
    ++impl_->episode;
    impl_->patches_total = 0;
    return impl_->ctx->rl_state();
}

int PatchGameEnv::action_count() const {
    return static_cast<int>(default_weight_configs().size());
}

RlEnvironment::StepResult PatchGameEnv::step(int action) {
    const auto& configs = default_weight_configs();
    const int idx = std::clamp(action, 0, static_cast<int>(configs.size()) - 1);
    auto outcome = impl_->ctx->step(&configs[static_cast<std::size_t>(idx)]);
    impl_->patches_total += outcome.patches_applied;

    RewardSnapshot snap;
    snap.preserved_value = impl_->ctx->preserved_value();
    snap.total_business_value = impl_->bundle.system.total_business_value();
    snap.cumulative_patch_cost = impl_->ctx->total_patch_cost();
    snap.patches_applied = outcome.patches_applied;
    snap.per_step_limit = impl_->cfg.patch_limit_per_step;
    snap.unpatched_critical = impl_->ctx->high_risk_count();
    snap.initial_critical = impl_->ctx->initial_critical();
    snap.external_threat_level = impl_->ctx->scores().external_level;

    StepResult result;
    result.reward = compute_reward(snap, impl_->cfg.rl);
    result.state = impl_->ctx->rl_state();
    result.done = impl_->ctx->finished();
    return result;
}

void PatchGameEnv::fill_episode_stats(EpisodeStats& stats) const {
    if (impl_->ctx == nullptr) return;
    const double total = impl_->bundle.system.total_business_value();
    stats.final_value_fraction =
        total > 0.0 ? impl_->ctx->preserved_value() / total : 0.0;
    const double cost = std::max(impl_->ctx->total_patch_cost(), 1.0);
    stats.roi = impl_->ctx->preserved_value() / cost;
    stats.compromised_assets = impl_->ctx->metrics().compromised_assets;
}

std::pair<QTable, TrainingSummary> train_on_scenario(const SimulationConfig& cfg,
                                                     const ScenarioBundle& bundle,
                                                     int episodes, uint64_t seed) {
    auto factory = [&cfg, &bundle, seed]() {
        return std::make_unique<PatchGameEnv>(cfg, bundle, Rng::mix(seed, 0xE0));
    };
    return train(factory, episodes, seed, cfg.rl);
}

} // namespace patchgame
