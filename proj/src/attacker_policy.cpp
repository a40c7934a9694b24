#include "patchgame/attacker_policy.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "patchgame/threat_intel.hpp"

namespace patchgame {

double frustration_penalty(int failures, const ExploitabilityParams& p) {
    return std::min(p.eta_slope * static_cast<double>(failures), p.eta_cap);
}

double tactic_fit(Tactic t, const Vulnerability& v, const CtiCorpus& corpus) {
    const auto tactics = mapped_tactics(v, corpus);
    if (std::find(tactics.begin(), tactics.end(), t) != tactics.end()) return 1.0;
    const CkcStage stage = tactic_to_stage(t);
    for (Tactic mt : tactics) {
        if (tactic_to_stage(mt) == stage) return 0.5;
    }
    return 0.2;
}

double exploitability(const Vulnerability& v, const Asset& a, Tactic t,
                      const AttackerBelief& belief, int failure_count, double likelihood,
                      const ExploitabilityParams& p, const RiskParams& risk,
                      const CostParams& costs, const CtiCorpus& corpus) {
    auto it = belief.patch.find(v.id);
    const double patch_belief = it == belief.patch.end() ? 0.0 : it->second;
    if (patch_belief > p.theta_patch || failure_count > p.theta_f) return p.epsilon;

    const double p_exploit =
        likelihood * (1.0 - patch_belief) * (1.0 - frustration_penalty(failure_count, p));
    const double expected_return = a.business_value * impact_fraction(v, risk) * p_exploit;
    const double ac = attack_cost(v, a, t, costs).total;
    if (ac == 0.0) throw std::invalid_argument("exploitability: attack cost is zero");
    const double roi = (expected_return - ac) / ac;

    double score = 1.0 / (1.0 + std::exp(-p.k_logistic * roi));
    score *= (1.0 - belief.det.mean()) * tactic_fit(t, v, corpus);
    return std::clamp(score, 0.0, 1.0);
}

std::vector<std::string> reachable_assets(const SystemModel& system, const AttackGraph& graph,
                                          const GameState& state) {
    std::set<std::string> reach;
    for (const auto& e : graph.edges) {
        if (e.kind == EdgeKind::Reconnaissance) reach.insert(e.dst);
    }
    for (const auto& a : system.assets) {
        if (state.comp_level(a.id) > 0) reach.insert(a.id);
    }
    for (const auto& e : graph.edges) {
        if (e.kind == EdgeKind::Lateral && state.comp_level(e.src) > 0) reach.insert(e.dst);
    }
    return {reach.begin(), reach.end()};
}

namespace {

struct Candidate {
    const GraphEdge* edge;
    const Vulnerability* vuln;
    const Asset* asset;
};

std::vector<Candidate> enumerate_candidates(Tactic tactic, const SystemModel& system,
                                            const AttackGraph& graph, const GameState& state,
                                            const AttackerBelief& belief) {
    const auto reach = reachable_assets(system, graph, state);
    std::vector<Candidate> out;
    for (const auto& e : graph.edges) {
        if (e.kind != EdgeKind::Exploit || e.tactic != tactic) continue;
        if (!std::binary_search(reach.begin(), reach.end(), e.asset_id)) continue;
        // Prune targets believed fully owned; nothing left to gain there.
        auto cit = belief.comp.find(e.asset_id);
        if (cit != belief.comp.end() && cit->second[2] > 0.9) continue;
        const Vulnerability* v = system.find_vulnerability(e.vuln_id);
        const Asset* a = system.find_asset(e.asset_id);
        if (v != nullptr && a != nullptr) out.push_back({&e, v, a});
    }
    return out;
}

} // namespace

Tactic select_tactic(const AttackerState& st, const SystemModel& system,
                     const AttackGraph& graph, const CtiCorpus& corpus,
                     const ThreatScores& scores, const GameState& state,
                     const ExploitabilityParams& p, const RiskParams& risk,
                     const CostParams& costs, Rng& rng) {
    (void)state;
    const auto stage_tactics = tactics_of_stage(st.stage);
    if (stage_tactics.empty()) throw std::invalid_argument("select_tactic: stage has no tactics");

    std::array<double, kTacticCount> tally{};
    std::array<bool, kTacticCount> scored{};
    for (const auto& e : graph.edges) {
        if (e.kind != EdgeKind::Exploit) continue;
        if (std::find(stage_tactics.begin(), stage_tactics.end(), e.tactic) ==
            stage_tactics.end())
            continue;
        if (st.in_cooldown(e.tactic)) continue;
        auto bit = st.belief.patch.find(e.vuln_id);
        const double patch_belief = bit == st.belief.patch.end() ? 0.0 : bit->second;
        if (patch_belief >= p.theta_patch) continue;
        const Vulnerability* v = system.find_vulnerability(e.vuln_id);
        const Asset* a = system.find_asset(e.asset_id);
        if (v == nullptr || a == nullptr) continue;
        const double s =
            exploitability(*v, *a, e.tactic, st.belief, st.failure_count(v->id),
                           scores.likelihood(v->id), p, risk, costs, corpus);
        tally[static_cast<int>(e.tactic)] += s;
        scored[static_cast<int>(e.tactic)] = true;
    }

    int best = -1;
    for (Tactic t : stage_tactics) {
        const int i = static_cast<int>(t);
        if (!scored[i]) continue;
        if (best < 0 || tally[i] > tally[best]) best = i;
    }
    if (best >= 0) return static_cast<Tactic>(best);

    // No scored candidates: uniformly random stage tactic, preferring
    // those not in cooldown.
    std::vector<Tactic> pool;
    for (Tactic t : stage_tactics) {
        if (!st.in_cooldown(t)) pool.push_back(t);
    }
    if (pool.empty()) pool = stage_tactics;
    return pool[rng.below(pool.size())];
}

std::optional<TargetChoice> select_target(const AttackerState& st, Tactic tactic,
                                          const SystemModel& system, const AttackGraph& graph,
                                          const CtiCorpus& corpus, const ThreatScores& scores,
                                          const GameState& state,
                                          const ExploitabilityParams& p, const RiskParams& risk,
                                          const CostParams& costs, Rng& rng) {
    const auto candidates = enumerate_candidates(tactic, system, graph, state, st.belief);
    if (candidates.empty()) return std::nullopt;

    std::vector<TargetChoice> choices;
    for (const auto& c : candidates) {
        double xi = exploitability(*c.vuln, *c.asset, tactic, st.belief,
                                   st.failure_count(c.vuln->id), scores.likelihood(c.vuln->id),
                                   p, risk, costs, corpus);
        xi *= std::pow(p.attempt_damping, st.attempt_count(c.asset->id, c.vuln->id));

        const auto cit = st.belief.comp.find(c.asset->id);
        const CompDist comp = cit == st.belief.comp.end() ? CompDist{1.0, 0.0, 0.0} : cit->second;
        double ev = 0.0;
        for (int level = 1; level <= 2; ++level) {
            ev += comp[level] * (static_cast<double>(level) / 2.0) * c.asset->business_value * xi;
        }
        choices.push_back({c.asset->id, c.vuln->id, c.edge->technique, ev, xi});
    }
    std::sort(choices.begin(), choices.end(), [](const TargetChoice& a, const TargetChoice& b) {
        if (a.expected_value != b.expected_value) return a.expected_value > b.expected_value;
        if (a.asset_id != b.asset_id) return a.asset_id < b.asset_id;
        if (a.vuln_id != b.vuln_id) return a.vuln_id < b.vuln_id;
        return a.technique < b.technique;
    });

    if (choices.size() > 1 && p.explore_rate > 0.0 && rng.uniform() < p.explore_rate) {
        // Diversify over the non-argmax candidates, proportional to EV.
        double total = 0.0;
        for (std::size_t i = 1; i < choices.size(); ++i) total += choices[i].expected_value;
        if (total <= 0.0) return choices[1 + rng.below(choices.size() - 1)];
        double ticket = rng.uniform() * total;
        for (std::size_t i = 1; i < choices.size(); ++i) {
            ticket -= choices[i].expected_value;
            if (ticket <= 0.0) return choices[i];
        }
        return choices.back();
    }
    return choices.front();
}

ExecuteResult execute_action(AttackerState& st, Tactic tactic,
                             const std::optional<TargetChoice>& target, bool success,
                             int achieved_level, double detection_truth, double likelihood,
                             const BeliefParams& bp, const ExploitabilityParams& p, Rng& rng) {
    const int ti = static_cast<int>(tactic);

    if (target.has_value()) {
        const std::string& vuln_id = target->vuln_id;
        const std::string& asset_id = target->asset_id;
        const int prior_failures = st.failure_count(vuln_id);
        auto bit = st.belief.patch.find(vuln_id);
        const double patch_belief = bit == st.belief.patch.end() ? 0.0 : bit->second;
        const double p_exploit = likelihood * (1.0 - patch_belief) *
                                 (1.0 - frustration_penalty(prior_failures, p));

        st.belief = attacker_observe(st.belief, asset_id, vuln_id, success ? 1 : 0,
                                     achieved_level, p_exploit, bp);
        ++st.attempts[{asset_id, vuln_id}];
        if (success) {
            st.failures[vuln_id] = 0;
            st.tactic_failures[ti] = 0;
        } else {
            ++st.failures[vuln_id];
            ++st.tactic_failures[ti];
        }
    } else if (!success) {
        ++st.tactic_failures[ti];
    }

    if (!success && st.tactic_failures[ti] >= p.cooldown_after) {
        st.cooldowns[ti] = p.cooldown_len;
        st.tactic_failures[ti] = 0;
    }

    const int k = static_cast<int>(st.stage);
    if (success) {
        st.stage = static_cast<CkcStage>(std::min(k + 1, kStageCount - 1));
    } else if (st.stage < CkcStage::Exploitation) {
        st.stage = CkcStage::Reconnaissance;
    } else {
        st.stage = static_cast<CkcStage>(std::max(k - 1, 0));
    }

    if (target.has_value() || success) {
        const int o = rng.bernoulli(detection_truth) ? 1 : 0;
        st.belief.det = update_detection(st.belief.det, o);
    }

    return {success ? 1 : 0, st.stage};
}

void apply_scan_result(AttackerState& st, const std::string& asset_id,
                       const SystemModel& system, const GameState& truth,
                       const BeliefParams& bp, Rng& rng) {
    for (const auto* v : system.vulnerabilities_on_asset(asset_id)) {
        const bool unpatched = truth.patch_state(v->id) == 0;
        const double p_signal = unpatched ? bp.scan_true_positive : bp.scan_false_positive;
        const int signal = rng.bernoulli(p_signal) ? 1 : 0;
        auto it = st.belief.patch.find(v->id);
        if (it != st.belief.patch.end()) {
            it->second = patch_belief_from_signal(it->second, signal, bp.scan_true_positive,
                                                  bp.scan_false_positive);
        }
    }
}

AttackerAction ScriptedAttacker::next_action(const SystemModel& system) const {
    if (exhausted()) return AttackerAction{};
    return scripted_next_action(index_, system);
}

void ScriptedAttacker::on_outcome(bool success) {
    if (success && !exhausted()) ++index_;
}

ScriptedAttacker default_campaign_script() {
    return ScriptedAttacker({"CVE-2017-7269", "CVE-2020-1938", "CVE-2017-0143", "CVE-2016-5743",
                             "CVE-2019-10922"});
}

AttackerAction scripted_next_action(int script_index, const SystemModel& system) {
    static const std::vector<std::string> kSequence = {
        "CVE-2017-7269", "CVE-2020-1938", "CVE-2017-0143", "CVE-2016-5743", "CVE-2019-10922"};
    AttackerAction a;
    if (script_index < 0 || script_index >= static_cast<int>(kSequence.size())) return a; // Idle
    const std::string& cve = kSequence[static_cast<std::size_t>(script_index)];
    const Vulnerability* v = system.find_vulnerability(cve);
    if (v == nullptr) return a;
    const auto hosts = system.assets_of_component(v->component_id);
    if (hosts.empty()) return a;
    a.kind = AttackerAction::Kind::Exploit;
    a.vuln_id = cve;
    a.asset_id = hosts.front()->id;
    return a;
}

} // namespace patchgame
