#include "patchgame/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <stdexcept>

namespace patchgame {

GameState initial_state(const SystemModel& system) {
    GameState s;
    for (const auto& v : system.vulnerabilities) s.patch[v.id] = v.patched ? 1 : 0;
    for (const auto& a : system.assets) s.comp[a.id] = 0;
    return s;
}

double effective_detection_prob(const SystemModel& system, const GameState& state,
                                const std::string& asset_id) {
    double miss = 1.0 - system.detection_prob(asset_id);
    auto it = state.deployed_detection.find(asset_id);
    if (it != state.deployed_detection.end()) miss *= (1.0 - it->second);
    return 1.0 - miss;
}

std::map<std::string, double> betweenness_centrality(const SystemModel& system) {
    // Undirected projection: asset edges plus pairs of assets whose hosts
    // are connected.
    std::map<std::string, std::set<std::string>> adj;
    for (const auto& a : system.assets) adj[a.id];
    auto connect = [&](const std::string& x, const std::string& y) {
        if (x == y) return;
        adj[x].insert(y);
        adj[y].insert(x);
    };
    for (const auto& [src, dst] : system.asset_edges) connect(src, dst);
    for (const auto& [hs, hd] : system.host_edges) {
        for (const auto& ai : system.assets) {
            if (ai.host_id != hs) continue;
            for (const auto& aj : system.assets) {
                if (aj.host_id == hd) connect(ai.id, aj.id);
            }
        }
    }

    std::vector<std::string> ids;
    for (const auto& a : system.assets) ids.push_back(a.id);
    std::map<std::string, double> bc;
    for (const auto& id : ids) bc[id] = 0.0;

    // Brandes accumulation over unweighted shortest paths.
    for (const auto& s : ids) {
        std::vector<std::string> order;
        std::map<std::string, std::vector<std::string>> pred;
        std::map<std::string, double> sigma;
        std::map<std::string, int> dist;
        for (const auto& id : ids) {
            sigma[id] = 0.0;
            dist[id] = -1;
        }
        sigma[s] = 1.0;
        dist[s] = 0;
        std::deque<std::string> queue{s};
        while (!queue.empty()) {
            std::string v = queue.front();
            queue.pop_front();
            order.push_back(v);
            for (const auto& w : adj[v]) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if (dist[w] == dist[v] + 1) {
                    sigma[w] += sigma[v];
                    pred[w].push_back(v);
                }
            }
        }
        std::map<std::string, double> delta;
        for (const auto& id : ids) delta[id] = 0.0;
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const std::string& w = *it;
            for (const auto& v : pred[w]) {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if (w != s) bc[w] += delta[w];
        }
    }
    // Undirected graph: every pair counted twice.
    for (auto& [id, val] : bc) val /= 2.0;
    return bc;
}

namespace {

// Directed reachability graph for path-exposure features: entries reach
// their targets, assets reach asset-edge successors.
struct PathGraph {
    std::map<std::string, std::vector<std::string>> adj;
    std::vector<std::string> entries;
};

PathGraph build_path_graph(const SystemModel& system) {
    PathGraph g;
    for (const auto& e : system.entry_points) {
        g.entries.push_back(e.id);
        g.adj[e.id] = e.targets;
    }
    for (const auto& [src, dst] : system.asset_edges) g.adj[src].push_back(dst);
    for (auto& [k, v] : g.adj) std::sort(v.begin(), v.end());
    return g;
}

// One BFS shortest path (deterministic by sorted adjacency), empty when
// unreachable.
std::vector<std::string> shortest_path(const PathGraph& g, const std::string& from,
                                       const std::string& to) {
    std::map<std::string, std::string> parent;
    std::deque<std::string> queue{from};
    std::set<std::string> seen{from};
    while (!queue.empty()) {
        std::string v = queue.front();
        queue.pop_front();
        if (v == to) break;
        auto it = g.adj.find(v);
        if (it == g.adj.end()) continue;
        for (const auto& w : it->second) {
            if (seen.insert(w).second) {
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    if (seen.count(to) == 0) return {};
    std::vector<std::string> path;
    for (std::string v = to; v != from; v = parent[v]) path.push_back(v);
    path.push_back(from);
    std::reverse(path.begin(), path.end());
    return path;
}

} // namespace

FeatureBasis compute_feature_basis(const SystemModel& system) {
    FeatureBasis basis;
    basis.max_business_value = system.max_business_value();

    auto bc = betweenness_centrality(system);
    double max_bc = 0.0;
    for (const auto& [id, val] : bc) max_bc = std::max(max_bc, val);
    for (const auto& [id, val] : bc) {
        basis.centrality[id] = max_bc > 0.0 ? val / max_bc : 0.0;
    }

    // Exposure on shortest entry -> high-value-asset paths.
    const double high_value = 0.7 * basis.max_business_value;
    PathGraph pg = build_path_graph(system);
    std::map<std::string, double> asset_count, vuln_count;
    for (const auto& a : system.assets) asset_count[a.id] = 0.0;
    for (const auto& v : system.vulnerabilities) vuln_count[v.id] = 0.0;
    for (const auto& entry : pg.entries) {
        for (const auto& a : system.assets) {
            if (a.business_value < high_value || a.business_value <= 0.0) continue;
            for (const auto& node : shortest_path(pg, entry, a.id)) {
                auto it = asset_count.find(node);
                if (it == asset_count.end()) continue; // entry node
                it->second += 1.0;
                for (const auto* v : system.vulnerabilities_on_asset(node)) {
                    vuln_count[v->id] += 1.0;
                }
            }
        }
    }
    double max_asset = 0.0, max_vuln = 0.0;
    for (const auto& [id, c] : asset_count) max_asset = std::max(max_asset, c);
    for (const auto& [id, c] : vuln_count) max_vuln = std::max(max_vuln, c);
    for (const auto& [id, c] : asset_count) {
        basis.asset_path_exposure[id] = max_asset > 0.0 ? c / max_asset : 0.0;
    }
    for (const auto& [id, c] : vuln_count) {
        basis.vuln_path_frequency[id] = max_vuln > 0.0 ? c / max_vuln : 0.0;
    }
    return basis;
}

FeatureVector compute_feature_vector(const SystemModel& system, const GameState& state,
                                     const ThreatScores& scores, int window,
                                     const FeatureBasis& basis) {
    FeatureVector phi;
    for (const auto& v : system.vulnerabilities) {
        phi.vuln_criticality[v.id] = (v.cvss / 10.0) * basis.vuln_path_frequency.at(v.id);
    }
    for (const auto& a : system.assets) {
        phi.asset_criticality[a.id] = a.criticality * basis.asset_path_exposure.at(a.id);
        phi.network_centrality[a.id] = basis.centrality.at(a.id);
        phi.business_value_norm[a.id] =
            basis.max_business_value > 0.0 ? a.business_value / basis.max_business_value : 0.0;
        phi.recent_exploit_attempts[a.id] = 0;
    }

    const int cutoff = state.step - window;
    phi.recent_patches.assign(system.vulnerabilities.size(), 0);
    for (const auto& h : state.history) {
        if (h.step < cutoff) continue;
        if (h.kind == HistoryEntry::Kind::Patch) {
            for (std::size_t i = 0; i < system.vulnerabilities.size(); ++i) {
                if (system.vulnerabilities[i].id == h.vuln_id) phi.recent_patches[i] = 1;
            }
        } else if (h.kind == HistoryEntry::Kind::ExploitAttempt ||
                   h.kind == HistoryEntry::Kind::MoveAttempt) {
            auto it = phi.recent_exploit_attempts.find(h.asset_id);
            if (it != phi.recent_exploit_attempts.end()) ++it->second;
        }
    }
    phi.external_threat_level = scores.external_level;
    return phi;
}

namespace {

[[noreturn]] void illegal(const std::string& msg) { throw std::invalid_argument(msg); }

double action_cost(const AttackerAction& action, const SystemModel& system,
                   const CostParams& costs, const EngineParams& ep) {
    switch (action.kind) {
        case AttackerAction::Kind::Exploit: {
            const Vulnerability* v = system.find_vulnerability(action.vuln_id);
            const Asset* a = system.find_asset(action.asset_id);
            if (v == nullptr || a == nullptr) return 0.0;
            Tactic t = technique_tactic(action.technique).value_or(Tactic::Execution);
            return attack_cost(*v, *a, t, costs).total;
        }
        case AttackerAction::Kind::Move: return ep.move_cost;
        case AttackerAction::Kind::Scan: return ep.scan_cost;
        case AttackerAction::Kind::Prepare: return ep.prepare_cost;
        case AttackerAction::Kind::Idle: return 0.0;
    }
    return 0.0;
}

} // namespace

TransitionResult transition(const GameState& state, const AttackerAction& attacker_action,
                            const std::vector<DefenderAction>& defender_actions,
                            const SystemModel& system, AttackGraph& graph,
                            const ThreatScores& scores, const CtiCorpus& corpus,
                            const EngineParams& params, const CostParams& costs,
                            const FeatureBasis& basis, const ScoreProvider& fresh_scores,
                            Rng& rng) {
    TransitionResult result;
    GameState next = state;

    // (1) Patch status from defender actions.
    for (const auto& d : defender_actions) {
        switch (d.kind) {
            case DefenderAction::Kind::Patch: {
                const Vulnerability* v = system.find_vulnerability(d.vuln_id);
                if (v == nullptr) illegal("patching unknown vulnerability: " + d.vuln_id);
                const Asset* a = system.find_asset(d.asset_id);
                if (a == nullptr) illegal("patching on unknown asset: " + d.asset_id);
                if (next.patch[d.vuln_id] == 0) {
                    next.patch[d.vuln_id] = 1;
                    result.defender_spend += patch_cost_for(system, *v, *a, costs).total;
                    next.history.push_back({state.step, HistoryEntry::Kind::Patch, d.asset_id,
                                            d.vuln_id, "", true});
                }
                break;
            }
            case DefenderAction::Kind::Deploy: {
                if (system.find_asset(d.asset_id) == nullptr)
                    illegal("deploying on unknown asset: " + d.asset_id);
                double& cur = next.deployed_detection[d.asset_id];
                const double add =
                    d.detection_prob > 0.0 ? d.detection_prob : params.deploy_detection_prob;
                cur = 1.0 - (1.0 - cur) * (1.0 - add);
                result.defender_spend += params.deploy_cost;
                next.history.push_back(
                    {state.step, HistoryEntry::Kind::Deploy, d.asset_id, "", "", true});
                break;
            }
            case DefenderAction::Kind::Reset: {
                const Asset* a = system.find_asset(d.asset_id);
                if (a == nullptr) illegal("resetting unknown asset: " + d.asset_id);
                next.comp[d.asset_id] = 0;
                result.defender_spend += params.reset_cost_fraction * a->business_value;
                next.history.push_back(
                    {state.step, HistoryEntry::Kind::Reset, d.asset_id, "", "", true});
                break;
            }
        }
    }

    // (2) Compromise outcome of the attacker action, sampled against the
    // post-patch edge probability.
    bool attempted = false;
    bool success = false;
    std::string target_asset;
    switch (attacker_action.kind) {
        case AttackerAction::Kind::Exploit: {
            const Vulnerability* v = system.find_vulnerability(attacker_action.vuln_id);
            const Asset* a = system.find_asset(attacker_action.asset_id);
            if (v == nullptr) illegal("exploiting unknown vulnerability: " + attacker_action.vuln_id);
            if (a == nullptr) illegal("exploiting unknown asset: " + attacker_action.asset_id);
            const GraphEdge* edge =
                graph.find_exploit_edge(a->id, v->id, attacker_action.technique);
            if (edge == nullptr) {
                edge = graph.find_exploit_edge(a->id, v->id, "");
            }
            if (edge == nullptr) illegal("no exploit path for " + v->id + " on " + a->id);

            const double p = edge_probability(graph, *edge, next, scores, system, corpus);
            success = rng.bernoulli(p);
            attempted = true;
            target_asset = a->id;

            AttemptEvent ev;
            ev.step = state.step;
            ev.action = attacker_action;
            ev.tactic = edge->tactic;
            ev.success = success;
            ev.success_probability = p;
            if (success) next.comp[a->id] = std::min(next.comp[a->id] + 1, 2);
            ev.achieved_level = next.comp[a->id];
            result.attempt = ev;

            graph.record_tactic_outcome(edge->tactic, success);
            next.history.push_back({state.step, HistoryEntry::Kind::ExploitAttempt, a->id,
                                    v->id, edge->technique, success});
            next.attack_recency[a->id] = state.step;
            break;
        }
        case AttackerAction::Kind::Move: {
            const Asset* src = system.find_asset(attacker_action.src_asset_id);
            const Asset* dst = system.find_asset(attacker_action.asset_id);
            if (src == nullptr || dst == nullptr)
                illegal("lateral movement on unknown asset");
            const GraphEdge* edge = graph.find_lateral_edge(src->id, dst->id);
            if (edge == nullptr)
                illegal("no lateral edge " + src->id + " -> " + dst->id);
            const double p = edge_probability(graph, *edge, next, scores, system, corpus);
            success = rng.bernoulli(p);
            attempted = true;
            target_asset = dst->id;

            AttemptEvent ev;
            ev.step = state.step;
            ev.action = attacker_action;
            ev.tactic = edge->tactic;
            ev.success = success;
            ev.success_probability = p;
            if (success) next.comp[dst->id] = std::min(next.comp[dst->id] + 1, 2);
            ev.achieved_level = next.comp[dst->id];
            result.attempt = ev;

            graph.record_tactic_outcome(edge->tactic, success);
            next.history.push_back({state.step, HistoryEntry::Kind::MoveAttempt, dst->id, "",
                                    edge->technique, success});
            next.attack_recency[dst->id] = state.step;
            break;
        }
        case AttackerAction::Kind::Scan: {
            const Asset* a = system.find_asset(attacker_action.asset_id);
            if (a == nullptr) illegal("scanning unknown asset: " + attacker_action.asset_id);
            const GraphEdge* edge = nullptr;
            for (const auto& ep : system.entry_points) {
                edge = graph.find_recon_edge(ep.id, a->id);
                if (edge != nullptr) break;
            }
            double p;
            if (edge != nullptr) {
                p = edge_probability(graph, *edge, next, scores, system, corpus);
            } else {
                p = scores.relevance(a->id) *
                    (1.0 - effective_detection_prob(system, next, a->id) * next.det);
                p = std::clamp(p, 0.0, 1.0);
            }
            success = rng.bernoulli(p);
            attempted = true;
            target_asset = a->id;

            const Tactic scan_tactic =
                technique_tactic(attacker_action.technique).value_or(Tactic::Reconnaissance);
            AttemptEvent ev;
            ev.step = state.step;
            ev.action = attacker_action;
            ev.tactic = scan_tactic;
            ev.success = success;
            ev.success_probability = p;
            ev.achieved_level = next.comp[a->id];
            result.attempt = ev;

            graph.record_tactic_outcome(scan_tactic, success);
            next.history.push_back({state.step, HistoryEntry::Kind::Scan, a->id, "",
                                    attacker_action.technique, success});
            break;
        }
        case AttackerAction::Kind::Prepare: {
            success = true;
            AttemptEvent ev;
            ev.step = state.step;
            ev.action = attacker_action;
            ev.tactic = Tactic::ResourceDevelopment;
            ev.success = true;
            ev.success_probability = 1.0;
            result.attempt = ev;
            graph.record_tactic_outcome(Tactic::ResourceDevelopment, true);
            next.history.push_back(
                {state.step, HistoryEntry::Kind::Prepare, "", "", "T1587", true});
            attempted = true;
            break;
        }
        case AttackerAction::Kind::Idle: break;
    }
    result.attacker_spend = action_cost(attacker_action, system, costs, params);

    // (3) Detection confidence.
    double det = next.det;
    if (attempted && !target_asset.empty()) {
        det += effective_detection_prob(system, next, target_asset);
    }
    det -= params.det_decay * next.det;
    next.det = std::clamp(det, 0.0, 1.0);

    // (4) Kill-chain stage: advance on success, fall back on failure.
    if (attempted) {
        const int k = static_cast<int>(next.k);
        if (success) {
            next.k = static_cast<CkcStage>(std::min(k + 1, kStageCount - 1));
        } else if (next.k < CkcStage::Exploitation) {
            next.k = CkcStage::Reconnaissance;
        } else {
            next.k = static_cast<CkcStage>(std::max(k - 1, 0));
        }
    }

    next.step = state.step + 1;

    // (5) Feature vector from fresh threat scores.
    const ThreatScores updated = fresh_scores(next);
    next.phi = compute_feature_vector(system, next, updated, params.recency_window, basis);

    result.state = std::move(next);
    return result;
}

double attacker_payoff(const GameState& state, const AttackerAction& action,
                       const SystemModel& system, const CostParams& costs,
                       const PayoffParams& pp, const EngineParams& ep) {
    double reward = 0.0;
    for (const auto& a : system.assets) {
        reward += (static_cast<double>(state.comp_level(a.id)) / 2.0) * a.business_value;
    }
    return reward - action_cost(action, system, costs, ep) - pp.c_det * state.det;
}

double defender_payoff(const GameState& state, const std::vector<DefenderAction>& actions,
                       const SystemModel& system, const CostParams& costs,
                       const PayoffParams& pp, const EngineParams& ep) {
    double penalty = 0.0;
    for (const auto& a : system.assets) {
        penalty += (static_cast<double>(state.comp_level(a.id)) / 2.0) * a.business_value;
    }
    double defense_cost = 0.0;
    for (const auto& d : actions) {
        switch (d.kind) {
            case DefenderAction::Kind::Patch: {
                const Vulnerability* v = system.find_vulnerability(d.vuln_id);
                const Asset* a = system.find_asset(d.asset_id);
                if (v != nullptr && a != nullptr)
                    defense_cost += patch_cost_for(system, *v, *a, costs).total;
                break;
            }
            case DefenderAction::Kind::Deploy: defense_cost += ep.deploy_cost; break;
            case DefenderAction::Kind::Reset: {
                const Asset* a = system.find_asset(d.asset_id);
                if (a != nullptr) defense_cost += ep.reset_cost_fraction * a->business_value;
                break;
            }
        }
    }
    return -penalty - pp.psi * defense_cost;
}

const std::string& verdict_name(Verdict v) {
    static const std::string names[] = {"continue", "budget_exhausted", "all_patched",
                                        "horizon", "break_even"};
    return names[static_cast<int>(v)];
}

Verdict check_termination(const GameState& state, double defender_spent, double attacker_spent,
                          const Budgets& budgets, int horizon, const SystemModel& system) {
    (void)attacker_spent; // gates action selection, not termination
    if (budgets.defender > 0.0 && defender_spent >= budgets.defender)
        return Verdict::BudgetExhausted;

    bool all_patched = !system.vulnerabilities.empty();
    for (const auto& v : system.vulnerabilities) {
        if (state.patch_state(v.id) == 0) {
            all_patched = false;
            break;
        }
    }
    if (all_patched) return Verdict::AllPatched;

    if (state.step >= horizon) return Verdict::Horizon;

    double residual = 0.0;
    for (const auto& a : system.assets) {
        if (state.comp_level(a.id) == 0) residual += a.business_value;
    }
    if (defender_spent > residual) return Verdict::BreakEven;

    return Verdict::Continue;
}

} // namespace patchgame
