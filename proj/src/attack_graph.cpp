#include "patchgame/attack_graph.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "patchgame/cost_model.hpp"

namespace patchgame {

namespace {
// Fallback technique for vulnerabilities the corpus cannot map.
constexpr const char* kDefaultTechnique = "T1203";
constexpr const char* kReconTechnique = "T1595";
constexpr const char* kLateralTechnique = "T1021";
} // namespace

const GraphNode* AttackGraph::find_node(const std::string& id) const {
    for (const auto& n : nodes) {
        if (n.id == id) return &n;
    }
    return nullptr;
}

std::vector<const GraphEdge*> AttackGraph::edges_from(const std::string& node_id) const {
    std::vector<const GraphEdge*> out;
    for (const auto& e : edges) {
        if (e.src == node_id) out.push_back(&e);
    }
    return out;
}

std::vector<const GraphEdge*> AttackGraph::exploit_edges_into(const std::string& vuln_id) const {
    std::vector<const GraphEdge*> out;
    for (const auto& e : edges) {
        if (e.kind == EdgeKind::Exploit && e.vuln_id == vuln_id) out.push_back(&e);
    }
    return out;
}

const GraphEdge* AttackGraph::find_exploit_edge(const std::string& asset_id,
                                                const std::string& vuln_id,
                                                const std::string& technique) const {
    for (const auto& e : edges) {
        if (e.kind == EdgeKind::Exploit && e.asset_id == asset_id && e.vuln_id == vuln_id &&
            (technique.empty() || e.technique == technique)) {
            return &e;
        }
    }
    return nullptr;
}

const GraphEdge* AttackGraph::find_lateral_edge(const std::string& src_asset,
                                                const std::string& dst_asset) const {
    for (const auto& e : edges) {
        if (e.kind == EdgeKind::Lateral && e.src == src_asset && e.dst == dst_asset) return &e;
    }
    return nullptr;
}

const GraphEdge* AttackGraph::find_recon_edge(const std::string& entry_id,
                                              const std::string& asset_id) const {
    for (const auto& e : edges) {
        if (e.kind == EdgeKind::Reconnaissance && e.src == entry_id && e.dst == asset_id)
            return &e;
    }
    return nullptr;
}

double AttackGraph::tactic_success_ratio(Tactic t) const {
    const auto& s = tactic_stats[static_cast<int>(t)];
    return (s.successes + 1.0) / (s.attempts + 2.0);
}

void AttackGraph::record_tactic_outcome(Tactic t, bool success) {
    auto& s = tactic_stats[static_cast<int>(t)];
    ++s.attempts;
    if (success) ++s.successes;
}

std::string vuln_node_id(const std::string& vuln_id, const std::string& asset_id,
                         const std::string& component_id) {
    return vuln_id + ":" + asset_id + ":" + component_id;
}

AttackGraph build_graph(const SystemModel& system, const ThreatScores& scores,
                        const CtiCorpus& corpus) {
    AttackGraph g;

    for (const auto& e : system.entry_points) {
        GraphNode n;
        n.id = e.id;
        n.type = NodeType::Entry;
        g.nodes.push_back(std::move(n));
    }
    for (const auto& a : system.assets) {
        GraphNode n;
        n.id = a.id;
        n.type = NodeType::Asset;
        std::set<CkcStage> stages;
        for (const auto* v : system.vulnerabilities_on_asset(a.id)) {
            for (Tactic t : mapped_tactics(*v, corpus)) stages.insert(tactic_to_stage(t));
        }
        n.stages.assign(stages.begin(), stages.end());
        g.nodes.push_back(std::move(n));
    }

    auto add_exploit_edge = [&](const Asset& a, const Vulnerability& v,
                                const std::string& technique) {
        GraphEdge e;
        e.src = a.id;
        e.dst = vuln_node_id(v.id, a.id, v.component_id);
        e.kind = EdgeKind::Exploit;
        e.technique = technique;
        e.tactic = technique_tactic(technique).value_or(Tactic::Execution);
        e.vuln_id = v.id;
        e.asset_id = a.id;
        e.cost = attack_cost(v, a, e.tactic, CostParams{}).total;
        g.edges.push_back(std::move(e));
    };

    for (const auto& a : system.assets) {
        for (const auto* v : system.vulnerabilities_on_asset(a.id)) {
            GraphNode n;
            n.id = vuln_node_id(v->id, a.id, v->component_id);
            n.type = NodeType::Vulnerability;
            n.vuln_id = v->id;
            n.asset_id = a.id;
            n.component_id = v->component_id;
            n.cvss = v->cvss;
            n.epss = v->epss;
            n.exploit_available = v->exploit_available;
            g.nodes.push_back(std::move(n));

            auto ttps = map_vuln_to_ttps(*v, corpus);
            std::vector<std::string> usable;
            for (const auto& t : ttps) {
                if (technique_tactic(t)) usable.push_back(t);
            }
            if (usable.empty()) usable.push_back(kDefaultTechnique);
            for (const auto& t : usable) add_exploit_edge(a, *v, t);
        }
    }

    for (const auto& ep : system.entry_points) {
        for (const auto& target : ep.targets) {
            GraphEdge e;
            e.src = ep.id;
            e.dst = target;
            e.kind = EdgeKind::Reconnaissance;
            e.technique = kReconTechnique;
            e.tactic = Tactic::Reconnaissance;
            e.asset_id = target;
            g.edges.push_back(std::move(e));
        }
    }
    for (const auto& [src, dst] : system.asset_edges) {
        GraphEdge e;
        e.src = src;
        e.dst = dst;
        e.kind = EdgeKind::Lateral;
        e.technique = kLateralTechnique;
        e.tactic = Tactic::LateralMovement;
        e.asset_id = dst;
        g.edges.push_back(std::move(e));
    }

    GameState fresh = initial_state(system);
    apply_state_update(g, fresh, scores, system, corpus);
    return g;
}

double edge_probability(const AttackGraph& graph, const GraphEdge& edge, const GameState& state,
                        const ThreatScores& scores, const SystemModel& system,
                        const CtiCorpus& corpus) {
    double p = 0.0;
    switch (edge.kind) {
        case EdgeKind::Exploit: {
            p = scores.likelihood(edge.vuln_id);
            p *= (1.0 - static_cast<double>(state.patch_state(edge.vuln_id)));
            // CWE chaining: a sibling vulnerability whose weakness can
            // precede this one scales the edge by both likelihoods.
            const Vulnerability* tgt = system.find_vulnerability(edge.vuln_id);
            if (tgt != nullptr && !corpus.cwe_canfollow.empty()) {
                double best = 0.0;
                bool chained = false;
                for (const auto* sib : system.vulnerabilities_on_asset(edge.asset_id)) {
                    if (sib->id == edge.vuln_id) continue;
                    for (const auto& src_cwe : sib->cwe_ids) {
                        for (const auto& dst_cwe : tgt->cwe_ids) {
                            if (corpus.can_follow(src_cwe, dst_cwe)) {
                                chained = true;
                                best = std::max(best, scores.likelihood(sib->id));
                            }
                        }
                    }
                }
                if (chained) p *= best * scores.likelihood(edge.vuln_id);
            }
            break;
        }
        case EdgeKind::Lateral: {
            p = scores.relevance(edge.asset_id);
            if (state.comp_level(edge.src) == 0) p = 0.0;
            break;
        }
        case EdgeKind::Reconnaissance: {
            p = scores.relevance(edge.asset_id);
            break;
        }
    }

    p *= (1.0 - effective_detection_prob(system, state, edge.asset_id) * state.det);

    // Per-tactic empirical success, normalized so a fresh history is
    // neutral (ratio / prior of 1/2) and bounded so a long failure streak
    // cannot zero the tactic out entirely.
    p *= std::clamp(graph.tactic_success_ratio(edge.tactic) / 0.5, 0.5, 1.5);

    if (tactic_to_stage(edge.tactic) != state.k) p *= graph.params.stage_misalignment_factor;

    return std::clamp(p, 0.0, 1.0);
}

void apply_state_update(AttackGraph& graph, const GameState& state, const ThreatScores& scores,
                        const SystemModel& system, const CtiCorpus& corpus) {
    for (auto& n : graph.nodes) {
        if (n.type == NodeType::Asset) n.compromise = state.comp_level(n.id);
    }
    for (auto& e : graph.edges) {
        e.probability = edge_probability(graph, e, state, scores, system, corpus);
    }
}

std::string dump_graph(const AttackGraph& graph) {
    std::ostringstream out;
    out << "node\ttype\tcompromise\n";
    for (const auto& n : graph.nodes) {
        const char* type = n.type == NodeType::Entry      ? "entry"
                           : n.type == NodeType::Asset    ? "asset"
                                                          : "vulnerability";
        out << n.id << '\t' << type << '\t' << n.compromise << '\n';
    }
    out << "src\tdst\tkind\ttechnique\ttactic\tprobability\tcost\n";
    for (const auto& e : graph.edges) {
        const char* kind = e.kind == EdgeKind::Exploit ? "exploit"
                           : e.kind == EdgeKind::Lateral ? "lateral"
                                                         : "recon";
        out << e.src << '\t' << e.dst << '\t' << kind << '\t' << e.technique << '\t'
            << tactic_name(e.tactic) << '\t' << e.probability << '\t' << e.cost << '\n';
    }
    return out.str();
}

} // namespace patchgame
