#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "patchgame/game_state.hpp"
#include "patchgame/system_model.hpp"
#include "patchgame/taxonomy.hpp"
#include "patchgame/threat_intel.hpp"

namespace patchgame {

enum class NodeType { Entry, Asset, Vulnerability };

struct GraphNode {
    std::string id; // entry id, asset id, or "vuln:asset:component" triple
    NodeType type = NodeType::Asset;
    // Asset nodes
    int compromise = 0;           // mirror of s_comp
    std::vector<CkcStage> stages; // stages its vulnerabilities map to
    // Vulnerability nodes
    std::string vuln_id;
    std::string asset_id;
    std::string component_id;
    double cvss = 0.0;
    double epss = 0.0;
    bool exploit_available = false;
};

enum class EdgeKind { Reconnaissance, Exploit, Lateral };

struct GraphEdge {
    std::string src;
    std::string dst;
    EdgeKind kind = EdgeKind::Exploit;
    std::string technique; // technique id, determines the tactic
    Tactic tactic = Tactic::Execution;
    // Exploit edges only: the targeted vulnerability/asset.
    std::string vuln_id;
    std::string asset_id; // asset whose compromise the edge advances
    double probability = 0.0; // cached weight from the last state update
    double cost = 0.0;        // attack cost for taking this edge
};

struct TacticStats {
    int attempts = 0;
    int successes = 0;
};

struct EdgeProbabilityParams {
    // Multiplier when the edge tactic's stage disagrees with the current
    // kill-chain stage.
    double stage_misalignment_factor = 0.7;
};

class AttackGraph {
public:
    std::vector<GraphNode> nodes; // deterministic construction order
    std::vector<GraphEdge> edges;
    EdgeProbabilityParams params;

    const GraphNode* find_node(const std::string& id) const;
    std::vector<const GraphEdge*> edges_from(const std::string& node_id) const;
    std::vector<const GraphEdge*> exploit_edges_into(const std::string& vuln_id) const;
    const GraphEdge* find_exploit_edge(const std::string& asset_id, const std::string& vuln_id,
                                       const std::string& technique) const;
    const GraphEdge* find_lateral_edge(const std::string& src_asset,
                                       const std::string& dst_asset) const;
    const GraphEdge* find_recon_edge(const std::string& entry_id,
                                     const std::string& asset_id) const;

    // Running per-tactic success ratio with Laplace smoothing,
    // (successes + 1) / (attempts + 2); starts at 1/2.
    double tactic_success_ratio(Tactic t) const;
    void record_tactic_outcome(Tactic t, bool success);

    std::array<TacticStats, kTacticCount> tactic_stats{};
};

// Builds the graph from the system: entry nodes, asset nodes, one
// vulnerability node per (vuln, asset, component), reconnaissance edges
// from entries, exploit edges per mapped tactic, lateral edges per asset
// edge. Vulnerabilities with no technique mapping get a default Execution
// technique so they remain exploitable.
AttackGraph build_graph(const SystemModel& system, const ThreatScores& scores,
                        const CtiCorpus& corpus);

// Current probability of an edge given the game state. Pure in
// (edge, state, scores, tactic stats).
double edge_probability(const AttackGraph& graph, const GraphEdge& edge,
                        const GameState& state, const ThreatScores& scores,
                        const SystemModel& system, const CtiCorpus& corpus);

// Recomputes all cached edge probabilities and mirrors compromise flags
// onto asset nodes. Idempotent for identical state.
void apply_state_update(AttackGraph& graph, const GameState& state, const ThreatScores& scores,
                        const SystemModel& system, const CtiCorpus& corpus);

// Node/edge listing for offline inspection (tab-separated).
std::string dump_graph(const AttackGraph& graph);

std::string vuln_node_id(const std::string& vuln_id, const std::string& asset_id,
                         const std::string& component_id);

} // namespace patchgame
