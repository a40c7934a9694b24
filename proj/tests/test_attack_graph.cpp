#include <doctest.h>

#include <algorithm>

#include "patchgame/attack_graph.hpp"
#include "patchgame/rng.hpp"
#include "test_fixtures.hpp"

using namespace patchgame;
namespace fx = patchgame::testing;

TEST_CASE("graph construction mirrors the entry/exploit/lateral layout") {
    auto w = fx::make_world(fx::mini_system(), fx::mini_corpus());

    // Entry, two assets, one vulnerability node.
    CHECK(w.graph.find_node("e") != nullptr);
    CHECK(w.graph.find_node("a_web") != nullptr);
    CHECK(w.graph.find_node("a_db") != nullptr);
    const GraphNode* vn = w.graph.find_node(vuln_node_id("CVE-2023-2868", "a_web", "c_web"));
    REQUIRE(vn != nullptr);
    CHECK(vn->type == NodeType::Vulnerability);
    CHECK(vn->cvss == doctest::Approx(9.8));

    CHECK(w.graph.find_recon_edge("e", "a_web") != nullptr);
    const GraphEdge* exploit = w.graph.find_exploit_edge("a_web", "CVE-2023-2868", "T1190");
    REQUIRE(exploit != nullptr);
    CHECK(exploit->tactic == Tactic::InitialAccess);
    const GraphEdge* lateral = w.graph.find_lateral_edge("a_web", "a_db");
    REQUIRE(lateral != nullptr);
    CHECK(lateral->tactic == Tactic::LateralMovement);

    // The chained execution technique from the CWE mapping also appears.
    CHECK(w.graph.find_exploit_edge("a_web", "CVE-2023-2868", "T1059") != nullptr);
}

TEST_CASE("an asset-only system yields one node and no edges") {
    SystemModel s;
    s.name = "single";
    s.hosts = {{"h", ""}};
    Asset a;
    a.id = "only";
    a.host_id = "h";
    a.business_value = 5.0;
    s.assets = {a};
    validate(s);
    auto w = fx::make_world(s, CtiCorpus{});
    CHECK(w.graph.nodes.size() == 1);
    CHECK(w.graph.edges.empty());
}

TEST_CASE("a vulnerability patched at load still gets a node") {
    SystemModel s = fx::mini_system();
    s.vulnerabilities.front().patched = true;
    auto w = fx::make_world(s, fx::mini_corpus());
    CHECK(w.graph.find_node(vuln_node_id("CVE-2023-2868", "a_web", "c_web")) != nullptr);
    // Structure is intact; the weight is what collapses.
    const GraphEdge* e = w.graph.find_exploit_edge("a_web", "CVE-2023-2868", "T1190");
    REQUIRE(e != nullptr);
    CHECK(edge_probability(w.graph, *e, w.state, w.scores, w.system, w.corpus) == 0.0);
}

TEST_CASE("unmapped vulnerabilities fall back to a default execution edge") {
    SystemModel s = fx::mini_system();
    s.vulnerabilities.front().cwe_ids = {"CWE-9999"};
    auto w = fx::make_world(s, CtiCorpus{}); // empty corpus: no mapping at all
    const GraphEdge* e = w.graph.find_exploit_edge("a_web", "CVE-2023-2868", "");
    REQUIRE(e != nullptr);
    CHECK(e->technique == "T1203");
}

TEST_CASE("edge probability reproduces the detection-dampening example") {
    SystemModel s = fx::mini_system();
    s.detection_mechanisms = {{"a_web", 0.5}};
    auto w = fx::make_world(s, fx::mini_corpus());

    w.scores.l["CVE-2023-2868"] = 0.6;
    w.state.det = 0.4;
    w.state.k = CkcStage::Delivery; // aligned with the InitialAccess edge

    const GraphEdge* e = w.graph.find_exploit_edge("a_web", "CVE-2023-2868", "T1190");
    REQUIRE(e != nullptr);
    CHECK(edge_probability(w.graph, *e, w.state, w.scores, w.system, w.corpus) ==
          doctest::Approx(0.48).epsilon(1e-12));
}

TEST_CASE("gates zero out patched exploits and unfounded lateral moves") {
    // Give the lateral target a vulnerability so its threat relevance is
    // nonzero once a foothold exists.
    SystemModel s = fx::mini_system();
    Vulnerability db_vuln = s.vulnerabilities.front();
    db_vuln.id = "CVE-2023-7777";
    db_vuln.component_id = "c_db";
    s.vulnerabilities.push_back(db_vuln);
    std::sort(s.vulnerabilities.begin(), s.vulnerabilities.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    auto w = fx::make_world(s, fx::mini_corpus());

    const GraphEdge* exploit = w.graph.find_exploit_edge("a_web", "CVE-2023-2868", "T1190");
    const GraphEdge* lateral = w.graph.find_lateral_edge("a_web", "a_db");
    REQUIRE(exploit != nullptr);
    REQUIRE(lateral != nullptr);

    w.state.patch["CVE-2023-2868"] = 1;
    CHECK(edge_probability(w.graph, *exploit, w.state, w.scores, w.system, w.corpus) == 0.0);

    CHECK(w.state.comp_level("a_web") == 0);
    CHECK(edge_probability(w.graph, *lateral, w.state, w.scores, w.system, w.corpus) == 0.0);

    w.state.comp["a_web"] = 1;
    w.state.k = CkcStage::Exploitation;
    CHECK(edge_probability(w.graph, *lateral, w.state, w.scores, w.system, w.corpus) > 0.0);

    // A clean target keeps lateral movement at zero relevance.
    auto clean = fx::make_world(fx::mini_system(), fx::mini_corpus());
    clean.state.comp["a_web"] = 1;
    const GraphEdge* into_clean = clean.graph.find_lateral_edge("a_web", "a_db");
    REQUIRE(into_clean != nullptr);
    CHECK(edge_probability(clean.graph, *into_clean, clean.state, clean.scores, clean.system,
                           clean.corpus) == 0.0);
}

TEST_CASE("state updates are idempotent and pure") {
    auto w = fx::make_world(fx::mini_system(), fx::mini_corpus());
    w.state.comp["a_web"] = 1;
    w.state.det = 0.3;

    apply_state_update(w.graph, w.state, w.scores, w.system, w.corpus);
    std::vector<double> first;
    for (const auto& e : w.graph.edges) first.push_back(e.probability);
    apply_state_update(w.graph, w.state, w.scores, w.system, w.corpus);
    std::vector<double> second;
    for (const auto& e : w.graph.edges) second.push_back(e.probability);
    CHECK(first == second);
    const GraphNode* web = w.graph.find_node("a_web");
    REQUIRE(web != nullptr);
    CHECK(web->compromise == 1);
}

TEST_CASE("cwe chaining multiplies in both likelihoods") {
    SystemModel s = fx::mini_system();
    Vulnerability follow = s.vulnerabilities.front();
    follow.id = "CVE-2023-9999";
    follow.cwe_ids = {"CWE-416"};
    s.vulnerabilities.push_back(follow);
    std::sort(s.vulnerabilities.begin(), s.vulnerabilities.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    s.detection_mechanisms.clear();

    CtiCorpus corpus = fx::mini_corpus();
    corpus.cve_to_ttp.emplace("CVE-2023-9999", "T1059");
    corpus.cwe_canfollow.insert({"CWE-77", "CWE-416"});

    auto w = fx::make_world(s, corpus);
    w.scores.l["CVE-2023-2868"] = 0.7; // chain source
    w.scores.l["CVE-2023-9999"] = 0.6; // chain target
    w.state.k = CkcStage::Exploitation;

    const GraphEdge* chained = w.graph.find_exploit_edge("a_web", "CVE-2023-9999", "T1059");
    REQUIRE(chained != nullptr);
    const double p =
        edge_probability(w.graph, *chained, w.state, w.scores, w.system, w.corpus);
    // base L(target) times the chain product L(source) * L(target).
    CHECK(p == doctest::Approx(0.6 * 0.7 * 0.6).epsilon(1e-12));
}

TEST_CASE("probabilities stay in the unit interval for random states") {
    auto w = fx::make_world(fx::bundled_system(), fx::bundled_corpus(), fx::bundled_model());
    Rng rng(99);
    for (int i = 0; i < 200; ++i) {
        GameState st = initial_state(w.system);
        for (auto& [id, flag] : st.patch) flag = rng.bernoulli(0.4) ? 1 : 0;
        for (auto& [id, level] : st.comp) level = static_cast<int>(rng.below(3));
        st.det = rng.uniform();
        st.k = static_cast<CkcStage>(rng.below(kStageCount));
        for (int j = 0; j < 30; ++j) {
            w.graph.record_tactic_outcome(static_cast<Tactic>(rng.below(kTacticCount)),
                                          rng.bernoulli(0.5));
        }
        for (const auto& e : w.graph.edges) {
            const double p = edge_probability(w.graph, e, st, w.scores, w.system, w.corpus);
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
            if (e.kind == EdgeKind::Exploit && st.patch_state(e.vuln_id) == 1) CHECK(p == 0.0);
            if (e.kind == EdgeKind::Lateral && st.comp_level(e.src) == 0) CHECK(p == 0.0);
        }
    }
}

TEST_CASE("graph dump lists nodes and edges") {
    auto w = fx::make_world(fx::mini_system(), fx::mini_corpus());
    const std::string dump = dump_graph(w.graph);
    CHECK(dump.find("a_web") != std::string::npos);
    CHECK(dump.find("exploit") != std::string::npos);
    CHECK(dump.find("T1190") != std::string::npos);
}
