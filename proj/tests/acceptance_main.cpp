// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Every expected value is recomputed by an independent
// straight-line oracle next to the check.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "patchgame/attacker_policy.hpp"
#include "patchgame/config.hpp"
#include "patchgame/rng.hpp"
#include "patchgame/simulation.hpp"
#include "test_fixtures.hpp"

using namespace patchgame;
namespace fx = patchgame::testing;

namespace {

int g_failures = 0;
int g_checks = 0;

void expect(bool ok, const char* what) {
    ++g_checks;
    if (!ok) {
        ++g_failures;
        std::printf("    check failed: %s\n", what);
    }
}

bool close(double a, double b, double rel = 1e-9) {
    const double scale = std::max({std::fabs(a), std::fabs(b), 1.0});
    return std::fabs(a - b) <= rel * scale;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int criterion, const char* name, bool pass) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, name);
    if (!pass) ++g_failures;
}

Vulnerability random_vuln(Rng& rng) {
    Vulnerability v;
    v.id = "CVE-RAND-" + std::to_string(rng.next_u64() % 100000);
    v.cvss = 10.0 * rng.uniform();
    v.epss = rng.uniform();
    v.exploit_available = rng.bernoulli(0.5);
    v.ransomware_associated = rng.bernoulli(0.2);
    v.exploit_maturity = static_cast<ExploitMaturity>(rng.below(4));
    v.attack_complexity = rng.bernoulli(0.3) ? AttackComplexity::High : AttackComplexity::Low;
    v.privileges_required = static_cast<PrivilegesRequired>(rng.below(3));
    return v;
}

Asset random_asset(Rng& rng) {
    Asset a;
    a.id = "asset";
    a.business_value = 100000.0 * rng.uniform();
    a.criticality = rng.uniform();
    a.asset_type = static_cast<AssetType>(rng.below(3));
    return a;
}

// ---- criterion 1: formula oracles ---------------------------------------

double oracle_patch_cost(const Vulnerability& v, const Asset& a, int deps, bool reboot,
                         const CostParams& p) {
    const int ac = static_cast<int>(v.attack_complexity);
    const double labor = p.patch_hours[ac] * p.defender_rate * p.ac_weight[ac];
    double td = p.downtime_base_hours;
    if (reboot) td *= p.downtime_reboot_multiplier;
    const double down = a.business_value * p.downtime_norm * td *
                        p.asset_type_factor[static_cast<int>(a.asset_type)];
    const double size = p.patch_size_factor * labor;
    const double dep = deps * p.dependency_unit_fraction * a.business_value;
    const double reb = reboot ? p.reboot_unit_fraction * a.business_value : 0.0;
    return labor + down + size + dep + reb;
}

double oracle_attack_cost(const Vulnerability& v, const Asset& a, Tactic t,
                          const CostParams& p) {
    const int ac = static_cast<int>(v.attack_complexity);
    const int pr = static_cast<int>(v.privileges_required);
    const double m = p.maturity_score[static_cast<int>(v.exploit_maturity)];
    const double avail = p.availability_cost_mode == AvailabilityCostMode::Inverse
                             ? p.availability_cost_scale * (1.0 - m) * (1.0 - v.epss)
                             : p.availability_cost_scale * m * v.epss;
    const double exploit = p.exploit_hours[ac] * p.attacker_rate * p.vuln_weight[ac][pr] + avail;
    const double band = a.criticality < 0.3   ? p.detection_risk_scale[0]
                        : a.criticality < 0.7 ? p.detection_risk_scale[1]
                                              : p.detection_risk_scale[2];
    const double tactic =
        p.tactic_factor[static_cast<std::size_t>(static_cast<int>(tactic_to_stage(t)))] *
        exploit;
    return exploit + band * exploit + tactic;
}

bool criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(0xC1);
    RiskParams risk;

    for (int i = 0; i < 1200; ++i) {
        Vulnerability v = random_vuln(rng);
        Asset a = random_asset(rng);
        CostParams costs;
        costs.defender_rate = 50.0 + 300.0 * rng.uniform();
        costs.attacker_rate = 20.0 + 150.0 * rng.uniform();
        costs.availability_cost_mode =
            rng.bernoulli(0.5) ? AvailabilityCostMode::Inverse : AvailabilityCostMode::Literal;

        // Financial risk and risk-to-cost ratio.
        const double likelihood = rng.uniform();
        const double fr_expected =
            a.business_value * std::min(v.cvss / 10.0, risk.i_max) * likelihood;
        expect(close(financial_risk(v, a, risk, likelihood), fr_expected), "financial risk");
        const double pc = 1.0 + 2000.0 * rng.uniform();
        expect(close(risk_cost_ratio(v, a, pc, risk, likelihood), fr_expected / pc),
               "risk-to-cost ratio");

        // Cost decompositions.
        const int deps = static_cast<int>(rng.below(8));
        const bool reboot = rng.bernoulli(0.4);
        expect(close(patch_cost(v, a, deps, reboot, costs).total,
                     oracle_patch_cost(v, a, deps, reboot, costs)),
               "patch cost");
        const Tactic tactic = static_cast<Tactic>(rng.below(kTacticCount));
        expect(close(attack_cost(v, a, tactic, costs).total,
                     oracle_attack_cost(v, a, tactic, costs)),
               "attack cost");
    }

    // Payoffs on randomized states over the bundled system.
    SystemModel system = fx::bundled_system();
    CostParams costs;
    PayoffParams pp;
    pp.c_det = 80.0;
    EngineParams ep;
    for (int i = 0; i < 1000; ++i) {
        GameState st = initial_state(system);
        for (auto& [id, level] : st.comp) level = static_cast<int>(rng.below(3));
        st.det = rng.uniform();

        double reward = 0.0;
        for (const auto& a : system.assets) {
            reward += st.comp_level(a.id) / 2.0 * a.business_value;
        }

        AttackerAction act;
        double act_cost = 0.0;
        switch (rng.below(4)) {
            case 0: act.kind = AttackerAction::Kind::Idle; break;
            case 1:
                act.kind = AttackerAction::Kind::Scan;
                act.asset_id = "web_server";
                act_cost = ep.scan_cost;
                break;
            case 2: {
                act.kind = AttackerAction::Kind::Exploit;
                const auto& v = system.vulnerabilities[rng.below(system.vulnerabilities.size())];
                act.vuln_id = v.id;
                act.asset_id = system.assets_of_component(v.component_id).front()->id;
                act.technique = "T1203";
                act_cost = oracle_attack_cost(v, *system.find_asset(act.asset_id),
                                              Tactic::Execution, costs);
                break;
            }
            default:
                act.kind = AttackerAction::Kind::Move;
                act.src_asset_id = "web_server";
                act.asset_id = "file_server";
                act_cost = ep.move_cost;
                break;
        }
        expect(close(attacker_payoff(st, act, system, costs, pp, ep),
                     reward - act_cost - pp.c_det * st.det),
               "attacker payoff");

        std::vector<DefenderAction> defense;
        double def_cost = 0.0;
        if (rng.bernoulli(0.7)) {
            const auto& v = system.vulnerabilities[rng.below(system.vulnerabilities.size())];
            const Asset* a = system.assets_of_component(v.component_id).front();
            DefenderAction d;
            d.kind = DefenderAction::Kind::Patch;
            d.vuln_id = v.id;
            d.asset_id = a->id;
            defense.push_back(d);
            int deps = 0;
            for (const auto& [s2, d2] : system.asset_edges) {
                if (s2 == a->id || d2 == a->id) ++deps;
            }
            for (const auto& [s2, d2] : system.component_edges) {
                if (s2 == v.component_id || d2 == v.component_id) ++deps;
            }
            bool reboot = false;
            for (const auto& c : v.cwe_ids) {
                if (c == "CWE-787" || c == "CWE-416") reboot = true;
            }
            def_cost = oracle_patch_cost(v, *a, deps, reboot, costs);
        }
        expect(close(defender_payoff(st, defense, system, costs, pp, ep),
                     -reward - pp.psi * def_cost),
               "defender payoff");
    }

    // Exploitability chain plus the expected-value line, cross-checked
    // through target selection on the bundled world.
    auto w = fx::make_world(fx::bundled_system(), fx::bundled_corpus(), fx::bundled_model());
    ExploitabilityParams params;
    params.explore_rate = 0.0;
    CostParams ac_costs;
    for (int i = 0; i < 1000; ++i) {
        AttackerState st;
        st.belief = initial_attacker_belief(w.system, BeliefParams{});
        for (auto& [id, pb] : st.belief.patch) pb = rng.uniform();
        for (auto& [id, cd] : st.belief.comp) {
            double x = rng.uniform(), y = rng.uniform(), z = rng.uniform();
            const double sum = x + y + z;
            cd = {x / sum, y / sum, z / sum};
        }
        st.belief.det = Beta{1.0 + rng.below(5), 1.0 + rng.below(5)};
        for (const auto& v : w.system.vulnerabilities) {
            st.failures[v.id] = static_cast<int>(rng.below(5));
        }
        GameState gs = initial_state(w.system);
        for (auto& [id, level] : gs.comp) level = static_cast<int>(rng.below(3));
        const Tactic tactic = static_cast<Tactic>(rng.below(kTacticCount));

        Rng probe(1);
        auto choice = select_target(st, tactic, w.system, w.graph, w.corpus, w.scores, gs,
                                    params, risk, ac_costs, probe);

        // Straight-line candidate enumeration and scoring.
        std::set<std::string> reach;
        for (const auto& e : w.graph.edges) {
            if (e.kind == EdgeKind::Reconnaissance) reach.insert(e.dst);
            if (e.kind == EdgeKind::Lateral && gs.comp_level(e.src) > 0) reach.insert(e.dst);
        }
        for (const auto& a : w.system.assets) {
            if (gs.comp_level(a.id) > 0) reach.insert(a.id);
        }
        std::string best_asset, best_vuln, best_tech;
        double best_ev = -1.0;
        for (const auto& e : w.graph.edges) {
            if (e.kind != EdgeKind::Exploit || e.tactic != tactic) continue;
            if (reach.count(e.asset_id) == 0) continue;
            const CompDist& cd = st.belief.comp.at(e.asset_id);
            if (cd[2] > 0.9) continue;
            const Vulnerability* v = w.system.find_vulnerability(e.vuln_id);
            const Asset* a = w.system.find_asset(e.asset_id);

            // Exploitability chain, straight-line.
            const double pb = st.belief.patch.at(v->id);
            const int f = st.failures.at(v->id);
            double xi;
            if (pb > params.theta_patch || f > params.theta_f) {
                xi = params.epsilon;
            } else {
                const double eta = std::min(params.eta_slope * f, params.eta_cap);
                const double p_ex = w.scores.likelihood(v->id) * (1.0 - pb) * (1.0 - eta);
                const double er =
                    a->business_value * std::min(v->cvss / 10.0, risk.i_max) * p_ex;
                const double acost = oracle_attack_cost(*v, *a, tactic, ac_costs);
                const double roi = (er - acost) / acost;
                xi = 1.0 / (1.0 + std::exp(-params.k_logistic * roi));
                const double det_mean =
                    st.belief.det.alpha / (st.belief.det.alpha + st.belief.det.beta);
                // Tactic fit by mapping overlap.
                double fit = 0.2;
                auto tactics = mapped_tactics(*v, w.corpus);
                if (std::find(tactics.begin(), tactics.end(), tactic) != tactics.end()) {
                    fit = 1.0;
                } else {
                    for (Tactic mt : tactics) {
                        if (tactic_to_stage(mt) == tactic_to_stage(tactic)) {
                            fit = 0.5;
                            break;
                        }
                    }
                }
                xi = std::clamp(xi * (1.0 - det_mean) * fit, 0.0, 1.0);
            }
            xi *= std::pow(params.attempt_damping, 0);
            const double ev = (cd[1] * 0.5 + cd[2] * 1.0) * a->business_value * xi;
            const bool better =
                ev > best_ev ||
                (ev == best_ev &&
                 std::tie(e.asset_id, e.vuln_id, e.technique) <
                     std::tie(best_asset, best_vuln, best_tech));
            if (better) {
                best_ev = ev;
                best_asset = e.asset_id;
                best_vuln = e.vuln_id;
                best_tech = e.technique;
            }
        }
        if (best_ev < 0.0) {
            expect(!choice.has_value(), "target selection: no candidates");
        } else {
            expect(choice.has_value(), "target selection returned a choice");
            if (choice.has_value()) {
                expect(choice->asset_id == best_asset && choice->vuln_id == best_vuln,
                       "target selection argmax");
                expect(close(choice->expected_value, best_ev), "expected-value line");
            }
        }
    }

    const double elapsed = seconds_since(t0);
    expect(elapsed < 10.0, "criterion 1 runtime under 10 s");
    return g_failures == 0;
}

// ---- criterion 2: belief correctness -------------------------------------

bool criterion2() {
    const int before = g_failures;
    Rng rng(0xC2);
    SystemModel s = fx::mini_system();
    BeliefParams bp;

    for (int i = 0; i < 1000; ++i) {
        // Stage update against brute-force enumeration.
        StageDist prior{};
        double z = 0.0;
        for (double& x : prior) {
            x = 0.01 + rng.uniform();
            z += x;
        }
        for (double& x : prior) x /= z;
        std::array<StageDist, kStageCount> transition{};
        for (auto& row : transition) {
            double rz = 0.0;
            for (double& x : row) {
                x = 0.01 + rng.uniform();
                rz += x;
            }
            for (double& x : row) x /= rz;
        }
        StageDist like{};
        for (double& x : like) x = 0.01 + rng.uniform();
        const double external = rng.uniform();
        StageDist w{};
        for (double& x : w) x = rng.uniform();

        DefenderBelief b = initial_defender_belief(s);
        b.stage = prior;
        DefenderBelief after = defender_update_stage(b, like, transition, external, w);

        StageDist predicted{};
        for (int k = 0; k < kStageCount; ++k) {
            for (int j = 0; j < kStageCount; ++j) predicted[j] += transition[k][j] * prior[k];
        }
        StageDist corrected{};
        double cz = 0.0;
        for (int k = 0; k < kStageCount; ++k) {
            corrected[k] = like[k] * predicted[k];
            cz += corrected[k];
        }
        for (double& x : corrected) x /= cz;
        StageDist expected{};
        double ez = 0.0;
        for (int k = 0; k < kStageCount; ++k) {
            expected[k] = corrected[k] * std::exp(external * w[k]);
            ez += expected[k];
        }
        for (double& x : expected) x /= ez;
        for (int k = 0; k < kStageCount; ++k) {
            expect(close(after.stage[k], expected[k]), "stage posterior enumeration");
        }

        // Compromise update.
        CompDist cprior = {0.01 + rng.uniform(), 0.01 + rng.uniform(), 0.01 + rng.uniform()};
        double cpz = cprior[0] + cprior[1] + cprior[2];
        for (double& x : cprior) x /= cpz;
        CompDist clike = {0.01 + rng.uniform(), 0.01 + rng.uniform(), 0.01 + rng.uniform()};
        CompDist cpost = categorical_posterior(cprior, clike);
        double cz2 = clike[0] * cprior[0] + clike[1] * cprior[1] + clike[2] * cprior[2];
        for (int l = 0; l < 3; ++l) {
            expect(close(cpost[l], clike[l] * cprior[l] / cz2), "compromise posterior");
        }

        // Patch belief two-hypothesis Bayes via a failed exploit.
        AttackerBelief ab = initial_attacker_belief(s, bp);
        const double pprior = rng.uniform();
        const double p_exploit = rng.uniform();
        ab.patch["CVE-2023-2868"] = pprior;
        AttackerBelief ap = attacker_observe(ab, "a_web", "CVE-2023-2868", 0, 0, p_exploit, bp);
        const double fail_unpatched = 1.0 - p_exploit;
        const double denom = bp.fail_given_patched * pprior + fail_unpatched * (1.0 - pprior);
        if (denom > 0.0) {
            expect(close(ap.patch["CVE-2023-2868"], bp.fail_given_patched * pprior / denom),
                   "patch posterior");
        }
    }

    // Beta recurrence, exact.
    Beta beta{1.0, 1.0};
    double alpha = 1.0, bb = 1.0;
    for (int i = 0; i < 5000; ++i) {
        const int o = rng.bernoulli(0.3) ? 1 : 0;
        beta = update_detection(beta, o);
        alpha += o;
        bb += 1 - o;
        expect(beta.alpha == alpha && beta.beta == bb, "beta recurrence exact");
    }

    // Normalization after 10^4 random update sequences.
    DefenderBelief db = initial_defender_belief(s);
    AttackerBelief ab = initial_attacker_belief(s, bp);
    auto t = stage_transition_matrix(bp);
    for (int i = 0; i < 10000; ++i) {
        StageDist like{};
        for (double& x : like) x = 0.01 + rng.uniform();
        db = defender_update_stage(db, like, t, rng.uniform(), bp.w_ckc);
        CompDist ind = {0.01 + rng.uniform(), 0.01 + rng.uniform(), 0.01 + rng.uniform()};
        db = defender_update_comp(db, "a_web", ind);
        const int outcome = rng.bernoulli(0.5) ? 1 : 0;
        ab = attacker_observe(ab, "a_web", "CVE-2023-2868", outcome,
                              outcome ? 1 : 0, rng.uniform(), bp);

        double ssum = 0.0;
        for (double x : db.stage) ssum += x;
        expect(std::fabs(ssum - 1.0) < 1e-9, "stage belief normalized");
        const CompDist& dc = db.comp.at("a_web");
        expect(std::fabs(dc[0] + dc[1] + dc[2] - 1.0) < 1e-9, "defender comp normalized");
        const CompDist& acd = ab.comp.at("a_web");
        expect(std::fabs(acd[0] + acd[1] + acd[2] - 1.0) < 1e-9, "attacker comp normalized");
    }
    return g_failures == before;
}

// ---- criterion 3: pareto oracle ------------------------------------------

bool criterion3() {
    const int before = g_failures;
    Rng rng(0xC3);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<std::pair<double, double>> pts;
        const std::size_t n = 1 + rng.below(100);
        for (std::size_t i = 0; i < n; ++i) {
            // Coarse grid to exercise ties and duplicates.
            pts.emplace_back(std::floor(rng.uniform() * 25.0),
                             std::floor(rng.uniform() * 25.0));
        }
        std::vector<std::size_t> expected;
        for (std::size_t i = 0; i < n; ++i) {
            bool dominated = false;
            for (std::size_t j = 0; j < n && !dominated; ++j) {
                if (i == j) continue;
                if (pts[j].first >= pts[i].first && pts[j].second <= pts[i].second &&
                    (pts[j].first > pts[i].first || pts[j].second < pts[i].second)) {
                    dominated = true;
                }
            }
            if (!dominated) expected.push_back(i);
        }
        if (pareto_frontier(pts) != expected) {
            expect(false, "pareto frontier equals brute-force filter");
            break;
        }
    }
    return g_failures == before;
}

// ---- criterion 4: budget and termination safety ---------------------------

bool criterion4() {
    const int before = g_failures;
    const auto t0 = std::chrono::steady_clock::now();

    SimulationConfig cfg = fx::bundled_config();
    cfg.runs = 100;
    ScenarioBundle bundle = load_bundle(cfg);
    const std::size_t vuln_count = bundle.system.vulnerabilities.size();

    for (StrategyKind kind : all_strategies()) {
        SimulationConfig sub = cfg;
        sub.strategy = kind;
        for (int run = 0; run < sub.runs; ++run) {
            const RunMetrics m = run_episode(sub, bundle, run).metrics;
            expect(m.total_patch_cost <= sub.budgets.defender + 1e-6,
                   "defender spend within budget");

            // Recompute the verdict from the end state, in order.
            Verdict expected;
            if (sub.budgets.defender > 0.0 && m.total_patch_cost >= sub.budgets.defender) {
                expected = Verdict::BudgetExhausted;
            } else if (m.patched_count == static_cast<int>(vuln_count)) {
                expected = Verdict::AllPatched;
            } else if (m.steps_taken >= sub.horizon) {
                expected = Verdict::Horizon;
            } else if (m.total_patch_cost > m.protected_value) {
                expected = Verdict::BreakEven;
            } else {
                expected = Verdict::Continue;
            }
            expect(m.verdict == expected, "termination verdict order");
            expect(m.verdict != Verdict::Continue, "runs end on a verdict");
        }
    }
    const double elapsed = seconds_since(t0);
    expect(elapsed < 60.0, "criterion 4 runtime under 60 s");
    std::printf("    500 runs in %.1f s\n", elapsed);
    return g_failures == before;
}

// ---- criterion 5: scripted-attacker fidelity ------------------------------

bool criterion5() {
    const int before = g_failures;
    SimulationConfig cfg = fx::bundled_config();
    cfg.attacker = AttackerKind::Scripted;
    cfg.budgets.defender = 0.0;
    cfg.horizon = 20;
    const std::vector<std::string> campaign = {"CVE-2017-7269", "CVE-2020-1938",
                                               "CVE-2017-0143", "CVE-2016-5743",
                                               "CVE-2019-10922"};
    for (const auto& cve : campaign) cfg.likelihood_overrides[cve] = 1.0;
    ScenarioBundle bundle = load_bundle(cfg);
    bundle.system.detection_mechanisms.clear(); // certain-success edges

    const RunResult r = run_episode(cfg, bundle, 0);
    std::vector<std::string> order;
    for (const auto& row : r.trace) {
        if (row.outcome == "success" && row.attacker_action.rfind("exploit ", 0) == 0) {
            const std::string rest = row.attacker_action.substr(8);
            order.push_back(rest.substr(0, rest.find('@')));
        }
    }
    expect(order == campaign, "compromise order equals the five-stage campaign");
    return g_failures == before;
}

// ---- criterion 6: q-learning convergence ----------------------------------

class ToyEnv : public RlEnvironment {
public:
    RlState reset() override {
        state_ = 0;
        return RlState{0, 0, 0};
    }
    int action_count() const override { return 2; }
    StepResult step(int action) override {
        StepResult r;
        if (state_ == 0) {
            if (action == 0) {
                r.reward = 1.0;
            } else {
                r.reward = 0.0;
                state_ = 1;
            }
        } else {
            if (action == 0) {
                r.reward = 2.0;
            } else {
                r.reward = 0.0;
                state_ = 0;
            }
        }
        r.state = RlState{state_, 0, 0};
        return r;
    }

private:
    int state_ = 0;
};

bool criterion6() {
    const int before = g_failures;
    RlParams p;
    p.gamma = 0.95;
    p.max_steps_per_episode = 30;

    double q0[2] = {0, 0}, q1[2] = {0, 0};
    for (int it = 0; it < 5000; ++it) {
        const double v0 = std::max(q0[0], q0[1]);
        const double v1 = std::max(q1[0], q1[1]);
        q0[0] = 1.0 + p.gamma * v0;
        q0[1] = 0.0 + p.gamma * v1;
        q1[0] = 2.0 + p.gamma * v1;
        q1[1] = 0.0 + p.gamma * v0;
    }

    auto [qa, sa] = train([] { return std::make_unique<ToyEnv>(); }, 10000, 616, p);
    expect(std::fabs(qa.value({0, 0, 0}, 0) - q0[0]) < 1e-3, "Q(s0, a0) fixed point");
    expect(std::fabs(qa.value({0, 0, 0}, 1) - q0[1]) < 1e-3, "Q(s0, a1) fixed point");
    expect(std::fabs(qa.value({1, 0, 0}, 0) - q1[0]) < 1e-3, "Q(s1, a0) fixed point");
    expect(std::fabs(qa.value({1, 0, 0}, 1) - q1[1]) < 1e-3, "Q(s1, a1) fixed point");

    auto [qb, sb] = train([] { return std::make_unique<ToyEnv>(); }, 10000, 616, p);
    expect(qa.serialize() == qb.serialize(), "fixed seed gives bitwise-identical Q-tables");
    return g_failures == before;
}

// ---- criterion 7: determinism ---------------------------------------------

bool criterion7() {
    const int before = g_failures;
    SimulationConfig cfg = fx::bundled_config();
    cfg.runs = 20;
    cfg.strategy = StrategyKind::CostAware;
    ScenarioBundle bundle = load_bundle(cfg);

    const std::string report1 = run_batch(cfg, bundle).to_json();
    const std::string report2 = run_batch(cfg, bundle).to_json();
    expect(report1 == report2, "repeated batches serialize identically");

    const std::string runs1 = run_metrics_csv(cfg, bundle);
    const std::string runs2 = run_metrics_csv(cfg, bundle);
    expect(runs1 == runs2, "per-run tables identical");

    SimulationConfig other = cfg;
    other.master_seed = cfg.master_seed + 1;
    expect(run_batch(other, bundle).to_json() != report1, "seed changes the report");
    return g_failures == before;
}

// ---- criterion 8: comparison report ordering ------------------------------

bool criterion8() {
    const int before = g_failures;
    SimulationConfig cfg = fx::bundled_config();
    cfg.runs = 100;
    cfg.master_seed = 42;
    ScenarioBundle bundle = load_bundle(cfg);

    const BatchReport report = run_compare(cfg, bundle);
    expect(report.strategies.size() == 5, "all five strategies reported");

    auto doc = nlohmann::json::parse(report.to_json());
    for (const auto& row : doc.at("strategies")) {
        expect(row.contains("protected_value_mean") && row.contains("protection_rate") &&
                   row.contains("compromised_assets_mean") && row.contains("ttd_mean") &&
                   row.contains("cost_mean"),
               "headline columns present");
    }

    double adaptive = -1.0, cvss_only = -1.0;
    for (const auto& s : report.strategies) {
        if (s.strategy == StrategyKind::AdaptiveThreatIntel) adaptive = s.protected_value_mean;
        if (s.strategy == StrategyKind::CvssOnly) cvss_only = s.protected_value_mean;
    }
    std::printf("    adaptive %.0f vs cvss-only %.0f\n", adaptive, cvss_only);
    expect(adaptive >= cvss_only,
           "adaptive strategy preserves at least as much value as cvss-only");
    expect(!report.pareto.empty(), "pareto set non-empty");
    return g_failures == before;
}

// ---- criterion 9: attack-graph gates --------------------------------------

bool criterion9() {
    const int before = g_failures;
    auto w = fx::make_world(fx::bundled_system(), fx::bundled_corpus(), fx::bundled_model());
    Rng rng(0xC9);
    for (int i = 0; i < 1000; ++i) {
        GameState st = initial_state(w.system);
        for (auto& [id, flag] : st.patch) flag = rng.bernoulli(0.5) ? 1 : 0;
        for (auto& [id, level] : st.comp) level = static_cast<int>(rng.below(3));
        st.det = rng.uniform();
        st.k = static_cast<CkcStage>(rng.below(kStageCount));
        w.graph.record_tactic_outcome(static_cast<Tactic>(rng.below(kTacticCount)),
                                      rng.bernoulli(0.5));

        for (const auto& e : w.graph.edges) {
            const double p = edge_probability(w.graph, e, st, w.scores, w.system, w.corpus);
            if (p < 0.0 || p > 1.0) {
                expect(false, "edge probability in unit interval");
                return false;
            }
            if (e.kind == EdgeKind::Exploit && st.patch_state(e.vuln_id) == 1 && p != 0.0) {
                expect(false, "patched exploit edge has zero probability");
                return false;
            }
            if (e.kind == EdgeKind::Lateral && st.comp_level(e.src) == 0 && p != 0.0) {
                expect(false, "lateral edge from uncompromised source is zero");
                return false;
            }
        }
    }
    return g_failures == before;
}

} // namespace

int main() {
    struct Entry {
        int id;
        const char* name;
        bool (*fn)();
    };
    const Entry entries[] = {
        {1, "formula oracles (1e-9, randomized)", criterion1},
        {2, "belief updates match brute-force Bayes", criterion2},
        {3, "pareto frontier equals the O(n^2) filter", criterion3},
        {4, "budget and termination safety over 500 runs", criterion4},
        {5, "scripted attacker follows the campaign order", criterion5},
        {6, "q-learning reaches the value-iteration fixed point", criterion6},
        {7, "seeded runs are bit-reproducible", criterion7},
        {8, "comparison report and adaptive-vs-cvss ordering", criterion8},
        {9, "attack-graph probability gates", criterion9},
    };

    int failed = 0;
    for (const auto& e : entries) {
        const int before = g_failures;
        bool ok;
        try {
            ok = e.fn() && g_failures == before;
        } catch (const std::exception& ex) {
            std::printf("    exception: %s\n", ex.what());
            ok = false;
        }
        report(e.id, e.name, ok);
        if (!ok) ++failed;
        g_failures = before; // per-criterion isolation in the summary
    }
    std::printf("%d/9 criteria passed (%d checks)\n", 9 - failed, g_checks);
    return failed == 0 ? 0 : 1;
}
