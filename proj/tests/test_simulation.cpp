#include <doctest.h>

#include <json.hpp>

#include "patchgame/rng.hpp"
#include "patchgame/simulation.hpp"
#include "test_fixtures.hpp"

using namespace patchgame;
namespace fx = patchgame::testing;

namespace {

SimulationConfig small_config() {
    SimulationConfig cfg = fx::bundled_config();
    cfg.runs = 5;
    cfg.horizon = 25;
    return cfg;
}

} // namespace

TEST_CASE("pareto frontier keeps exactly the non-dominated points") {
    using P = std::pair<double, double>;
    CHECK(pareto_frontier({P{10, 5}}) == std::vector<std::size_t>{0});
    CHECK(pareto_frontier({P{10, 5}, P{12, 4}, P{9, 6}}) == std::vector<std::size_t>{1});
    CHECK(pareto_frontier({P{10, 5}, P{12, 7}}) == std::vector<std::size_t>{0, 1});
    // Identical points are all retained.
    CHECK(pareto_frontier({P{5, 5}, P{5, 5}}) == std::vector<std::size_t>{0, 1});
    CHECK_THROWS_AS(pareto_frontier({}), std::invalid_argument);
}

TEST_CASE("pareto frontier matches the brute-force filter on random sets") {
    Rng rng(4242);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::pair<double, double>> pts;
        const std::size_t n = 1 + rng.below(40);
        for (std::size_t i = 0; i < n; ++i) {
            pts.emplace_back(std::floor(rng.uniform() * 20.0),
                             std::floor(rng.uniform() * 20.0));
        }
        std::vector<std::size_t> expected;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            bool dominated = false;
            for (std::size_t j = 0; j < pts.size(); ++j) {
                if (i == j) continue;
                if (pts[j].first >= pts[i].first && pts[j].second <= pts[i].second &&
                    (pts[j].first > pts[i].first || pts[j].second < pts[i].second)) {
                    dominated = true;
                    break;
                }
            }
            if (!dominated) expected.push_back(i);
        }
        CHECK(pareto_frontier(pts) == expected);
    }
}

TEST_CASE("a zero horizon terminates immediately with full value") {
    SimulationConfig cfg = small_config();
    cfg.horizon = 0;
    ScenarioBundle bundle = load_bundle(cfg);
    RunResult r = run_episode(cfg, bundle, 0);
    CHECK(r.metrics.verdict == Verdict::Horizon);
    CHECK(r.metrics.steps_taken == 0);
    CHECK(r.metrics.total_patch_cost == 0.0);
    CHECK(r.metrics.protected_value ==
          doctest::Approx(bundle.system.total_business_value()));
    CHECK(r.metrics.zero_compromise);
}

TEST_CASE("the same seed reproduces a run bitwise") {
    SimulationConfig cfg = small_config();
    ScenarioBundle bundle = load_bundle(cfg);
    RunResult a = run_episode(cfg, bundle, 3);
    RunResult b = run_episode(cfg, bundle, 3);
    CHECK(a.metrics.protected_value == b.metrics.protected_value);
    CHECK(a.metrics.total_patch_cost == b.metrics.total_patch_cost);
    CHECK(a.metrics.compromised_assets == b.metrics.compromised_assets);
    CHECK(a.metrics.steps_taken == b.metrics.steps_taken);
    CHECK(trace_csv(a.trace) == trace_csv(b.trace));

    RunResult c = run_episode(cfg, bundle, 4);
    CHECK(trace_csv(a.trace) != trace_csv(c.trace));
}

TEST_CASE("batch reports aggregate the single-run case exactly") {
    SimulationConfig cfg = small_config();
    cfg.runs = 1;
    ScenarioBundle bundle = load_bundle(cfg);
    BatchReport report = run_batch(cfg, bundle);
    RunResult lone = run_episode(cfg, bundle, 0);
    REQUIRE(report.strategies.size() == 1);
    const auto& s = report.strategies.front();
    CHECK(s.protected_value_mean == doctest::Approx(lone.metrics.protected_value));
    CHECK(s.protected_value_std == doctest::Approx(0.0));
    CHECK(s.cost_mean == doctest::Approx(lone.metrics.total_patch_cost));
    CHECK(s.protection_rate == (lone.metrics.zero_compromise ? 1.0 : 0.0));
}

TEST_CASE("batch aggregation is invariant to run order") {
    SimulationConfig cfg = small_config();
    ScenarioBundle bundle = load_bundle(cfg);
    BatchReport report = run_batch(cfg, bundle);

    double sum = 0.0;
    for (int i = cfg.runs - 1; i >= 0; --i) {
        sum += run_episode(cfg, bundle, i).metrics.protected_value;
    }
    CHECK(report.strategies.front().protected_value_mean ==
          doctest::Approx(sum / cfg.runs).epsilon(1e-9));
}

TEST_CASE("the report json carries the five headline columns per strategy") {
    SimulationConfig cfg = small_config();
    ScenarioBundle bundle = load_bundle(cfg);
    BatchReport report = run_batch(cfg, bundle);
    auto doc = nlohmann::json::parse(report.to_json());
    REQUIRE(doc.at("strategies").size() == 1);
    const auto& row = doc.at("strategies").at(0);
    CHECK(row.contains("protected_value_mean"));
    CHECK(row.contains("protection_rate"));
    CHECK(row.contains("compromised_assets_mean"));
    CHECK(row.contains("ttd_mean"));
    CHECK(row.contains("cost_mean"));
    CHECK(doc.contains("pareto"));

    CHECK(report.progression_csv().find("strategy,step,mean_compromised") == 0);
    CHECK(report.comparison_table().find("strategy,protected_value,protection_rate,"
                                         "compromised_assets,ttd,cost") == 0);
}

TEST_CASE("defender spend never exceeds the budget") {
    SimulationConfig cfg = small_config();
    cfg.runs = 10;
    ScenarioBundle bundle = load_bundle(cfg);
    for (int i = 0; i < cfg.runs; ++i) {
        RunMetrics m = run_episode(cfg, bundle, i).metrics;
        CHECK(m.total_patch_cost <= cfg.budgets.defender + 1e-6);
    }
}

TEST_CASE("scripted attacker compromises in the campaign order under certain edges") {
    SimulationConfig cfg = fx::bundled_config();
    cfg.attacker = AttackerKind::Scripted;
    cfg.budgets.defender = 0.0;
    cfg.horizon = 20;
    for (const char* cve : {"CVE-2017-7269", "CVE-2020-1938", "CVE-2017-0143",
                            "CVE-2016-5743", "CVE-2019-10922"}) {
        cfg.likelihood_overrides[cve] = 1.0;
    }
    ScenarioBundle bundle = load_bundle(cfg);
    bundle.system.detection_mechanisms.clear(); // no detection dampening

    RunResult r = run_episode(cfg, bundle, 0);
    std::vector<std::string> order;
    for (const auto& row : r.trace) {
        if (row.outcome == "success" && row.attacker_action.rfind("exploit ", 0) == 0) {
            const std::string rest = row.attacker_action.substr(8);
            order.push_back(rest.substr(0, rest.find('@')));
        }
    }
    const std::vector<std::string> expected = {"CVE-2017-7269", "CVE-2020-1938",
                                               "CVE-2017-0143", "CVE-2016-5743",
                                               "CVE-2019-10922"};
    CHECK(order == expected);
    CHECK(r.metrics.compromised_assets == 4); // web, fs, hmi, rtu
}

TEST_CASE("the simulation environment trains deterministically") {
    SimulationConfig cfg = fx::bundled_config();
    cfg.rl.max_steps_per_episode = 10;
    ScenarioBundle bundle = load_bundle(cfg);
    auto [qa, sa] = train_on_scenario(cfg, bundle, 5, 77);
    auto [qb, sb] = train_on_scenario(cfg, bundle, 5, 77);
    CHECK(qa.serialize() == qb.serialize());
    CHECK(qa.size() > 0);
}
