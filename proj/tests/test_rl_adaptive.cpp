#include <doctest.h>

#include <cmath>

#include "patchgame/rl_adaptive.hpp"
#include "patchgame/rng.hpp"

using namespace patchgame;

TEST_CASE("state discretization uses left-closed bins") {
    RlState fresh = discretize_state(0.0, 4, 1.0);
    CHECK(fresh.comp_bin == 0);
    CHECK(fresh.high_risk_bin == 2);
    CHECK(fresh.budget_bin == 3);

    CHECK(discretize_state(0.5, 0, 0.5).comp_bin == 2);
    CHECK(discretize_state(0.0, 0, 0.0).budget_bin == 0);
    CHECK(discretize_state(0.24, 0, 0.75).comp_bin == 0);
    CHECK(discretize_state(1.0, 0, 0.0).comp_bin == 3);
    CHECK(discretize_state(0.0, 0, 0.0).high_risk_bin == 0);
    CHECK(discretize_state(0.0, 2, 0.0).high_risk_bin == 1);
    CHECK(discretize_state(0.0, 5, 0.0).high_risk_bin == 2);
    CHECK(discretize_state(0.0, 6, 0.0).high_risk_bin == 3);
}

TEST_CASE("reward mixes the four components and clips") {
    RlParams p;
    p.roi_norm_scale = 0.25;
    p.roi_cost_floor = 500.0;

    RewardSnapshot s;
    s.preserved_value = 50.0;
    s.total_business_value = 100.0; // value norm 0.5
    s.cumulative_patch_cost = 500.0; // roi = 0.1, norm = 0.4
    s.patches_applied = 1;
    s.per_step_limit = 2; // patch norm 0.5
    s.unpatched_critical = 1;
    s.initial_critical = 5; // critical norm 0.2
    CHECK(compute_reward(s, p) == doctest::Approx(0.335).epsilon(1e-9));

    // Upper clip: strong ROI at a hot scale pushes the mix above 1.
    RlParams hot = p;
    hot.roi_norm_scale = 0.05;
    RewardSnapshot top = s;
    top.preserved_value = 100.0;
    top.cumulative_patch_cost = 10.0; // roi uses the floor, norm large
    top.patches_applied = 2;
    top.unpatched_critical = 0;
    CHECK(compute_reward(top, hot) == 1.0);

    // Worst case stays within the clip.
    RewardSnapshot bottom;
    bottom.preserved_value = 0.0;
    bottom.total_business_value = 100.0;
    bottom.cumulative_patch_cost = 0.0;
    bottom.patches_applied = 0;
    bottom.per_step_limit = 2;
    bottom.unpatched_critical = 5;
    bottom.initial_critical = 5;
    const double r = compute_reward(bottom, RlParams{});
    CHECK(r <= 0.0);
    CHECK(r >= -1.0);
}

TEST_CASE("reward stays clipped for adversarial snapshots") {
    Rng rng(55);
    RlParams p;
    for (int i = 0; i < 2000; ++i) {
        RewardSnapshot s;
        s.preserved_value = 1e6 * rng.uniform();
        s.total_business_value = rng.bernoulli(0.1) ? 0.0 : 1e5 * rng.uniform();
        s.cumulative_patch_cost = rng.bernoulli(0.2) ? 0.0 : 1e4 * rng.uniform();
        s.patches_applied = static_cast<int>(rng.below(10));
        s.per_step_limit = static_cast<int>(rng.below(4));
        s.unpatched_critical = static_cast<int>(rng.below(30));
        s.initial_critical = static_cast<int>(rng.below(30));
        const double r = compute_reward(s, p);
        CHECK(r >= -1.0);
        CHECK(r <= 1.0);
    }
}

TEST_CASE("weight configurations live on the simplex") {
    for (const auto& wc : default_weight_configs()) {
        CHECK(std::abs(wc.sum() - 1.0) < 1e-9);
        CHECK(wc.cvss >= 0.0);
        CHECK(wc.epss >= 0.0);
        CHECK(wc.exploit_available >= 0.0);
        CHECK(wc.ransomware >= 0.0);
        CHECK(wc.business_value >= 0.0);
        CHECK(wc.rcr >= 0.0);
    }
}

TEST_CASE("q-table serialization round-trips") {
    QTable q(3);
    q.row({0, 1, 2}) = {1.5, -2.25, 0.125};
    q.row({3, 0, 1}) = {0.0, 42.0, -1.0};
    QTable back = QTable::deserialize(q.serialize());
    CHECK(back.action_count() == 3);
    CHECK(back.value({0, 1, 2}, 1) == -2.25);
    CHECK(back.value({3, 0, 1}, 1) == 42.0);
    CHECK(back.serialize() == q.serialize());
    CHECK(back.best_action({3, 0, 1}) == 1);
    CHECK(back.best_action({9, 9, 9}) == 0); // unseen
}

namespace {

// Deterministic two-state, two-action chain used as a value-iteration
// oracle for the trainer.
class ToyEnv : public RlEnvironment {
public:
    RlState reset() override {
        state_ = 0;
        return encode(0);
    }
    int action_count() const override { return 2; }
    StepResult step(int action) override {
        StepResult r;
        if (state_ == 0) {
            if (action == 0) {
                r.reward = 1.0; // stay in s0
            } else {
                r.reward = 0.0;
                state_ = 1;
            }
        } else {
            if (action == 0) {
                r.reward = 2.0; // stay in s1
            } else {
                r.reward = 0.0;
                state_ = 0;
            }
        }
        r.state = encode(state_);
        r.done = false;
        return r;
    }
    static RlState encode(int s) { return {s, 0, 0}; }

private:
    int state_ = 0;
};

} // namespace

TEST_CASE("alpha zero means no learning") {
    RlParams p;
    p.alpha = 0.0;
    p.max_steps_per_episode = 10;
    auto [q, summary] = train([] { return std::make_unique<ToyEnv>(); }, 50, 7, p);
    for (const auto& [state, row] : q.entries()) {
        for (double v : row) CHECK(v == 0.0);
    }
    CHECK(summary.episodes == 50);
}

TEST_CASE("q-learning converges to the value-iteration fixed point") {
    RlParams p;
    p.gamma = 0.95;
    p.max_steps_per_episode = 30;

    // Value iteration oracle on the toy chain.
    double q0[2] = {0, 0}, q1[2] = {0, 0};
    for (int it = 0; it < 4000; ++it) {
        const double v0 = std::max(q0[0], q0[1]);
        const double v1 = std::max(q1[0], q1[1]);
        q0[0] = 1.0 + p.gamma * v0;
        q0[1] = 0.0 + p.gamma * v1;
        q1[0] = 2.0 + p.gamma * v1;
        q1[1] = 0.0 + p.gamma * v0;
    }

    auto [q, summary] = train([] { return std::make_unique<ToyEnv>(); }, 10000, 2024, p);
    CHECK(std::abs(q.value(ToyEnv::encode(0), 0) - q0[0]) < 1e-3);
    CHECK(std::abs(q.value(ToyEnv::encode(0), 1) - q0[1]) < 1e-3);
    CHECK(std::abs(q.value(ToyEnv::encode(1), 0) - q1[0]) < 1e-3);
    CHECK(std::abs(q.value(ToyEnv::encode(1), 1) - q1[1]) < 1e-3);
}

TEST_CASE("training is bitwise deterministic for a fixed seed") {
    RlParams p;
    p.max_steps_per_episode = 20;
    auto [qa, sa] = train([] { return std::make_unique<ToyEnv>(); }, 500, 99, p);
    auto [qb, sb] = train([] { return std::make_unique<ToyEnv>(); }, 500, 99, p);
    CHECK(qa.serialize() == qb.serialize());
    auto [qc, sc] = train([] { return std::make_unique<ToyEnv>(); }, 500, 100, p);
    CHECK(qa.serialize() != qc.serialize());
}

TEST_CASE("training summary serializes per-episode metrics") {
    RlParams p;
    p.max_steps_per_episode = 5;
    auto [q, summary] = train([] { return std::make_unique<ToyEnv>(); }, 3, 1, p);
    const std::string json = summary.to_json();
    CHECK(json.find("per_episode") != std::string::npos);
    CHECK(json.find("mean_reward") != std::string::npos);
}
