#include "patchgame/rl_adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace patchgame {

namespace {

int fraction_bin(double f) {
    if (f < 0.25) return 0;
    if (f < 0.5) return 1;
    if (f < 0.75) return 2;
    return 3;
}

} // namespace

void RlEnvironment::fill_episode_stats(EpisodeStats& stats) const { (void)stats; }

RlState discretize_state(double comp_fraction, int high_risk_count, double budget_fraction) {
    RlState s;
    s.comp_bin = fraction_bin(std::clamp(comp_fraction, 0.0, 1.0));
    if (high_risk_count <= 0) {
        s.high_risk_bin = 0;
    } else if (high_risk_count <= 2) {
        s.high_risk_bin = 1;
    } else if (high_risk_count <= 5) {
        s.high_risk_bin = 2;
    } else {
        s.high_risk_bin = 3;
    }
    s.budget_bin = fraction_bin(std::clamp(budget_fraction, 0.0, 1.0));
    return s;
}

double compute_reward(const RewardSnapshot& s, const RlParams& p) {
    const double value_norm = s.total_business_value > 0.0
                                  ? s.preserved_value / s.total_business_value
                                  : 0.0;
    const double cost = std::max(s.cumulative_patch_cost, p.roi_cost_floor);
    const double roi_norm = (s.preserved_value / cost) / p.roi_norm_scale;
    const double patch_norm =
        s.per_step_limit > 0 ? static_cast<double>(s.patches_applied) / s.per_step_limit : 0.0;
    const double critical_norm =
        s.initial_critical > 0
            ? static_cast<double>(s.unpatched_critical) / s.initial_critical
            : 0.0;

    double r = p.reward_w_value * value_norm + p.reward_w_roi * roi_norm +
               p.reward_w_patch * patch_norm - p.reward_w_critical * critical_norm;
    if (p.beta_threat_term > 0.0) {
        r += p.beta_threat_term * (1.0 - s.external_threat_level);
    }
    return std::clamp(r, -1.0, 1.0);
}

double QTable::value(const RlState& s, int action) const {
    auto it = table_.find(s);
    if (it == table_.end()) return 0.0;
    return it->second[static_cast<std::size_t>(action)];
}

std::vector<double>& QTable::row(const RlState& s) {
    auto it = table_.find(s);
    if (it == table_.end()) {
        it = table_.emplace(s, std::vector<double>(static_cast<std::size_t>(n_actions_), 0.0))
                 .first;
    }
    return it->second;
}

int QTable::best_action(const RlState& s) const {
    auto it = table_.find(s);
    if (it == table_.end()) return 0;
    int best = 0;
    for (int a = 1; a < n_actions_; ++a) {
        if (it->second[a] > it->second[best]) best = a;
    }
    return best;
}

double QTable::max_value(const RlState& s) const {
    auto it = table_.find(s);
    if (it == table_.end()) return 0.0;
    return *std::max_element(it->second.begin(), it->second.end());
}

std::string QTable::serialize() const {
    std::ostringstream out;
    out.precision(17);
    out << "comp_bin\thigh_risk_bin\tbudget_bin";
    for (int a = 0; a < n_actions_; ++a) out << "\tq" << a;
    out << '\n';
    for (const auto& [s, q] : table_) {
        out << s.comp_bin << '\t' << s.high_risk_bin << '\t' << s.budget_bin;
        for (double v : q) out << '\t' << v;
        out << '\n';
    }
    return out.str();
}

QTable QTable::deserialize(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty q-table");
    int n_actions = -3;
    {
        std::istringstream header(line);
        std::string col;
        while (header >> col) ++n_actions;
    }
    if (n_actions <= 0) throw std::runtime_error("q-table header has no action columns");

    QTable t(n_actions);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        RlState s;
        row >> s.comp_bin >> s.high_risk_bin >> s.budget_bin;
        std::vector<double> q(static_cast<std::size_t>(n_actions), 0.0);
        for (int a = 0; a < n_actions; ++a) row >> q[static_cast<std::size_t>(a)];
        if (!row) throw std::runtime_error("malformed q-table row: " + line);
        t.table_[s] = std::move(q);
    }
    return t;
}

void QTable::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write q-table: " + path);
    out << serialize();
}

QTable QTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read q-table: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return deserialize(ss.str());
}

std::string TrainingSummary::to_json() const {
    nlohmann::json doc;
    doc["episodes"] = episodes;
    doc["mean_reward"] = mean_reward;
    doc["mean_roi"] = mean_roi;
    doc["mean_value_preserved"] = mean_value_preserved;
    doc["mean_compromised"] = mean_compromised;
    nlohmann::json eps = nlohmann::json::array();
    for (const auto& e : per_episode) {
        eps.push_back({{"reward", e.total_reward},
                       {"steps", e.steps},
                       {"value_preserved", e.final_value_fraction},
                       {"roi", e.roi},
                       {"compromised", e.compromised_assets}});
    }
    doc["per_episode"] = std::move(eps);
    return doc.dump(2);
}

std::pair<QTable, TrainingSummary> train(const EnvFactory& make_env, int episodes,
                                         uint64_t seed, const RlParams& params) {
    if (episodes < 1) throw std::invalid_argument("train: episodes must be >= 1");
    auto env = make_env();
    QTable q(env->action_count());
    TrainingSummary summary;
    summary.episodes = episodes;
    Rng rng(seed);

    const double decay_span = std::max(1.0, params.epsilon_decay_fraction * episodes);

    for (int ep = 0; ep < episodes; ++ep) {
        const double progress = static_cast<double>(ep) / decay_span;
        const double eps = progress >= 1.0 ? params.epsilon_end
                                           : params.epsilon_start +
                                                 (params.epsilon_end - params.epsilon_start) *
                                                     progress;

        RlState state = env->reset();
        EpisodeStats stats;
        for (int step = 0; step < params.max_steps_per_episode; ++step) {
            int action;
            if (rng.uniform() < eps) {
                action = static_cast<int>(rng.below(static_cast<std::size_t>(q.action_count())));
            } else {
                action = q.best_action(state);
            }

            auto result = env->step(action);
            const double bootstrap = result.done ? 0.0 : q.max_value(result.state);
            double& cell = q.row(state)[static_cast<std::size_t>(action)];
            cell += params.alpha * (result.reward + params.gamma * bootstrap - cell);

            stats.total_reward += result.reward;
            ++stats.steps;
            state = result.state;
            if (result.done) break;
        }
        env->fill_episode_stats(stats);
        summary.per_episode.push_back(stats);
    }

    for (const auto& e : summary.per_episode) {
        summary.mean_reward += e.total_reward;
        summary.mean_roi += e.roi;
        summary.mean_value_preserved += e.final_value_fraction;
        summary.mean_compromised += e.compromised_assets;
    }
    const double n = static_cast<double>(summary.per_episode.size());
    summary.mean_reward /= n;
    summary.mean_roi /= n;
    summary.mean_value_preserved /= n;
    summary.mean_compromised /= n;
    return {std::move(q), std::move(summary)};
}

} // namespace patchgame
