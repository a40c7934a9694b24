#include "patchgame/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace patchgame {

using nlohmann::json;

namespace {

void get(const json& j, const char* key, double& out) {
    if (j.contains(key)) out = j.at(key).get<double>();
}
void get(const json& j, const char* key, int& out) {
    if (j.contains(key)) out = j.at(key).get<int>();
}
void get(const json& j, const char* key, uint64_t& out) {
    if (j.contains(key)) out = j.at(key).get<uint64_t>();
}
void get(const json& j, const char* key, std::string& out) {
    if (j.contains(key)) out = j.at(key).get<std::string>();
}

void apply_simulation(SimulationConfig& cfg, const json& j) {
    get(j, "scenario", cfg.scenario_path);
    get(j, "corpus_dir", cfg.corpus_dir);
    get(j, "likelihood_model", cfg.likelihood_model_path);
    if (j.contains("strategy")) {
        auto k = parse_strategy(j.at("strategy").get<std::string>());
        if (!k) throw std::runtime_error("unknown strategy: " + j.at("strategy").get<std::string>());
        cfg.strategy = *k;
    }
    if (j.contains("attacker")) {
        const std::string a = j.at("attacker").get<std::string>();
        if (a == "scripted") {
            cfg.attacker = AttackerKind::Scripted;
        } else if (a == "adaptive") {
            cfg.attacker = AttackerKind::Adaptive;
        } else {
            throw std::runtime_error("unknown attacker kind: " + a);
        }
    }
    get(j, "defender_budget", cfg.budgets.defender);
    get(j, "attacker_budget", cfg.budgets.attacker);
    get(j, "horizon", cfg.horizon);
    get(j, "runs", cfg.runs);
    get(j, "master_seed", cfg.master_seed);
    get(j, "patch_limit_per_step", cfg.patch_limit_per_step);
    get(j, "rl_train_episodes", cfg.rl_train_episodes);
}

void apply_costs(CostParams& p, const json& j) {
    get(j, "defender_rate", p.defender_rate);
    get(j, "attacker_rate", p.attacker_rate);
    if (j.contains("patch_hours")) {
        p.patch_hours[0] = j.at("patch_hours").at(0).get<double>();
        p.patch_hours[1] = j.at("patch_hours").at(1).get<double>();
    }
    if (j.contains("exploit_hours")) {
        p.exploit_hours[0] = j.at("exploit_hours").at(0).get<double>();
        p.exploit_hours[1] = j.at("exploit_hours").at(1).get<double>();
    }
    if (j.contains("ac_weight")) {
        p.ac_weight[0] = j.at("ac_weight").at(0).get<double>();
        p.ac_weight[1] = j.at("ac_weight").at(1).get<double>();
    }
    get(j, "downtime_norm", p.downtime_norm);
    get(j, "downtime_base_hours", p.downtime_base_hours);
    get(j, "downtime_reboot_multiplier", p.downtime_reboot_multiplier);
    if (j.contains("asset_type_factor")) {
        for (int i = 0; i < 3; ++i) {
            p.asset_type_factor[i] = j.at("asset_type_factor").at(i).get<double>();
        }
    }
    get(j, "patch_size_factor", p.patch_size_factor);
    get(j, "dependency_unit_fraction", p.dependency_unit_fraction);
    get(j, "reboot_unit_fraction", p.reboot_unit_fraction);
    if (j.contains("vuln_weight")) {
        for (int i = 0; i < 2; ++i) {
            for (int k = 0; k < 3; ++k) {
                p.vuln_weight[i][k] = j.at("vuln_weight").at(i).at(k).get<double>();
            }
        }
    }
    get(j, "availability_cost_scale", p.availability_cost_scale);
    if (j.contains("availability_cost_mode")) {
        const std::string mode = j.at("availability_cost_mode").get<std::string>();
        if (mode == "inverse") {
            p.availability_cost_mode = AvailabilityCostMode::Inverse;
        } else if (mode == "literal") {
            p.availability_cost_mode = AvailabilityCostMode::Literal;
        } else {
            throw std::runtime_error("unknown availability_cost_mode: " + mode);
        }
    }
    if (j.contains("detection_risk_scale")) {
        for (int i = 0; i < 3; ++i) {
            p.detection_risk_scale[i] = j.at("detection_risk_scale").at(i).get<double>();
        }
    }
    if (j.contains("tactic_factor")) {
        for (int i = 0; i < kStageCount; ++i) {
            p.tactic_factor[static_cast<std::size_t>(i)] =
                j.at("tactic_factor").at(i).get<double>();
        }
    }
}

void apply_beliefs(BeliefParams& p, const json& j) {
    get(j, "fail_given_patched", p.fail_given_patched);
    get(j, "patch_prior", p.patch_prior);
    get(j, "scan_true_positive", p.scan_true_positive);
    get(j, "scan_false_positive", p.scan_false_positive);
    get(j, "recent_patch_signal", p.recent_patch_signal);
    get(j, "stage_stay", p.stage_stay);
    get(j, "stage_advance", p.stage_advance);
    get(j, "stage_fallback", p.stage_fallback);
    get(j, "obs_match", p.obs_match);
    get(j, "obs_near", p.obs_near);
    get(j, "obs_far", p.obs_far);
    get(j, "obs_quiet", p.obs_quiet);
    get(j, "belief_floor", p.belief_floor);
    if (j.contains("w_ckc")) {
        for (int k = 0; k < kStageCount; ++k) {
            p.w_ckc[static_cast<std::size_t>(k)] = j.at("w_ckc").at(k).get<double>();
        }
    }
    auto comp3 = [&](const char* key, CompDist& out) {
        if (j.contains(key)) {
            for (int i = 0; i < 3; ++i) out[static_cast<std::size_t>(i)] = j.at(key).at(i).get<double>();
        }
    };
    comp3("attacker_success_given_level", p.attacker_success_given_level);
    comp3("attacker_comp_prior", p.attacker_comp_prior);
    comp3("exploit_detected_likelihood", p.exploit_detected_likelihood);
    comp3("lateral_detected_likelihood", p.lateral_detected_likelihood);
    comp3("recon_detected_likelihood", p.recon_detected_likelihood);
}

void apply_engine(EngineParams& p, const json& j) {
    get(j, "det_decay", p.det_decay);
    get(j, "recency_window", p.recency_window);
    get(j, "reset_cost_fraction", p.reset_cost_fraction);
    get(j, "scan_cost", p.scan_cost);
    get(j, "prepare_cost", p.prepare_cost);
    get(j, "move_cost", p.move_cost);
    get(j, "deploy_cost", p.deploy_cost);
    get(j, "deploy_detection_prob", p.deploy_detection_prob);
}

void apply_payoff(PayoffParams& p, const json& j) {
    get(j, "c_det", p.c_det);
    get(j, "psi", p.psi);
    if (j.contains("gamma")) {
        p.gamma = j.at("gamma").get<double>();
        if (p.gamma <= 0.9 || p.gamma >= 0.99) {
            // Out of the recommended band; accepted but flagged.
            std::fprintf(stderr, "warning: gamma=%g outside (0.9, 0.99)\n", p.gamma);
        }
    }
}

void apply_attacker(ExploitabilityParams& p, const json& j) {
    get(j, "theta_patch", p.theta_patch);
    get(j, "theta_f", p.theta_f);
    get(j, "epsilon", p.epsilon);
    get(j, "eta_slope", p.eta_slope);
    get(j, "eta_cap", p.eta_cap);
    get(j, "k_logistic", p.k_logistic);
    get(j, "tau_bv_fraction", p.tau_bv_fraction);
    get(j, "explore_rate", p.explore_rate);
    get(j, "cooldown_after", p.cooldown_after);
    get(j, "cooldown_len", p.cooldown_len);
    get(j, "attempt_damping", p.attempt_damping);
    get(j, "failure_decay_period", p.failure_decay_period);
    get(j, "tactic_fit_stage_match", p.tactic_fit_stage_match);
    get(j, "tactic_fit_mismatch", p.tactic_fit_mismatch);
}

void apply_defender(DefenderWeights& w, const json& j) {
    get(j, "w_t", w.w_t);
    get(j, "w_r", w.w_r);
    get(j, "w_b", w.w_b);
    get(j, "w_c", w.w_c);
    get(j, "w_tr", w.w_tr);
    get(j, "f_bv_scale", w.f_bv_scale);
    get(j, "recency_tau", w.recency_tau);
    get(j, "recency_horizon", w.recency_horizon);
    get(j, "epsilon_complexity_high", w.epsilon_complexity_high);
    get(j, "l_adjust_weight", w.l_adjust_weight);
    get(j, "epss_weight", w.epss_weight);
    get(j, "adapt_base_fraction", w.adapt_base_fraction);
    get(j, "compromised_mass_threshold", w.compromised_mass_threshold);
    if (j.contains("risk_multiplier")) {
        for (int t = 0; t < 3; ++t) {
            for (int k = 0; k < kStageCount; ++k) {
                w.risk_multiplier[t][k] = j.at("risk_multiplier").at(t).at(k).get<double>();
            }
        }
    }
}

void apply_rl(RlParams& p, const json& j) {
    get(j, "alpha", p.alpha);
    get(j, "gamma", p.gamma);
    get(j, "epsilon_start", p.epsilon_start);
    get(j, "epsilon_end", p.epsilon_end);
    get(j, "epsilon_decay_fraction", p.epsilon_decay_fraction);
    get(j, "reward_w_value", p.reward_w_value);
    get(j, "reward_w_roi", p.reward_w_roi);
    get(j, "reward_w_patch", p.reward_w_patch);
    get(j, "reward_w_critical", p.reward_w_critical);
    get(j, "roi_norm_scale", p.roi_norm_scale);
    get(j, "roi_cost_floor", p.roi_cost_floor);
    get(j, "critical_cvss_threshold", p.critical_cvss_threshold);
    get(j, "beta_threat_term", p.beta_threat_term);
    get(j, "max_steps_per_episode", p.max_steps_per_episode);
    get(j, "default_config_index", p.default_config_index);
    get(j, "q_override_margin", p.q_override_margin);
}

} // namespace

void apply_config_text(SimulationConfig& cfg, const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("config parse error: ") + e.what());
    }
    if (doc.contains("simulation")) apply_simulation(cfg, doc.at("simulation"));
    if (doc.contains("risk")) get(doc.at("risk"), "i_max", cfg.risk.i_max);
    if (doc.contains("costs")) apply_costs(cfg.costs, doc.at("costs"));
    if (doc.contains("beliefs")) apply_beliefs(cfg.beliefs, doc.at("beliefs"));
    if (doc.contains("engine")) apply_engine(cfg.engine, doc.at("engine"));
    if (doc.contains("payoff")) apply_payoff(cfg.payoff, doc.at("payoff"));
    if (doc.contains("attacker")) apply_attacker(cfg.attacker_params, doc.at("attacker"));
    if (doc.contains("defender")) apply_defender(cfg.defender, doc.at("defender"));
    if (doc.contains("rl")) apply_rl(cfg.rl, doc.at("rl"));
    if (doc.contains("threat")) {
        const auto& t = doc.at("threat");
        for (const auto& [cve, value] :
             t.value("likelihood_overrides", json::object()).items()) {
            cfg.likelihood_overrides[cve] = value.get<double>();
        }
    }
}

void apply_config_file(SimulationConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    apply_config_text(cfg, ss.str());
}

std::string config_to_json(const SimulationConfig& cfg) {
    json doc;
    doc["simulation"] = {
        {"scenario", cfg.scenario_path},
        {"corpus_dir", cfg.corpus_dir},
        {"likelihood_model", cfg.likelihood_model_path},
        {"strategy", strategy_name(cfg.strategy)},
        {"attacker", cfg.attacker == AttackerKind::Scripted ? "scripted" : "adaptive"},
        {"defender_budget", cfg.budgets.defender},
        {"attacker_budget", cfg.budgets.attacker},
        {"horizon", cfg.horizon},
        {"runs", cfg.runs},
        {"master_seed", cfg.master_seed},
        {"patch_limit_per_step", cfg.patch_limit_per_step},
        {"rl_train_episodes", cfg.rl_train_episodes},
    };
    doc["risk"] = {{"i_max", cfg.risk.i_max}};
    doc["costs"] = {
        {"defender_rate", cfg.costs.defender_rate},
        {"attacker_rate", cfg.costs.attacker_rate},
        {"patch_hours", {cfg.costs.patch_hours[0], cfg.costs.patch_hours[1]}},
        {"exploit_hours", {cfg.costs.exploit_hours[0], cfg.costs.exploit_hours[1]}},
        {"ac_weight", {cfg.costs.ac_weight[0], cfg.costs.ac_weight[1]}},
        {"downtime_norm", cfg.costs.downtime_norm},
        {"availability_cost_scale", cfg.costs.availability_cost_scale},
        {"availability_cost_mode",
         cfg.costs.availability_cost_mode == AvailabilityCostMode::Inverse ? "inverse"
                                                                           : "literal"},
    };
    doc["payoff"] = {{"c_det", cfg.payoff.c_det}, {"psi", cfg.payoff.psi},
                     {"gamma", cfg.payoff.gamma}};
    return doc.dump(2);
}

} // namespace patchgame
