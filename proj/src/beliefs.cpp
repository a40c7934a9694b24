#include "patchgame/beliefs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace patchgame {

Beta update_detection(const Beta& b, int o) {
    return Beta{b.alpha + static_cast<double>(o), b.beta + static_cast<double>(1 - o)};
}

AttackerBelief initial_attacker_belief(const SystemModel& system, const BeliefParams& p) {
    AttackerBelief b;
    for (const auto& v : system.vulnerabilities) b.patch[v.id] = p.patch_prior;
    for (const auto& a : system.assets) b.comp[a.id] = p.attacker_comp_prior;
    b.det = Beta{1.0, 1.0};
    return b;
}

DefenderBelief initial_defender_belief(const SystemModel& system) {
    DefenderBelief b;
    b.stage = {0.9, 0.1, 0.0, 0.0, 0.0, 0.0, 0.0};
    for (const auto& a : system.assets) b.comp[a.id] = {1.0, 0.0, 0.0};
    b.det = Beta{1.0, 1.0};
    return b;
}

std::array<StageDist, kStageCount> stage_transition_matrix(const BeliefParams& p) {
    std::array<StageDist, kStageCount> t{};
    for (int k = 0; k < kStageCount; ++k) {
        StageDist row{};
        row[k] = p.stage_stay;
        if (k + 1 < kStageCount) row[k + 1] = p.stage_advance;
        if (k - 1 >= 0) row[k - 1] = p.stage_fallback;
        double sum = 0.0;
        for (double x : row) sum += x;
        for (double& x : row) x /= sum;
        t[k] = row;
    }
    return t;
}

CompDist categorical_posterior(const CompDist& prior, const CompDist& likelihood) {
    CompDist post{};
    double z = 0.0;
    for (int i = 0; i < 3; ++i) {
        post[i] = likelihood[i] * prior[i];
        z += post[i];
    }
    if (z <= 0.0) throw std::runtime_error("categorical update: impossible observation");
    for (double& x : post) x /= z;
    return post;
}

double patch_belief_from_signal(double prior, int signal, double true_positive,
                                double false_positive) {
    // signal = 1: an "unpatched" reading; hypothesis is "patched".
    const double like_patched = signal == 1 ? false_positive : 1.0 - false_positive;
    const double like_unpatched = signal == 1 ? true_positive : 1.0 - true_positive;
    const double z = like_patched * prior + like_unpatched * (1.0 - prior);
    if (z <= 0.0) return prior;
    return like_patched * prior / z;
}

AttackerBelief attacker_observe(const AttackerBelief& b, const std::string& asset_id,
                                const std::string& vuln_id, int outcome, int achieved_level,
                                double p_exploit, const BeliefParams& p) {
    AttackerBelief out = b;
    auto patch_it = out.patch.find(vuln_id);
    auto comp_it = out.comp.find(asset_id);
    if (patch_it == out.patch.end())
        throw std::runtime_error("attacker_observe: unknown vulnerability " + vuln_id);
    if (comp_it == out.comp.end())
        throw std::runtime_error("attacker_observe: unknown asset " + asset_id);

    if (outcome == 1) {
        patch_it->second = 0.0;
        CompDist pinned{};
        pinned[std::clamp(achieved_level, 0, 2)] = 1.0;
        comp_it->second = pinned;
    } else {
        const double prior = patch_it->second;
        const double fail_unpatched = std::clamp(1.0 - p_exploit, 0.0, 1.0);
        const double z = p.fail_given_patched * prior + fail_unpatched * (1.0 - prior);
        if (z > 0.0) patch_it->second = p.fail_given_patched * prior / z;

        CompDist fail_likelihood{};
        for (int l = 0; l < 3; ++l) fail_likelihood[l] = 1.0 - p.attacker_success_given_level[l];
        comp_it->second = categorical_posterior(comp_it->second, fail_likelihood);
    }
    return out;
}

DefenderBelief defender_update_stage(const DefenderBelief& b, const StageDist& obs_likelihood,
                                     const std::array<StageDist, kStageCount>& transition,
                                     double external_level, const StageDist& w_ckc,
                                     double belief_floor) {
    double like_sum = 0.0;
    for (double x : obs_likelihood) like_sum += x;
    if (like_sum <= 0.0)
        throw std::runtime_error("defender_update_stage: impossible observation");

    // Predict.
    StageDist predicted{};
    for (int k = 0; k < kStageCount; ++k) {
        for (int j = 0; j < kStageCount; ++j) predicted[j] += transition[k][j] * b.stage[k];
    }
    // Correct.
    StageDist corrected{};
    double z = 0.0;
    for (int k = 0; k < kStageCount; ++k) {
        corrected[k] = obs_likelihood[k] * predicted[k];
        z += corrected[k];
    }
    if (z <= 0.0) throw std::runtime_error("defender_update_stage: impossible observation");
    for (double& x : corrected) x /= z;

    // Threat modulation in logit space, softmax-renormalized.
    StageDist logits{};
    double max_logit = -1e300;
    for (int k = 0; k < kStageCount; ++k) {
        const double base = corrected[k] > 0.0 ? std::log(corrected[k]) : -1e300;
        logits[k] = base + external_level * w_ckc[k];
        max_logit = std::max(max_logit, logits[k]);
    }
    StageDist modulated{};
    double zsoft = 0.0;
    for (int k = 0; k < kStageCount; ++k) {
        modulated[k] = corrected[k] > 0.0 ? std::exp(logits[k] - max_logit) : 0.0;
        zsoft += modulated[k];
    }
    for (double& x : modulated) x /= zsoft;

    if (belief_floor > 0.0) {
        double zf = 0.0;
        for (double& x : modulated) {
            x = std::max(x, belief_floor);
            zf += x;
        }
        for (double& x : modulated) x /= zf;
    }

    DefenderBelief out = b;
    out.stage = modulated;
    return out;
}

DefenderBelief defender_update_comp(const DefenderBelief& b, const std::string& asset_id,
                                    const CompDist& indicator_likelihood) {
    DefenderBelief out = b;
    auto it = out.comp.find(asset_id);
    if (it == out.comp.end())
        throw std::runtime_error("defender_update_comp: unknown asset " + asset_id);
    it->second = categorical_posterior(it->second, indicator_likelihood);
    return out;
}

} // namespace patchgame
