#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "patchgame/system_model.hpp"
#include "patchgame/taxonomy.hpp"

namespace patchgame {

struct Beta {
    double alpha = 1.0;
    double beta = 1.0;
    double mean() const { return alpha / (alpha + beta); }
};

// Conjugate update for a binary observation: alpha += o, beta += 1 - o.
Beta update_detection(const Beta& b, int o);

using CompDist = std::array<double, 3>; // distribution over compromise levels
using StageDist = std::array<double, kStageCount>;

struct AttackerBelief {
    std::map<std::string, double> patch; // vuln id -> P(patched)
    std::map<std::string, CompDist> comp;
    Beta det;
};

struct DefenderBelief {
    StageDist stage{};
    std::map<std::string, CompDist> comp;
    Beta det;
};

struct BeliefParams {
    // P(exploit fails | vulnerability patched); the unpatched failure
    // likelihood comes from 1 - P_exploit of the attempt.
    double fail_given_patched = 0.9;

    // Attacker-side success likelihood by current compromise level,
    // P(o=1 | level).
    CompDist attacker_success_given_level = {0.5, 0.65, 0.8};

    // Prior P(patched) for every vulnerability at run start.
    double patch_prior = 0.2;

    // Attacker's initial compromise belief per asset. Slightly diffuse so
    // that value-weighted target scores are informative from step one.
    CompDist attacker_comp_prior = {0.9, 0.08, 0.02};

    // Scan signal quality: P(sees "unpatched" | truly unpatched) and
    // P(sees "unpatched" | patched).
    double scan_true_positive = 0.8;
    double scan_false_positive = 0.2;

    // Per-step pull toward "patched" for vulnerabilities with recent patch
    // activity visible in the feature vector.
    double recent_patch_signal = 0.35;

    // Stage transition model T(k' | k), built from stay/advance/fallback
    // mass (rows renormalized at the chain boundaries).
    double stage_stay = 0.65;
    double stage_advance = 0.25;
    double stage_fallback = 0.10;

    // Observation likelihood P(detected activity at stage j | true stage k)
    // by |j - k| distance; quiet steps carry a flat likelihood.
    double obs_match = 0.6;
    double obs_near = 0.2;
    double obs_far = 0.05;
    double obs_quiet = 0.5;

    // Threat modulation weights per stage (logit boost scaled by the
    // external threat level).
    StageDist w_ckc = {0.1, 0.1, 0.4, 0.8, 0.6, 0.6, 0.7};

    // Optional minimum mass to keep degenerate beliefs escapable.
    double belief_floor = 0.0;

    // Indicator likelihoods over compromise levels for defender updates.
    CompDist exploit_detected_likelihood = {0.2, 0.5, 0.3};
    CompDist lateral_detected_likelihood = {0.1, 0.3, 0.6};
    CompDist recon_detected_likelihood = {0.6, 0.25, 0.15};
};

AttackerBelief initial_attacker_belief(const SystemModel& system, const BeliefParams& p);
DefenderBelief initial_defender_belief(const SystemModel& system);

// Builds the 7x7 stage transition matrix from the stay/advance/fallback
// parameters; row k holds T(k' | k).
std::array<StageDist, kStageCount> stage_transition_matrix(const BeliefParams& p);

// Attacker belief revision after an exploit attempt on (asset, vuln).
// Success pins the patch belief to 0 and moves the compromise belief onto
// the achieved level; failure applies two-hypothesis Bayes on the patch
// belief and a categorical update on the compromise belief. The detection
// belief is updated separately via update_detection. Throws on unknown
// target ids.
AttackerBelief attacker_observe(const AttackerBelief& b, const std::string& asset_id,
                                const std::string& vuln_id, int outcome, int achieved_level,
                                double p_exploit, const BeliefParams& p);

// Generic single-variable Bayes: posterior(i) proportional to
// likelihood(i) * prior(i). Throws if the evidence is impossible
// (all-zero posterior mass).
CompDist categorical_posterior(const CompDist& prior, const CompDist& likelihood);

// Predict (transition), correct (Bayes with the observation likelihood),
// then modulate logits by external_level * w_ckc and renormalize via
// softmax. Throws when the likelihood is all-zero.
DefenderBelief defender_update_stage(const DefenderBelief& b, const StageDist& obs_likelihood,
                                     const std::array<StageDist, kStageCount>& transition,
                                     double external_level, const StageDist& w_ckc,
                                     double belief_floor = 0.0);

// Per-asset categorical update with an indicator likelihood; other assets
// are untouched.
DefenderBelief defender_update_comp(const DefenderBelief& b, const std::string& asset_id,
                                    const CompDist& indicator_likelihood);

// Scan-style refinement of a Bernoulli patch belief: signal = 1 means an
// "unpatched" reading.
double patch_belief_from_signal(double prior, int signal, double true_positive,
                                double false_positive);

} // namespace patchgame
