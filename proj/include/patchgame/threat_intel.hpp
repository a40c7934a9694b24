#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "patchgame/system_model.hpp"
#include "patchgame/taxonomy.hpp"

namespace patchgame {

// File-backed threat-intelligence tables: CWE->CAPEC->technique chains,
// direct CVE->technique mappings, the known-exploited set, campaign tags
// and CWE chaining (CanFollow) pairs.
struct CtiCorpus {
    std::multimap<std::string, std::string> cwe_to_capec;
    std::multimap<std::string, std::string> capec_to_ttp;
    std::multimap<std::string, std::string> cve_to_ttp;
    std::set<std::string> kev_set;
    std::map<std::string, std::vector<std::string>> campaign_tags;
    std::set<std::pair<std::string, std::string>> cwe_canfollow;

    bool in_kev(const std::string& cve) const { return kev_set.count(cve) > 0; }
    bool has_campaign(const std::string& cve) const { return campaign_tags.count(cve) > 0; }
    bool can_follow(const std::string& cwe_src, const std::string& cwe_dst) const {
        return cwe_canfollow.count({cwe_src, cwe_dst}) > 0;
    }
};

// Logistic exploit-likelihood model over fixed vulnerability features:
// [cvss/10, epss, kev flag, exploit-available flag, campaign flag].
struct LikelihoodModel {
    double bias = 0.0;
    double w_cvss_norm = 0.0;
    double w_epss = 0.0;
    double w_kev = 0.0;
    double w_exploit_available = 0.0;
    double w_campaign = 0.0;

    // Per-CVE likelihood overrides, applied after the logistic model.
    std::map<std::string, double> overrides;
};

struct ThreatScores {
    std::map<std::string, double> tr; // asset id -> [0, 1]
    std::map<std::string, double> l;  // vuln id -> (0, 1)
    double external_level = 0.0;      // max tr, 0 if empty

    double likelihood(const std::string& vuln_id) const {
        auto it = l.find(vuln_id);
        return it == l.end() ? 0.0 : it->second;
    }
    double relevance(const std::string& asset_id) const {
        auto it = tr.find(asset_id);
        return it == tr.end() ? 0.0 : it->second;
    }
};

// Corpus directory layout: cwe_capec.csv, capec_ttp.csv, cve_ttp.csv,
// kev.csv, campaigns.csv, cwe_canfollow.csv (the last two optional).
// Throws std::runtime_error on malformed rows or techniques missing from
// the taxonomy.
CtiCorpus load_corpus(const std::string& dir);

LikelihoodModel load_likelihood_model(const std::string& path);

// Union of direct CVE mappings and CWE->CAPEC->technique chains,
// deduplicated, sorted.
std::vector<std::string> map_vuln_to_ttps(const Vulnerability& v, const CtiCorpus& corpus);

// Tactics reachable from the technique mapping of v, sorted by enum order.
std::vector<Tactic> mapped_tactics(const Vulnerability& v, const CtiCorpus& corpus);

double sigmoid(double z);

// sigma(w . x_v + b), then per-CVE override if present (clamped to [0,1]).
double exploit_likelihood(const Vulnerability& v, const CtiCorpus& corpus,
                          const LikelihoodModel& m);

// L(v) for every vulnerability, TR(a) as a noisy-OR over unpatched
// vulnerabilities of each asset, external level = max TR.
ThreatScores threat_scores(const SystemModel& system, const CtiCorpus& corpus,
                           const LikelihoodModel& m);

// Same, but with patch state supplied externally (live game state) instead
// of the load-time patched flags.
ThreatScores threat_scores_with_patches(const SystemModel& system, const CtiCorpus& corpus,
                                        const LikelihoodModel& m,
                                        const std::map<std::string, int>& patch_state);

// Gradient-descent fit of the likelihood model on a labeled CSV
// (cvss,epss,kev,exploit_available,campaign,label). Utility for refreshing
// the bundled weights; returns the trained model.
LikelihoodModel fit_likelihood_model(const std::string& csv_path, int epochs, double lr);

} // namespace patchgame
