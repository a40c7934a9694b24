#include "patchgame/threat_intel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace patchgame {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

// Parses a simple comma-separated file. First row is a header and is
// skipped; blank lines ignored.
std::vector<std::vector<std::string>> read_csv(const std::string& path, bool required) {
    std::ifstream in(path);
    std::vector<std::vector<std::string>> rows;
    if (!in) {
        if (required) fail("cannot open corpus table: " + path);
        return rows;
    }
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

void require_cols(const std::vector<std::string>& row, std::size_t n, const std::string& table) {
    if (row.size() < n) fail("malformed row in " + table);
}

void check_technique(const std::string& id, const std::string& table) {
    if (!technique_tactic(id)) {
        fail("corpus table " + table + " names technique " + id + " missing from the taxonomy");
    }
}

} // namespace

CtiCorpus load_corpus(const std::string& dir) {
    CtiCorpus c;
    for (const auto& row : read_csv(dir + "/cwe_capec.csv", true)) {
        require_cols(row, 2, "cwe_capec.csv");
        c.cwe_to_capec.emplace(row[0], row[1]);
    }
    for (const auto& row : read_csv(dir + "/capec_ttp.csv", true)) {
        require_cols(row, 2, "capec_ttp.csv");
        check_technique(row[1], "capec_ttp.csv");
        c.capec_to_ttp.emplace(row[0], row[1]);
    }
    for (const auto& row : read_csv(dir + "/cve_ttp.csv", true)) {
        require_cols(row, 2, "cve_ttp.csv");
        check_technique(row[1], "cve_ttp.csv");
        c.cve_to_ttp.emplace(row[0], row[1]);
    }
    for (const auto& row : read_csv(dir + "/kev.csv", true)) {
        require_cols(row, 1, "kev.csv");
        c.kev_set.insert(row[0]);
    }
    for (const auto& row : read_csv(dir + "/campaigns.csv", false)) {
        require_cols(row, 2, "campaigns.csv");
        c.campaign_tags[row[0]].push_back(row[1]);
    }
    for (const auto& row : read_csv(dir + "/cwe_canfollow.csv", false)) {
        require_cols(row, 2, "cwe_canfollow.csv");
        c.cwe_canfollow.insert({row[0], row[1]});
    }
    return c;
}

LikelihoodModel load_likelihood_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open likelihood model: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        fail(std::string("likelihood model parse error: ") + e.what());
    }
    LikelihoodModel m;
    m.bias = doc.value("bias", 0.0);
    const auto w = doc.value("weights", nlohmann::json::object());
    m.w_cvss_norm = w.value("cvss_norm", 0.0);
    m.w_epss = w.value("epss", 0.0);
    m.w_kev = w.value("kev", 0.0);
    m.w_exploit_available = w.value("exploit_available", 0.0);
    m.w_campaign = w.value("campaign", 0.0);
    for (const auto& [k, v] : doc.value("overrides", nlohmann::json::object()).items()) {
        m.overrides[k] = v.get<double>();
    }
    return m;
}

std::vector<std::string> map_vuln_to_ttps(const Vulnerability& v, const CtiCorpus& corpus) {
    std::set<std::string> out;
    auto [dlo, dhi] = corpus.cve_to_ttp.equal_range(v.id);
    for (auto it = dlo; it != dhi; ++it) out.insert(it->second);
    for (const auto& cwe : v.cwe_ids) {
        auto [clo, chi] = corpus.cwe_to_capec.equal_range(cwe);
        for (auto cit = clo; cit != chi; ++cit) {
            auto [tlo, thi] = corpus.capec_to_ttp.equal_range(cit->second);
            for (auto tit = tlo; tit != thi; ++tit) out.insert(tit->second);
        }
    }
    return {out.begin(), out.end()};
}

std::vector<Tactic> mapped_tactics(const Vulnerability& v, const CtiCorpus& corpus) {
    std::set<Tactic> tactics;
    for (const auto& ttp : map_vuln_to_ttps(v, corpus)) {
        if (auto t = technique_tactic(ttp)) tactics.insert(*t);
    }
    return {tactics.begin(), tactics.end()};
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double exploit_likelihood(const Vulnerability& v, const CtiCorpus& corpus,
                          const LikelihoodModel& m) {
    auto it = m.overrides.find(v.id);
    if (it != m.overrides.end()) return std::clamp(it->second, 0.0, 1.0);
    const double z = m.bias + m.w_cvss_norm * (v.cvss / 10.0) + m.w_epss * v.epss +
                     m.w_kev * (corpus.in_kev(v.id) ? 1.0 : 0.0) +
                     m.w_exploit_available * (v.exploit_available ? 1.0 : 0.0) +
                     m.w_campaign * (corpus.has_campaign(v.id) ? 1.0 : 0.0);
    return sigmoid(z);
}

namespace {

ThreatScores compute_scores(const SystemModel& system, const CtiCorpus& corpus,
                            const LikelihoodModel& m,
                            const std::map<std::string, int>* patch_state) {
    ThreatScores s;
    for (const auto& v : system.vulnerabilities) {
        s.l[v.id] = exploit_likelihood(v, corpus, m);
    }
    for (const auto& a : system.assets) {
        double miss = 1.0;
        for (const auto* v : system.vulnerabilities_on_asset(a.id)) {
            bool patched = v->patched;
            if (patch_state != nullptr) {
                auto it = patch_state->find(v->id);
                patched = it != patch_state->end() && it->second != 0;
            }
            if (!patched) miss *= (1.0 - s.l[v->id]);
        }
        s.tr[a.id] = 1.0 - miss;
        s.external_level = std::max(s.external_level, s.tr[a.id]);
    }
    return s;
}

} // namespace

ThreatScores threat_scores(const SystemModel& system, const CtiCorpus& corpus,
                           const LikelihoodModel& m) {
    return compute_scores(system, corpus, m, nullptr);
}

ThreatScores threat_scores_with_patches(const SystemModel& system, const CtiCorpus& corpus,
                                        const LikelihoodModel& m,
                                        const std::map<std::string, int>& patch_state) {
    return compute_scores(system, corpus, m, &patch_state);
}

LikelihoodModel fit_likelihood_model(const std::string& csv_path, int epochs, double lr) {
    struct Row {
        double x[5];
        double y;
    };
    std::vector<Row> rows;
    for (const auto& cells : read_csv(csv_path, true)) {
        if (cells.size() < 6) fail("malformed row in " + csv_path);
        Row r{};
        r.x[0] = std::stod(cells[0]) / 10.0; // cvss
        r.x[1] = std::stod(cells[1]);        // epss
        r.x[2] = std::stod(cells[2]);        // kev
        r.x[3] = std::stod(cells[3]);        // exploit_available
        r.x[4] = std::stod(cells[4]);        // campaign
        r.y = std::stod(cells[5]);
        rows.push_back(r);
    }
    if (rows.empty()) fail("empty training set: " + csv_path);

    double w[5] = {0, 0, 0, 0, 0};
    double b = 0.0;
    for (int e = 0; e < epochs; ++e) {
        double gw[5] = {0, 0, 0, 0, 0};
        double gb = 0.0;
        for (const auto& r : rows) {
            double z = b;
            for (int i = 0; i < 5; ++i) z += w[i] * r.x[i];
            const double err = sigmoid(z) - r.y;
            for (int i = 0; i < 5; ++i) gw[i] += err * r.x[i];
            gb += err;
        }
        const double n = static_cast<double>(rows.size());
        for (int i = 0; i < 5; ++i) w[i] -= lr * gw[i] / n;
        b -= lr * gb / n;
    }

    LikelihoodModel m;
    m.w_cvss_norm = w[0];
    m.w_epss = w[1];
    m.w_kev = w[2];
    m.w_exploit_available = w[3];
    m.w_campaign = w[4];
    m.bias = b;
    return m;
}

} // namespace patchgame
