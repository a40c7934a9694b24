#include "patchgame/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace patchgame {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

template <typename T>
const T* find_by_id(const std::vector<T>& items, const std::string& id) {
    auto it = std::lower_bound(items.begin(), items.end(), id,
                               [](const T& a, const std::string& b) { return a.id < b; });
    if (it == items.end() || it->id != id) return nullptr;
    return &*it;
}

AssetType parse_asset_type(const std::string& s) {
    if (s == "it") return AssetType::It;
    if (s == "dmz") return AssetType::Dmz;
    if (s == "ot") return AssetType::Ot;
    fail("unknown asset_type: " + s);
}

ExploitMaturity parse_maturity(const std::string& s) {
    if (s == "none") return ExploitMaturity::None;
    if (s == "poc") return ExploitMaturity::Poc;
    if (s == "functional") return ExploitMaturity::Functional;
    if (s == "weaponized") return ExploitMaturity::Weaponized;
    fail("unknown exploit_maturity: " + s);
}

AttackComplexity parse_complexity(const std::string& s) {
    if (s == "low") return AttackComplexity::Low;
    if (s == "high") return AttackComplexity::High;
    fail("unknown attack_complexity: " + s);
}

PrivilegesRequired parse_privileges(const std::string& s) {
    if (s == "none") return PrivilegesRequired::None;
    if (s == "low") return PrivilegesRequired::Low;
    if (s == "high") return PrivilegesRequired::High;
    fail("unknown privileges_required: " + s);
}

std::vector<Edge> parse_edges(const json& arr) {
    std::vector<Edge> out;
    for (const auto& e : arr) {
        if (!e.is_array() || e.size() != 2) fail("edge must be a [src, dst] pair");
        out.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
    std::sort(out.begin(), out.end());
    return out;
}

json edges_to_json(const std::vector<Edge>& edges) {
    json arr = json::array();
    for (const auto& [a, b] : edges) arr.push_back(json::array({a, b}));
    return arr;
}

} // namespace

const std::string& asset_type_name(AssetType t) {
    static const std::string names[] = {"it", "dmz", "ot"};
    return names[static_cast<int>(t)];
}

const std::string& exploit_maturity_name(ExploitMaturity m) {
    static const std::string names[] = {"none", "poc", "functional", "weaponized"};
    return names[static_cast<int>(m)];
}

const Asset* SystemModel::find_asset(const std::string& id) const {
    return find_by_id(assets, id);
}

const Vulnerability* SystemModel::find_vulnerability(const std::string& id) const {
    return find_by_id(vulnerabilities, id);
}

const Host* SystemModel::find_host(const std::string& id) const {
    return find_by_id(hosts, id);
}

std::vector<const Asset*> SystemModel::assets_of_component(const std::string& component_id) const {
    std::vector<const Asset*> out;
    for (const auto& a : assets) {
        if (std::find(a.component_ids.begin(), a.component_ids.end(), component_id) !=
            a.component_ids.end()) {
            out.push_back(&a);
        }
    }
    return out;
}

std::vector<const Vulnerability*> SystemModel::vulnerabilities_on_asset(
    const std::string& asset_id) const {
    std::vector<const Vulnerability*> out;
    const Asset* a = find_asset(asset_id);
    if (a == nullptr) return out;
    for (const auto& v : vulnerabilities) {
        if (std::find(a->component_ids.begin(), a->component_ids.end(), v.component_id) !=
            a->component_ids.end()) {
            out.push_back(&v);
        }
    }
    return out;
}

double SystemModel::detection_prob(const std::string& asset_id) const {
    double miss = 1.0;
    for (const auto& d : detection_mechanisms) {
        if (d.target_id == asset_id) miss *= (1.0 - d.detection_prob);
    }
    return 1.0 - miss;
}

double SystemModel::total_business_value() const {
    double sum = 0.0;
    for (const auto& a : assets) sum += a.business_value;
    return sum;
}

double SystemModel::max_business_value() const {
    double mx = 0.0;
    for (const auto& a : assets) mx = std::max(mx, a.business_value);
    return mx;
}

void validate(const SystemModel& s) {
    if (s.assets.empty()) fail("validation error: asset list is empty");

    std::set<std::string> host_ids, asset_ids, component_ids, vuln_ids;
    for (const auto& h : s.hosts) {
        if (!host_ids.insert(h.id).second) fail("validation error: duplicate host id " + h.id);
    }
    for (const auto& c : s.components) {
        if (!component_ids.insert(c.id).second)
            fail("validation error: duplicate component id " + c.id);
    }
    for (const auto& a : s.assets) {
        if (!asset_ids.insert(a.id).second) fail("validation error: duplicate asset id " + a.id);
        if (a.business_value < 0.0)
            fail("validation error: negative business_value on asset " + a.id);
        if (a.criticality < 0.0 || a.criticality > 1.0)
            fail("validation error: criticality out of [0,1] on asset " + a.id);
        if (host_ids.count(a.host_id) == 0)
            fail("validation error: asset " + a.id + " references unknown host " + a.host_id);
        for (const auto& c : a.component_ids) {
            if (component_ids.count(c) == 0)
                fail("validation error: asset " + a.id + " references unknown component " + c);
        }
    }
    for (const auto& v : s.vulnerabilities) {
        if (!vuln_ids.insert(v.id).second)
            fail("validation error: duplicate vulnerability id " + v.id);
        if (v.cvss < 0.0 || v.cvss > 10.0)
            fail("validation error: cvss out of [0,10] on " + v.id);
        if (v.epss < 0.0 || v.epss > 1.0) fail("validation error: epss out of [0,1] on " + v.id);
        if (component_ids.count(v.component_id) == 0)
            fail("validation error: vulnerability " + v.id + " references unknown component " +
                 v.component_id);
    }
    for (const auto& [a, b] : s.host_edges) {
        if (host_ids.count(a) == 0) fail("validation error: host edge references unknown id " + a);
        if (host_ids.count(b) == 0) fail("validation error: host edge references unknown id " + b);
    }
    for (const auto& [a, b] : s.asset_edges) {
        if (asset_ids.count(a) == 0)
            fail("validation error: asset edge references unknown id " + a);
        if (asset_ids.count(b) == 0)
            fail("validation error: asset edge references unknown id " + b);
        if (a == b) fail("validation error: asset edge self-loop on " + a);
    }
    for (const auto& [a, b] : s.component_edges) {
        if (component_ids.count(a) == 0)
            fail("validation error: component edge references unknown id " + a);
        if (component_ids.count(b) == 0)
            fail("validation error: component edge references unknown id " + b);
    }
    for (const auto& e : s.entry_points) {
        for (const auto& t : e.targets) {
            if (asset_ids.count(t) == 0)
                fail("validation error: entry point " + e.id + " references unknown asset " + t);
        }
    }
    for (const auto& d : s.detection_mechanisms) {
        if (asset_ids.count(d.target_id) == 0)
            fail("validation error: detection mechanism references unknown asset " + d.target_id);
        if (d.detection_prob < 0.0 || d.detection_prob > 1.0)
            fail("validation error: detection_prob out of [0,1] on " + d.target_id);
    }
}

SystemModel parse_scenario_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(std::string("scenario parse error: ") + e.what());
    }

    SystemModel s;
    s.name = doc.value("name", "");

    for (const auto& h : doc.value("hosts", json::array())) {
        Host host;
        host.id = h.at("id").get<std::string>();
        host.segment = h.value("segment", "");
        s.hosts.push_back(std::move(host));
    }
    for (const auto& c : doc.value("components", json::array())) {
        s.components.push_back({c.at("id").get<std::string>()});
    }
    for (const auto& a : doc.value("assets", json::array())) {
        Asset asset;
        asset.id = a.at("id").get<std::string>();
        asset.host_id = a.at("host_id").get<std::string>();
        asset.business_value = a.at("business_value").get<double>();
        // Criticality may be given directly in [0,1] or as an ACR-style
        // 0-10 rating, normalized on ingest.
        if (a.contains("acr")) {
            asset.criticality = a.at("acr").get<double>() / 10.0;
        } else {
            asset.criticality = a.value("criticality", 0.0);
        }
        asset.asset_type = parse_asset_type(a.value("asset_type", "it"));
        for (const auto& c : a.value("component_ids", json::array())) {
            asset.component_ids.push_back(c.get<std::string>());
        }
        std::sort(asset.component_ids.begin(), asset.component_ids.end());
        s.assets.push_back(std::move(asset));
    }
    for (const auto& v : doc.value("vulnerabilities", json::array())) {
        Vulnerability vuln;
        vuln.id = v.at("id").get<std::string>();
        vuln.component_id = v.at("component_id").get<std::string>();
        vuln.cvss = v.at("cvss").get<double>();
        vuln.epss = v.at("epss").get<double>();
        vuln.exploit_available = v.value("exploit_available", false);
        vuln.ransomware_associated = v.value("ransomware_associated", false);
        for (const auto& c : v.value("cwe_ids", json::array())) {
            vuln.cwe_ids.push_back(c.get<std::string>());
        }
        std::sort(vuln.cwe_ids.begin(), vuln.cwe_ids.end());
        vuln.patched = v.value("patched", false);
        vuln.exploit_maturity = parse_maturity(v.value("exploit_maturity", "none"));
        vuln.attack_complexity = parse_complexity(v.value("attack_complexity", "low"));
        vuln.privileges_required = parse_privileges(v.value("privileges_required", "none"));
        s.vulnerabilities.push_back(std::move(vuln));
    }

    const json edges = doc.value("edges", json::object());
    s.host_edges = parse_edges(edges.value("host", json::array()));
    s.asset_edges = parse_edges(edges.value("asset", json::array()));
    s.component_edges = parse_edges(edges.value("component", json::array()));

    for (const auto& e : doc.value("entry_points", json::array())) {
        EntryPoint ep;
        ep.id = e.at("id").get<std::string>();
        for (const auto& t : e.value("targets", json::array())) {
            ep.targets.push_back(t.get<std::string>());
        }
        std::sort(ep.targets.begin(), ep.targets.end());
        s.entry_points.push_back(std::move(ep));
    }
    for (const auto& d : doc.value("detection", json::array())) {
        s.detection_mechanisms.push_back(
            {d.at("target_id").get<std::string>(), d.at("detection_prob").get<double>()});
    }

    // Fixed iteration order everywhere: sort by id.
    auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
    std::sort(s.hosts.begin(), s.hosts.end(), by_id);
    std::sort(s.assets.begin(), s.assets.end(), by_id);
    std::sort(s.components.begin(), s.components.end(), by_id);
    std::sort(s.vulnerabilities.begin(), s.vulnerabilities.end(), by_id);
    std::sort(s.entry_points.begin(), s.entry_points.end(), by_id);
    std::sort(s.detection_mechanisms.begin(), s.detection_mechanisms.end(),
              [](const auto& a, const auto& b) {
                  return std::tie(a.target_id, a.detection_prob) <
                         std::tie(b.target_id, b.detection_prob);
              });

    validate(s);
    return s;
}

SystemModel load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open scenario file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario_text(ss.str());
}

std::string serialize_scenario(const SystemModel& s) {
    json doc;
    doc["name"] = s.name;
    doc["hosts"] = json::array();
    for (const auto& h : s.hosts) {
        doc["hosts"].push_back({{"id", h.id}, {"segment", h.segment}});
    }
    doc["components"] = json::array();
    for (const auto& c : s.components) doc["components"].push_back({{"id", c.id}});
    doc["assets"] = json::array();
    for (const auto& a : s.assets) {
        doc["assets"].push_back({{"id", a.id},
                                 {"host_id", a.host_id},
                                 {"business_value", a.business_value},
                                 {"criticality", a.criticality},
                                 {"asset_type", asset_type_name(a.asset_type)},
                                 {"component_ids", a.component_ids}});
    }
    doc["vulnerabilities"] = json::array();
    for (const auto& v : s.vulnerabilities) {
        static const char* ac_names[] = {"low", "high"};
        static const char* pr_names[] = {"none", "low", "high"};
        doc["vulnerabilities"].push_back(
            {{"id", v.id},
             {"component_id", v.component_id},
             {"cvss", v.cvss},
             {"epss", v.epss},
             {"exploit_available", v.exploit_available},
             {"ransomware_associated", v.ransomware_associated},
             {"cwe_ids", v.cwe_ids},
             {"patched", v.patched},
             {"exploit_maturity", exploit_maturity_name(v.exploit_maturity)},
             {"attack_complexity", ac_names[static_cast<int>(v.attack_complexity)]},
             {"privileges_required", pr_names[static_cast<int>(v.privileges_required)]}});
    }
    doc["edges"] = {{"host", edges_to_json(s.host_edges)},
                    {"asset", edges_to_json(s.asset_edges)},
                    {"component", edges_to_json(s.component_edges)}};
    doc["entry_points"] = json::array();
    for (const auto& e : s.entry_points) {
        doc["entry_points"].push_back({{"id", e.id}, {"targets", e.targets}});
    }
    doc["detection"] = json::array();
    for (const auto& d : s.detection_mechanisms) {
        doc["detection"].push_back(
            {{"target_id", d.target_id}, {"detection_prob", d.detection_prob}});
    }
    return doc.dump(2);
}

double impact_fraction(const Vulnerability& v, const RiskParams& p) {
    return std::min(v.cvss / 10.0, p.i_max);
}

double financial_risk(const Vulnerability& v, const Asset& a, const RiskParams& p,
                      std::optional<double> likelihood_override) {
    const double likelihood = likelihood_override.value_or(v.epss);
    return a.business_value * impact_fraction(v, p) * likelihood;
}

double risk_cost_ratio(const Vulnerability& v, const Asset& a, double patch_cost,
                       const RiskParams& p, std::optional<double> likelihood_override) {
    if (patch_cost <= 0.0) throw std::invalid_argument("risk_cost_ratio: patch_cost must be > 0");
    return financial_risk(v, a, p, likelihood_override) / patch_cost;
}

} // namespace patchgame
