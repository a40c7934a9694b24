#pragma once

#include <string>
#include <vector>

namespace patchgame {

// One prioritization weighting the adaptive strategy can select. Weights
// are nonnegative and sum to 1.
struct WeightConfig {
    std::string name;
    double cvss = 0.0;
    double epss = 0.0;
    double exploit_available = 0.0;
    double ransomware = 0.0;
    double business_value = 0.0;
    double rcr = 0.0;

    double sum() const {
        return cvss + epss + exploit_available + ransomware + business_value + rcr;
    }
};

// The shipped action set: a balanced mix, a cost-driven and a
// threat-driven profile, plus severity-, value- and likelihood-leaning
// variants.
const std::vector<WeightConfig>& default_weight_configs();

} // namespace patchgame
