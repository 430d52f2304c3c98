#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace betasurv {

// One unit: discrete time of event (censored=false) or of censoring
// (censored=true, meaning T > t). Weights compensate censored-row
// down-sampling and default to 1.
struct Observation {
    std::int64_t t = 1;
    bool censored = false;
    std::vector<double> features;
    double weight = 1.0;
};

struct Dataset {
    std::vector<Observation> rows;
    std::vector<std::string> feature_names;

    std::size_t dim() const { return feature_names.size(); }
};

constexpr std::int64_t kDefaultMaxHorizon = 10000;

}  // namespace betasurv
