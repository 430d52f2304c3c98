#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "betasurv/beta_math.hpp"
#include "betasurv/dataset.hpp"

namespace betasurv {

// feature_index < 0 marks a leaf carrying the two deltas; otherwise the node
// routes left when x[feature_index] is missing or < threshold.
struct GbrtNode {
    int feature_index = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double leaf_delta_a = 0.0;
    double leaf_delta_b = 0.0;
};

struct GbrtTree {
    std::vector<GbrtNode> nodes;  // nodes[0] is the root
};

struct GbrtBetaLogistic {
    std::vector<GbrtTree> trees;
    double learning_rate = 0.1;
    double base_a = 0.0;
    double base_b = 0.0;
    int max_depth = 3;
    std::vector<std::string> feature_names;
    double clamp = 30.0;

    std::size_t dim() const { return feature_names.size(); }
};

struct GbrtConfig {
    int rounds = 100;
    double learning_rate = 0.1;
    int max_depth = 3;
    std::size_t min_leaf_rows = 20;
    double l2_leaf = 1.0;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct GbrtFit {
    GbrtBetaLogistic model;
    // Mean unpenalized nll before boosting and after each round (rounds+1 entries).
    std::vector<double> round_losses;
};

GbrtFit fit_gbrt(const std::vector<Observation>& observations, const GbrtConfig& config,
                 std::vector<std::string> feature_names = {});

BetaParams predict_gbrt(const GbrtBetaLogistic& model, const std::vector<double>& x);

}  // namespace betasurv
