#include "betasurv/model_gbrt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "betasurv/sbg.hpp"

namespace betasurv {

namespace {

constexpr double kHessFloor = 1e-6;

double clamp_score(double s, double c) { return std::clamp(s, -c, c); }

struct RowGrads {
    std::vector<double> ga, ha, gb, hb;  // loss derivatives w.r.t. (a, b) per row
};

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

// Gain of separating a prefix sum from the total, summed over both gradient
// dimensions: sum of S^2/N improvements of the squared-loss fit to residuals.
double prefix_gain(double sa, double sb, std::size_t nl, double ta, double tb, std::size_t n) {
    const double nld = static_cast<double>(nl);
    const double nrd = static_cast<double>(n - nl);
    const double nd = static_cast<double>(n);
    const double ra = ta - sa, rb = tb - sb;
    return sa * sa / nld + ra * ra / nrd - ta * ta / nd + sb * sb / nld + rb * rb / nrd -
           tb * tb / nd;
}

class TreeGrower {
public:
    TreeGrower(const std::vector<Observation>& obs, const RowGrads& grads,
               const GbrtConfig& cfg)
        : obs_(obs), grads_(grads), cfg_(cfg) {}

    GbrtTree grow(std::vector<std::uint32_t> root_rows) {
        GbrtTree tree;
        tree.nodes.emplace_back();
        build(tree, 0, std::move(root_rows), 0);
        return tree;
    }

    // Apply a grown tree's leaf deltas to the per-row scores.
    static void route_and_update(const GbrtTree& tree, const std::vector<Observation>& obs,
                                 double lr, std::vector<double>& sa, std::vector<double>& sb) {
        for (std::size_t i = 0; i < obs.size(); ++i) {
            const GbrtNode& leaf = route(tree, obs[i].features);
            sa[i] += lr * leaf.leaf_delta_a;
            sb[i] += lr * leaf.leaf_delta_b;
        }
    }

    static const GbrtNode& route(const GbrtTree& tree, const std::vector<double>& x) {
        int idx = 0;
        while (tree.nodes[idx].feature_index >= 0) {
            const GbrtNode& nd = tree.nodes[idx];
            const double v = x[nd.feature_index];
            idx = (std::isnan(v) || v < nd.threshold) ? nd.left : nd.right;
        }
        return tree.nodes[idx];
    }

private:
    void build(GbrtTree& tree, int node, std::vector<std::uint32_t> rows, int depth) {
        SplitChoice split;
        if (depth < cfg_.max_depth && rows.size() >= 2 * cfg_.min_leaf_rows) {
            split = best_split(rows);
        }
        if (!split.found) {
            make_leaf(tree.nodes[node], rows);
            return;
        }
        std::vector<std::uint32_t> left_rows, right_rows;
        left_rows.reserve(rows.size());
        right_rows.reserve(rows.size());
        for (std::uint32_t r : rows) {
            const double v = obs_[r].features[split.feature];
            (std::isnan(v) || v < split.threshold ? left_rows : right_rows).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();
        GbrtNode& nd = tree.nodes[node];
        nd.feature_index = split.feature;
        nd.threshold = split.threshold;
        nd.left = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        build(tree, nd.left, std::move(left_rows), depth + 1);
        const int right = static_cast<int>(tree.nodes.size());
        tree.nodes[node].right = right;
        tree.nodes.emplace_back();
        build(tree, right, std::move(right_rows), depth + 1);
    }

    SplitChoice best_split(const std::vector<std::uint32_t>& rows) const {
        const std::size_t n = rows.size();
        const std::size_t d = obs_[rows.front()].features.size();
        double ta = 0.0, tb = 0.0;
        for (std::uint32_t r : rows) {
            ta += grads_.ga[r];
            tb += grads_.gb[r];
        }
        SplitChoice best;
        std::vector<std::uint32_t> sorted(rows);
        for (std::size_t j = 0; j < d; ++j) {
            // Missing values sort first so they always stay in the left group.
            std::sort(sorted.begin(), sorted.end(), [&](std::uint32_t a, std::uint32_t b) {
                const double xa = obs_[a].features[j], xb = obs_[b].features[j];
                const bool na = std::isnan(xa), nb = std::isnan(xb);
                if (na != nb) return na;
                if (!na && xa != xb) return xa < xb;
                return a < b;
            });
            double sa = 0.0, sb = 0.0;
            for (std::size_t k = 0; k + 1 <= n; ++k) {
                if (k >= cfg_.min_leaf_rows && k <= n - cfg_.min_leaf_rows) {
                    const double xr = obs_[sorted[k]].features[j];
                    const double xl = obs_[sorted[k - 1]].features[j];
                    if (!std::isnan(xr) && (std::isnan(xl) || xl < xr)) {
                        const double gain = prefix_gain(sa, sb, k, ta, tb, n);
                        if (gain > best.gain + 1e-12 && gain > 1e-12) {
                            best.found = true;
                            best.feature = static_cast<int>(j);
                            best.threshold = xr;
                            best.gain = gain;
                        }
                    }
                }
                if (k < n) {
                    sa += grads_.ga[sorted[k]];
                    sb += grads_.gb[sorted[k]];
                }
            }
        }
        return best;
    }

    void make_leaf(GbrtNode& node, const std::vector<std::uint32_t>& rows) const {
        double ga = 0.0, gb = 0.0, ha_raw = 0.0, hb_raw = 0.0, ha_fl = 0.0, hb_fl = 0.0;
        for (std::uint32_t r : rows) {
            ga += grads_.ga[r];
            gb += grads_.gb[r];
            ha_raw += grads_.ha[r];
            hb_raw += grads_.hb[r];
            ha_fl += std::max(grads_.ha[r], kHessFloor);
            hb_fl += std::max(grads_.hb[r], kHessFloor);
        }
        const double nd = static_cast<double>(rows.size());
        // Newton step per dimension; nonpositive curvature falls back to a
        // scaled mean-gradient step.
        node.leaf_delta_a =
            ha_raw > 0.0 ? -ga / (ha_fl + cfg_.l2_leaf) : -cfg_.learning_rate * ga / nd;
        node.leaf_delta_b =
            hb_raw > 0.0 ? -gb / (hb_fl + cfg_.l2_leaf) : -cfg_.learning_rate * gb / nd;
    }

    const std::vector<Observation>& obs_;
    const RowGrads& grads_;
    const GbrtConfig& cfg_;
};

double mean_nll(const std::vector<Observation>& obs, const std::vector<double>& sa,
                const std::vector<double>& sb, double clamp) {
    double acc = 0.0, wsum = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const BetaParams bp(std::exp(clamp_score(sa[i], clamp)),
                            std::exp(clamp_score(sb[i], clamp)));
        acc -= obs[i].weight *
               (obs[i].censored ? sbg_log_survival(bp, obs[i].t) : sbg_log_pmf(bp, obs[i].t));
        wsum += obs[i].weight;
    }
    return acc / wsum;
}

}  // namespace

GbrtFit fit_gbrt(const std::vector<Observation>& observations, const GbrtConfig& config,
                 std::vector<std::string> feature_names) {
    if (observations.empty()) throw std::invalid_argument("empty dataset");
    if (config.rounds < 0) throw std::invalid_argument("rounds must be >= 0");
    if (config.max_depth < 0) throw std::invalid_argument("max_depth must be >= 0");
    if (config.min_leaf_rows < 1) throw std::invalid_argument("min_leaf_rows must be >= 1");
    const std::size_t d = observations.front().features.size();
    bool any_uncensored = false;
    for (std::size_t i = 0; i < observations.size(); ++i) {
        const Observation& o = observations[i];
        if (o.features.size() != d) {
            throw std::invalid_argument("feature dimension mismatch at row " + std::to_string(i));
        }
        if (o.t < 1) {
            throw std::invalid_argument("row " + std::to_string(i) +
                                        ": event time must be >= 1 (shift by one time unit)");
        }
        if (o.weight <= 0.0) {
            throw std::invalid_argument("row " + std::to_string(i) + ": weight must be positive");
        }
        any_uncensored |= !o.censored;
    }
    if (!any_uncensored) {
        throw std::runtime_error(
            "all rows censored: likelihood is unbounded (beta -> infinity), cannot fit");
    }

    GbrtFit fit;
    GbrtBetaLogistic& model = fit.model;
    model.learning_rate = config.learning_rate;
    model.max_depth = config.max_depth;
    if (feature_names.empty()) {
        model.feature_names.resize(d);
        for (std::size_t j = 0; j < d; ++j) model.feature_names[j] = "x" + std::to_string(j);
    } else {
        if (feature_names.size() != d) {
            throw std::invalid_argument("feature_names size does not match feature dimension");
        }
        model.feature_names = std::move(feature_names);
    }

    const ScalarFitResult base = fit_sbg_scalar(observations);
    model.base_a = base.a;
    model.base_b = base.b;

    const std::size_t n = observations.size();
    std::vector<double> sa(n, model.base_a), sb(n, model.base_b);
    fit.round_losses.push_back(mean_nll(observations, sa, sb, model.clamp));

    RowGrads grads;
    grads.ga.resize(n);
    grads.ha.resize(n);
    grads.gb.resize(n);
    grads.hb.resize(n);
    std::vector<std::uint32_t> all_rows(n);
    std::iota(all_rows.begin(), all_rows.end(), 0);

    for (int round = 0; round < config.rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            const Observation& o = observations[i];
            const BetaParams bp(std::exp(clamp_score(sa[i], model.clamp)),
                                std::exp(clamp_score(sb[i], model.clamp)));
            const SbgDerivatives sd = sbg_derivatives(bp, o.t, o.censored);
            grads.ga[i] = -o.weight * sd.dlog_da;
            grads.ha[i] = -o.weight * sd.d2log_da2;
            grads.gb[i] = -o.weight * sd.dlog_db;
            grads.hb[i] = -o.weight * sd.d2log_db2;
        }
        TreeGrower grower(observations, grads, config);
        GbrtTree tree = grower.grow(all_rows);
        TreeGrower::route_and_update(tree, observations, config.learning_rate, sa, sb);
        model.trees.push_back(std::move(tree));
        fit.round_losses.push_back(mean_nll(observations, sa, sb, model.clamp));
    }
    return fit;
}

BetaParams predict_gbrt(const GbrtBetaLogistic& model, const std::vector<double>& x) {
    if (x.size() != model.dim()) {
        throw std::invalid_argument("feature dimension mismatch: model expects " +
                                    std::to_string(model.dim()) + ", got " +
                                    std::to_string(x.size()));
    }
    double a = model.base_a, b = model.base_b;
    for (const GbrtTree& tree : model.trees) {
        const GbrtNode& leaf = TreeGrower::route(tree, x);
        a += model.learning_rate * leaf.leaf_delta_a;
        b += model.learning_rate * leaf.leaf_delta_b;
    }
    return BetaParams(std::exp(clamp_score(a, model.clamp)),
                      std::exp(clamp_score(b, model.clamp)));
}

}  // namespace betasurv
