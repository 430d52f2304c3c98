#include "betasurv/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace betasurv {

namespace {

bool is_small_integer(double x) { return std::floor(x) == x && x >= 1.0 && x <= 60.0; }

}  // namespace

double pairwise_prob_integer(const BetaParams& u, const BetaParams& v) {
    if (!is_small_integer(u.alpha) || !is_small_integer(u.beta) || !is_small_integer(v.alpha) ||
        !is_small_integer(v.beta)) {
        throw std::domain_error(
            "pairwise probability requires integer parameters in [1, 60]; use medians otherwise");
    }
    const double lbu = log_beta_fn(u.alpha, u.beta);
    double p = 0.0;
    for (double i = 0.0; i < v.alpha; i += 1.0) {
        p += std::exp(log_beta_fn(u.alpha + i, u.beta + v.beta) - std::log(v.beta + i) -
                      log_beta_fn(1.0 + i, v.beta) - lbu);
    }
    return p;
}

MedianOrder compare_by_median(const BetaParams& u, const BetaParams& v) {
    const double mu = beta_median(u);
    const double mv = beta_median(v);
    if (std::fabs(mu - mv) >= 1e-12) return mu > mv ? MedianOrder::u_first : MedianOrder::v_first;
    if (u.alpha != v.alpha) return u.alpha < v.alpha ? MedianOrder::u_first : MedianOrder::v_first;
    return MedianOrder::tie;
}

PowerBetaMoments power_beta_moments(const BetaParams& params, std::int64_t t,
                                    ProjectionMode mode) {
    if (t < 1) throw std::domain_error("horizon must be >= 1");
    const double a = params.alpha, b = params.beta;
    const double td = static_cast<double>(t);
    PowerBetaMoments m;
    if (mode == ProjectionMode::exact) {
        const double lb = log_beta_fn(a, b);
        m.m1 = std::exp(log_beta_fn(a + td - 1.0, b + 1.0) - lb);
        m.m2 = std::exp(log_beta_fn(a + 2.0 * td - 2.0, b + 2.0) - lb);
    } else {
        const double s = a + b;
        m.m1 = (b / s) * std::pow(a / s, td - 1.0);
        m.m2 = (a * (a + 1.0) / (s * (s + 1.0))) *
               std::pow(b * (b + 1.0) / (s * (s + 1.0)), td - 1.0);
    }
    return m;
}

BetaParams project_power_beta(const BetaParams& params, std::int64_t t, ProjectionMode mode) {
    const PowerBetaMoments m = power_beta_moments(params, t, mode);
    const double var = m.m2 - m.m1 * m.m1;
    if (!(var > 0.0) || !(m.m1 > m.m2)) {
        throw std::domain_error("beta approximation invalid at horizon " + std::to_string(t) +
                                ": degenerate projected moments");
    }
    const double scale = (m.m1 - m.m2) / var;
    return BetaParams(scale * m.m1, scale * (1.0 - m.m1));
}

std::vector<RankedItem> rank_at_horizon(
    const std::vector<std::pair<std::string, BetaParams>>& items, std::int64_t t) {
    if (items.empty()) throw std::invalid_argument("nothing to rank");
    if (t < 1) throw std::domain_error("horizon must be >= 1");
    std::vector<RankedItem> ranked;
    ranked.reserve(items.size());
    for (const auto& [id, params] : items) {
        RankedItem item;
        item.item_id = id;
        item.horizon = t;
        item.params = params;
        if (t > 1) {
            try {
                item.params = project_power_beta(params, t, ProjectionMode::exact);
            } catch (const std::domain_error&) {
                item.projection_fallback = true;
                item.params = params;
            }
        }
        item.median_score = beta_median(item.params);
        ranked.push_back(std::move(item));
    }
    std::vector<std::size_t> order(ranked.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (ranked[i].median_score != ranked[j].median_score) {
            return ranked[i].median_score > ranked[j].median_score;
        }
        if (ranked[i].params.alpha != ranked[j].params.alpha) {
            return ranked[i].params.alpha < ranked[j].params.alpha;
        }
        return i < j;
    });
    std::vector<RankedItem> out;
    out.reserve(ranked.size());
    for (std::size_t i : order) out.push_back(std::move(ranked[i]));
    return out;
}

}  // namespace betasurv
