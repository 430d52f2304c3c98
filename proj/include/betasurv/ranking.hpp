#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "betasurv/beta_math.hpp"

namespace betasurv {

// P(theta_v > theta_u) for integer-parameter betas, by the exact finite sum.
// Kept as a verification oracle for the median ordering; real-valued
// parameters must be compared through medians instead.
double pairwise_prob_integer(const BetaParams& u, const BetaParams& v);

// Which of two per-step event distributions ranks first (more at risk =
// higher median). Medians within 1e-12 fall back to lower alpha; exact ties
// are left to the caller's input order.
enum class MedianOrder { u_first, v_first, tie };
MedianOrder compare_by_median(const BetaParams& u, const BetaParams& v);

// Moments of z = (1-theta) * theta^(t-1) under theta ~ Beta(alpha, beta).
struct PowerBetaMoments {
    double m1 = 0.0;
    double m2 = 0.0;
};

// exact: moments via beta-function ratios. closed_form_products: the textbook
// product expressions, retained for comparison output only (they disagree with
// direct integration at t=1 for asymmetric parameters).
enum class ProjectionMode { exact, closed_form_products };

PowerBetaMoments power_beta_moments(const BetaParams& params, std::int64_t t,
                                    ProjectionMode mode = ProjectionMode::exact);

// Method-of-moments beta approximation to z at horizon t.
BetaParams project_power_beta(const BetaParams& params, std::int64_t t,
                              ProjectionMode mode = ProjectionMode::exact);

struct RankedItem {
    std::string item_id;
    BetaParams params;          // horizon-projected for t > 1
    double median_score = 0.5;  // beta_median(params)
    std::int64_t horizon = 1;
    bool projection_fallback = false;  // projection failed; ranked by raw median
};

// Most-at-risk first. t = 1 ranks raw medians; t > 1 ranks medians of the
// power-beta projections. Deterministic total order: median descending, then
// alpha ascending, then input order.
std::vector<RankedItem> rank_at_horizon(
    const std::vector<std::pair<std::string, BetaParams>>& items, std::int64_t t);

}  // namespace betasurv
