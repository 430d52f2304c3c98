#pragma once

#include <cstdint>
#include <vector>

#include "betasurv/beta_math.hpp"
#include "betasurv/dataset.hpp"

namespace betasurv {

// Marginal time-to-event probabilities with a Beta(alpha,beta) prior on the
// per-step event rate, carried in log space through the step recurrences.
double sbg_log_pmf(const BetaParams& params, std::int64_t t);
double sbg_log_survival(const BetaParams& params, std::int64_t t);  // t >= 0
double sbg_pmf(const BetaParams& params, std::int64_t t);
double sbg_survival(const BetaParams& params, std::int64_t t);

// [P(T > 1), ..., P(T > horizon)] in one recurrence pass.
std::vector<double> sbg_survival_curve(const BetaParams& params, std::int64_t horizon);

// Weighted censored-data negative log-likelihood; censored rows contribute
// -log P(T > t), observed rows -log P(T = t).
double sbg_neg_log_likelihood(const std::vector<Observation>& observations,
                              const std::vector<BetaParams>& params_per_row,
                              int threads = 1);

// Per-row derivatives of log-probability with respect to a = ln alpha and
// b = ln beta under the identity predictor; callers negate for loss and
// apply their own chain rule.
struct SbgDerivatives {
    double dlog_da = 0.0;
    double dlog_db = 0.0;
    double d2log_da2 = 0.0;
    double d2log_db2 = 0.0;
    double d2log_dadb = 0.0;
};

SbgDerivatives sbg_derivatives(const BetaParams& params, std::int64_t t, bool censored);

// Loss-convention curvature per row: a-terms are provably nonnegative,
// b-terms may take either sign.
struct ConvexityDiagnostic {
    std::vector<double> a_curvature;
    std::vector<double> b_curvature;
};

ConvexityDiagnostic convexity_diagnostic(const std::vector<Observation>& observations,
                                         const std::vector<BetaParams>& params_per_row);

// Unconditional two-parameter maximum likelihood fit in (a, b), by damped
// Newton on the recurrence derivatives. Shared by the cohort fitter and the
// boosted model's base scores.
struct ScalarFitResult {
    BetaParams params;
    double a = 0.0;
    double b = 0.0;
    double loss = 0.0;
    int iterations = 0;
    bool converged = false;
    bool hit_clamp = false;
};

ScalarFitResult fit_sbg_scalar(const std::vector<Observation>& observations,
                               double tolerance = 1e-10, int max_iterations = 2000);

}  // namespace betasurv
