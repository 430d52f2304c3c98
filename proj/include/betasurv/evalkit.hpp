#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "betasurv/beta_math.hpp"
#include "betasurv/dataset.hpp"

namespace betasurv {

struct HorizonEval {
    std::int64_t horizon = 1;
    double auc = 0.5;
    std::size_t n_effective = 0;  // rows with a determinable label at the horizon
};

// Rank-statistic AUC of "event by h" labels (ties count 0.5). Score convention:
// higher = more at risk. Rows censored before h are excluded.
HorizonEval auc_at_horizon(const std::vector<double>& scores,
                           const std::vector<Observation>& observations, std::int64_t h);

// Product-limit survival curve over t = 1..max observed t; equals one minus
// the empirical CDF when nothing is censored.
std::vector<std::pair<std::int64_t, double>> empirical_survival(
    const std::vector<Observation>& observations);

// Unconditional maximum-likelihood (alpha, beta) for a cohort, ignoring features.
BetaParams fit_sbg_cohort(const std::vector<Observation>& observations);

struct PosteriorSizeRow {
    std::int64_t horizon = 1;
    double beta_logistic_var = 0.0;
    double laplace_diag_var = 0.0;
    double laplace_full_var = 0.0;
};

// Random-projects features to d_projected dimensions with a seeded Gaussian
// matrix, then per horizon trains a one-step beta-logistic classifier and a
// logistic baseline on half the rows and reports mean posterior variances on
// the held-out half.
std::vector<PosteriorSizeRow> posterior_size_experiment(
    const std::vector<Observation>& observations, const std::vector<std::int64_t>& horizons,
    std::size_t d_projected, std::uint64_t seed);

std::string posterior_report_csv(const std::vector<PosteriorSizeRow>& rows);

}  // namespace betasurv
