#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "betasurv/beta_math.hpp"
#include "betasurv/dataset.hpp"

namespace betasurv {

// Conditional model with linear predictors a(x) = gamma_a.x + intercept_a and
// b(x) likewise; alpha = e^a, beta = e^b. Scores are clamped to +-clamp before
// exponentiation.
struct LinearBetaLogistic {
    std::vector<double> gamma_a;
    std::vector<double> gamma_b;
    double intercept_a = 0.0;
    double intercept_b = 0.0;
    std::vector<std::string> feature_names;
    double clamp = 30.0;

    std::size_t dim() const { return gamma_a.size(); }
};

struct FitConfig {
    double learning_rate = 1.0;
    int max_epochs = 500;
    double l2_penalty = 1e-6;      // on coefficients of the weight-normalized loss; intercepts free
    double gradient_tolerance = 1e-7;
    std::size_t batch_size = 0;    // 0 = full batch with line search
    bool use_newton = false;       // full-batch only: damped Newton instead of gradient steps
    std::uint64_t seed = 0;
    int threads = 1;
};

struct TrainingReport {
    std::vector<double> epoch_losses;
    double final_grad_norm = 0.0;
    int epochs = 0;
    bool converged = false;
};

struct LinearFit {
    LinearBetaLogistic model;
    TrainingReport report;
};

LinearFit fit_linear(const std::vector<Observation>& observations, const FitConfig& config,
                     std::vector<std::string> feature_names = {});

BetaParams predict_params(const LinearBetaLogistic& model, const std::vector<double>& x);

// [P(T>1), ..., P(T>horizon)] at x.
std::vector<double> predict_survival_curve(const LinearBetaLogistic& model,
                                           const std::vector<double>& x, std::int64_t horizon);

// Variance of the per-step event probability under the predicted beta prior.
double predict_event_variance(const LinearBetaLogistic& model, const std::vector<double>& x);

// The model's one-step reduction: P(T=1|x) = sigmoid(-(weights.x + intercept)),
// with weights = gamma_b - gamma_a.
struct LogisticEquivalent {
    std::vector<double> weights;
    double intercept = 0.0;
};

LogisticEquivalent to_logistic_equivalent(const LinearBetaLogistic& model);

}  // namespace betasurv
