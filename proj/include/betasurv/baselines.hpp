#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "betasurv/dataset.hpp"

namespace betasurv {

// Binary outcome at horizon h: 1 = event by h, 0 = survived past h,
// nullopt = undeterminable (censored before h).
std::optional<int> label_at_horizon(const Observation& o, std::int64_t h);

struct LogisticConfig {
    double l2_penalty = 1e-6;
    double gradient_tolerance = 1e-8;
    int max_iterations = 200;
    int threads = 1;
};

// Penalized logistic regression on the horizon-h labels, with the curvature
// at the optimum retained for Laplace posterior variance.
struct LogisticModel {
    std::vector<double> theta;
    double intercept = 0.0;
    std::int64_t horizon = 1;
    double l2_penalty = 0.0;
    std::vector<double> hessian_diag;  // d+1 entries, intercept last
    std::vector<double> hessian_full;  // (d+1)^2 row-major; empty when d > 200
    std::vector<std::string> feature_names;
    int fit_iterations = 0;  // transient diagnostic, not serialized

    std::size_t dim() const { return theta.size(); }
    bool has_full_hessian() const { return !hessian_full.empty(); }
};

struct GaussianScorePosterior {
    double mu = 0.0;
    double sigma2 = 0.0;
};

enum class VarianceMode { diagonal, full };

struct PredictionVariance {
    double value = 0.0;  // clipped to [0, 0.25]
    double raw = 0.0;    // unclipped approximation output
    GaussianScorePosterior posterior;
};

LogisticModel fit_logistic_at_horizon(const std::vector<Observation>& observations,
                                      std::int64_t h, const LogisticConfig& config = {});

// P(event by the model's horizon | x) = sigmoid of the linear score.
double logistic_score(const LogisticModel& model, const std::vector<double>& x);

// Variance of sigmoid(Y) for Gaussian Y, by the normal-CDF approximation.
double sigmoid_of_gaussian_variance(const GaussianScorePosterior& posterior);

PredictionVariance logistic_prediction_variance(const LogisticModel& model,
                                                const std::vector<double>& x,
                                                VarianceMode mode);

// Shifted-geometric survival with a point-estimate rate theta(x) = sigmoid(w.x + c);
// the degenerate-prior limit of the beta-geometric likelihood.
struct GeometricModel {
    std::vector<double> weights;
    double intercept = 0.0;
    std::vector<std::string> feature_names;
    int fit_iterations = 0;  // transient diagnostic, not serialized

    std::size_t dim() const { return weights.size(); }
};

struct GeometricConfig {
    double l2_penalty = 1e-6;
    double gradient_tolerance = 1e-8;
    int max_iterations = 200;
    int threads = 1;
};

GeometricModel fit_geometric_pointestimate(const std::vector<Observation>& observations,
                                           const GeometricConfig& config = {});

double geometric_event_rate(const GeometricModel& model, const std::vector<double>& x);

// Mean nll of the geometric model, for likelihood comparisons against the
// beta-geometric fit on the same rows.
double geometric_neg_log_likelihood(const GeometricModel& model,
                                    const std::vector<Observation>& observations);

// Mean nll of the logistic model over the rows with a determinable label at
// the model's horizon.
double logistic_neg_log_likelihood(const LogisticModel& model,
                                   const std::vector<Observation>& observations);

}  // namespace betasurv
