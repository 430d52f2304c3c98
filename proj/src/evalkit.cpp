#include "betasurv/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "betasurv/baselines.hpp"
#include "betasurv/csvio.hpp"
#include "betasurv/model_linear.hpp"
#include "betasurv/rng.hpp"
#include "betasurv/sbg.hpp"

namespace betasurv {

HorizonEval auc_at_horizon(const std::vector<double>& scores,
                           const std::vector<Observation>& observations, std::int64_t h) {
    if (scores.size() != observations.size()) {
        throw std::invalid_argument("scores and observations are not aligned");
    }
    if (h < 1) throw std::domain_error("horizon must be >= 1");
    std::vector<std::pair<double, int>> labeled;
    labeled.reserve(scores.size());
    std::size_t pos = 0, neg = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::isfinite(scores[i])) {
            throw std::invalid_argument("non-finite score at row " + std::to_string(i));
        }
        const std::optional<int> y = label_at_horizon(observations[i], h);
        if (!y) continue;
        (*y ? pos : neg) += 1;
        labeled.emplace_back(scores[i], *y);
    }
    if (pos == 0 || neg == 0) {
        throw std::runtime_error("AUC undefined at horizon " + std::to_string(h) +
                                 ": one class only (positives=" + std::to_string(pos) +
                                 ", negatives=" + std::to_string(neg) + ")");
    }
    std::sort(labeled.begin(), labeled.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    // Average ranks over score ties, then the Mann-Whitney statistic.
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < labeled.size()) {
        std::size_t j = i;
        while (j < labeled.size() && labeled[j].first == labeled[i].first) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based average
        for (std::size_t k = i; k < j; ++k) {
            if (labeled[k].second) rank_sum_pos += avg_rank;
        }
        i = j;
    }
    const double np = static_cast<double>(pos), nn = static_cast<double>(neg);
    HorizonEval out;
    out.horizon = h;
    out.auc = (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
    out.n_effective = pos + neg;
    return out;
}

std::vector<std::pair<std::int64_t, double>> empirical_survival(
    const std::vector<Observation>& observations) {
    if (observations.empty()) throw std::invalid_argument("empty dataset");
    std::int64_t max_t = 1;
    for (const Observation& o : observations) {
        if (o.t < 1) throw std::invalid_argument("event time must be >= 1");
        max_t = std::max(max_t, o.t);
    }
    // events[s] = weight of events at s; exits[s] = weight leaving the risk set
    // after s (event or censoring at s).
    std::vector<double> events(max_t + 1, 0.0), exits(max_t + 1, 0.0);
    double at_risk = 0.0;
    for (const Observation& o : observations) {
        if (!o.censored) events[o.t] += o.weight;
        exits[o.t] += o.weight;
        at_risk += o.weight;
    }
    std::vector<std::pair<std::int64_t, double>> curve;
    curve.reserve(max_t);
    double surv = 1.0;
    for (std::int64_t s = 1; s <= max_t; ++s) {
        if (at_risk > 0.0 && events[s] > 0.0) surv *= std::max(0.0, 1.0 - events[s] / at_risk);
        at_risk -= exits[s];
        curve.emplace_back(s, surv);
    }
    return curve;
}

BetaParams fit_sbg_cohort(const std::vector<Observation>& observations) {
    return fit_sbg_scalar(observations).params;
}

namespace {

// Internal hyperparameters of the posterior-size experiment; chosen so both
// trainers converge on every horizon's labeled subset, and fixed so that the
// report is reproducible.
FitConfig beta_logistic_experiment_config() {
    FitConfig cfg;
    cfg.learning_rate = 1.0;
    cfg.max_epochs = 400;
    cfg.l2_penalty = 1e-4;
    cfg.gradient_tolerance = 1e-8;
    return cfg;
}

LogisticConfig logistic_experiment_config() {
    LogisticConfig cfg;
    cfg.l2_penalty = 1.0;
    cfg.gradient_tolerance = 1e-8;
    return cfg;
}

}  // namespace

std::vector<PosteriorSizeRow> posterior_size_experiment(
    const std::vector<Observation>& observations, const std::vector<std::int64_t>& horizons,
    std::size_t d_projected, std::uint64_t seed) {
    if (observations.size() < 4) throw std::invalid_argument("need at least 4 rows");
    if (horizons.empty()) throw std::invalid_argument("no horizons given");
    const std::size_t d_in = observations.front().features.size();
    if (d_in == 0) throw std::invalid_argument("dataset has no features");
    if (d_projected < 1 || d_projected > 200) {
        throw std::invalid_argument("d_projected must be in [1, 200] (full-Hessian gate)");
    }

    // Seeded Gaussian projection, one stream per output dimension.
    std::vector<std::vector<double>> proj(d_projected, std::vector<double>(d_in));
    for (std::size_t k = 0; k < d_projected; ++k) {
        Rng rng = Rng::stream(seed, k);
        for (std::size_t j = 0; j < d_in; ++j) {
            proj[k][j] = rng.normal() / std::sqrt(static_cast<double>(d_projected));
        }
    }
    std::vector<Observation> projected(observations.size());
    for (std::size_t i = 0; i < observations.size(); ++i) {
        const Observation& o = observations[i];
        if (o.features.size() != d_in) {
            throw std::invalid_argument("feature dimension mismatch at row " + std::to_string(i));
        }
        for (double v : o.features) {
            if (std::isnan(v)) {
                throw std::invalid_argument("experiment requires complete features (row " +
                                            std::to_string(i) + " has missing values)");
            }
        }
        Observation& p = projected[i];
        p.t = o.t;
        p.censored = o.censored;
        p.weight = o.weight;
        p.features.resize(d_projected);
        for (std::size_t k = 0; k < d_projected; ++k) {
            double s = 0.0;
            for (std::size_t j = 0; j < d_in; ++j) s += proj[k][j] * o.features[j];
            p.features[k] = s;
        }
    }

    std::vector<std::size_t> idx(projected.size());
    std::iota(idx.begin(), idx.end(), 0);
    Rng split_rng = Rng::stream(seed, d_projected);
    std::shuffle(idx.begin(), idx.end(), split_rng);
    const std::size_t n_train = projected.size() / 2;

    std::vector<PosteriorSizeRow> report;
    report.reserve(horizons.size());
    for (std::int64_t h : horizons) {
        if (h < 1) throw std::domain_error("horizon must be >= 1");
        std::vector<Observation> train_full, train_binary;
        for (std::size_t k = 0; k < n_train; ++k) {
            const Observation& o = projected[idx[k]];
            train_full.push_back(o);
            const std::optional<int> y = label_at_horizon(o, h);
            if (!y) continue;
            Observation b = o;
            b.t = 1;
            b.censored = *y == 0;
            train_binary.push_back(std::move(b));
        }
        const LinearFit bl = fit_linear(train_binary, beta_logistic_experiment_config());
        const LogisticModel lg = fit_logistic_at_horizon(train_full, h, logistic_experiment_config());

        PosteriorSizeRow row;
        row.horizon = h;
        std::size_t n_held = 0;
        for (std::size_t k = n_train; k < projected.size(); ++k) {
            const Observation& o = projected[idx[k]];
            row.beta_logistic_var += predict_event_variance(bl.model, o.features);
            row.laplace_diag_var +=
                logistic_prediction_variance(lg, o.features, VarianceMode::diagonal).value;
            row.laplace_full_var +=
                logistic_prediction_variance(lg, o.features, VarianceMode::full).value;
            ++n_held;
        }
        row.beta_logistic_var /= static_cast<double>(n_held);
        row.laplace_diag_var /= static_cast<double>(n_held);
        row.laplace_full_var /= static_cast<double>(n_held);
        report.push_back(row);
    }
    return report;
}

std::string posterior_report_csv(const std::vector<PosteriorSizeRow>& rows) {
    std::ostringstream out;
    out << "horizon,beta_logistic_var,laplace_diag_var,laplace_full_var\n";
    for (const PosteriorSizeRow& r : rows) {
        out << r.horizon << ',' << format_double(r.beta_logistic_var) << ','
            << format_double(r.laplace_diag_var) << ',' << format_double(r.laplace_full_var)
            << '\n';
    }
    return out.str();
}

}  // namespace betasurv
