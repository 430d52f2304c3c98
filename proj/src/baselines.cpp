#include "betasurv/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "betasurv/linalg.hpp"

namespace betasurv {

namespace {

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::fabs(x))); }

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double checked_dot(const std::vector<double>& coef, double intercept,
                   const std::vector<double>& x, std::size_t expect) {
    if (x.size() != expect) {
        throw std::invalid_argument("feature dimension mismatch: model expects " +
                                    std::to_string(expect) + ", got " + std::to_string(x.size()));
    }
    double s = intercept;
    for (std::size_t j = 0; j < expect; ++j) {
        if (std::isnan(x[j])) {
            throw std::invalid_argument("missing feature value: impute before prediction");
        }
        s += coef[j] * x[j];
    }
    return s;
}

struct ScoreRow {
    const std::vector<double>* x;
    double weight;
    // loss(s), dloss/ds, d2loss/ds2 for this row's outcome
    double y;        // logistic label
    std::int64_t t;  // geometric time
    bool censored;
};

struct GlmResult {
    std::vector<double> params;  // [w(d), c]
    std::vector<double> hessian; // (d+1)^2 row-major, at the optimum
    int iterations = 0;
};

// Newton on sum_i w_i * nll_i(w.x_i + c) + l2/2 ||w||^2 (intercept unpenalized).
// Rows with y >= 0 use the logistic loss; y < 0 marks the geometric loss, which
// reads (t, censored) instead.
GlmResult newton_glm(const std::vector<ScoreRow>& rows, std::size_t d, double l2,
                     double tol, int max_iterations) {
    const std::size_t m = d + 1;
    std::vector<double> p(m, 0.0);
    auto score = [&](const std::vector<double>& q, const ScoreRow& r) {
        double s = q[d];
        for (std::size_t j = 0; j < d; ++j) s += q[j] * (*r.x)[j];
        return s;
    };
    const bool geometric = !rows.empty() && rows.front().y < 0.0;
    auto row_loss = [&](const ScoreRow& r, double s) {
        if (!geometric) return r.weight * (softplus(s) - r.y * s);
        const double lp = -softplus(-s);   // log theta
        const double lq = -softplus(s);    // log(1 - theta)
        if (r.censored) return -r.weight * static_cast<double>(r.t) * lq;
        return -r.weight * (lp + static_cast<double>(r.t - 1) * lq);
    };
    auto row_dloss = [&](const ScoreRow& r, double s) {
        const double th = sigmoid(s);
        if (!geometric) return r.weight * (th - r.y);
        return r.weight * (static_cast<double>(r.t) * th - (r.censored ? 0.0 : 1.0));
    };
    auto row_d2loss = [&](const ScoreRow& r, double s) {
        const double th = sigmoid(s);
        const double pq = th * (1.0 - th);
        if (!geometric) return r.weight * pq;
        return r.weight * static_cast<double>(r.t) * pq;
    };

    auto total_loss = [&](const std::vector<double>& q) {
        double acc = 0.0;
        for (const ScoreRow& r : rows) acc += row_loss(r, score(q, r));
        double sq = 0.0;
        for (std::size_t j = 0; j < d; ++j) sq += q[j] * q[j];
        return acc + 0.5 * l2 * sq;
    };
    auto assemble = [&](const std::vector<double>& q, std::vector<double>& g,
                        std::vector<double>& H) {
        g.assign(m, 0.0);
        H.assign(m * m, 0.0);
        for (const ScoreRow& r : rows) {
            const double s = score(q, r);
            const double gs = row_dloss(r, s);
            const double hs = row_d2loss(r, s);
            for (std::size_t j = 0; j < d; ++j) {
                g[j] += gs * (*r.x)[j];
                for (std::size_t k = 0; k <= j; ++k) H[j * m + k] += hs * (*r.x)[j] * (*r.x)[k];
                H[d * m + j] += hs * (*r.x)[j];
            }
            g[d] += gs;
            H[d * m + d] += hs;
        }
        for (std::size_t j = 0; j < d; ++j) {
            g[j] += l2 * q[j];
            H[j * m + j] += l2;
        }
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = j + 1; k < m; ++k) H[j * m + k] = H[k * m + j];
    };

    std::vector<double> g, H, delta(m), cand(m);
    double cur = total_loss(p);
    int iterations = 0;
    for (int it = 0; it < max_iterations; ++it) {
        iterations = it + 1;
        assemble(p, g, H);
        double gmax = 0.0;
        for (double v : g) gmax = std::max(gmax, std::fabs(v));
        if (gmax <= tol) break;
        std::vector<double> rhs(m);
        for (std::size_t j = 0; j < m; ++j) rhs[j] = -g[j];
        // Damp toward gradient descent if the Hessian is not positive definite.
        Cholesky ch;
        double ridge = 0.0;
        for (;;) {
            try {
                std::vector<double> Hr = H;
                if (ridge > 0.0)
                    for (std::size_t j = 0; j < m; ++j) Hr[j * m + j] += ridge;
                ch = cholesky_decompose(Hr, m);
                break;
            } catch (const std::runtime_error&) {
                ridge = ridge == 0.0 ? 1e-8 : ridge * 100.0;
                if (ridge > 1e8) throw;
            }
        }
        delta = cholesky_solve(ch, rhs);
        double step = 1.0;
        for (int ls = 0; ls < 50; ++ls) {
            for (std::size_t j = 0; j < m; ++j) cand[j] = p[j] + step * delta[j];
            const double lc = total_loss(cand);
            if (lc <= cur) {
                p.swap(cand);
                cur = lc;
                break;
            }
            step *= 0.5;
        }
    }
    assemble(p, g, H);
    return {std::move(p), std::move(H), iterations};
}

void validate_rows(const std::vector<Observation>& observations, std::size_t d) {
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
        for (double x : o.features) {
            if (std::isnan(x)) {
                throw std::invalid_argument("row " + std::to_string(i) +
                                            ": missing feature values are not supported by this "
                                            "model (impute or use the boosted model)");
            }
        }
    }
}

std::vector<std::string> default_names(std::vector<std::string> names, std::size_t d) {
    if (names.empty()) {
        names.resize(d);
        for (std::size_t j = 0; j < d; ++j) names[j] = "x" + std::to_string(j);
    } else if (names.size() != d) {
        throw std::invalid_argument("feature_names size does not match feature dimension");
    }
    return names;
}

constexpr std::size_t kFullHessianMaxDim = 200;

}  // namespace

std::optional<int> label_at_horizon(const Observation& o, std::int64_t h) {
    if (!o.censored) return o.t <= h ? 1 : 0;
    // Censored at t means survival through t; the outcome at h is known only
    // when the row was still under observation at h.
    if (o.t >= h) return 0;
    return std::nullopt;
}

LogisticModel fit_logistic_at_horizon(const std::vector<Observation>& observations,
                                      std::int64_t h, const LogisticConfig& config) {
    if (h < 1) throw std::domain_error("horizon must be >= 1");
    if (observations.empty()) throw std::invalid_argument("empty dataset");
    const std::size_t d = observations.front().features.size();
    validate_rows(observations, d);

    std::vector<ScoreRow> rows;
    rows.reserve(observations.size());
    std::size_t pos = 0, neg = 0;
    for (const Observation& o : observations) {
        const std::optional<int> y = label_at_horizon(o, h);
        if (!y) continue;
        (*y ? pos : neg) += 1;
        rows.push_back({&o.features, o.weight, static_cast<double>(*y), o.t, o.censored});
    }
    if (pos == 0 || neg == 0) {
        throw std::runtime_error("horizon-" + std::to_string(h) +
                                 " labeling produced a single class (positives=" +
                                 std::to_string(pos) + ", negatives=" + std::to_string(neg) +
                                 "), cannot fit logistic model");
    }

    GlmResult res = newton_glm(rows, d, config.l2_penalty, config.gradient_tolerance,
                               config.max_iterations);
    LogisticModel model;
    model.theta.assign(res.params.begin(), res.params.begin() + d);
    model.intercept = res.params[d];
    model.horizon = h;
    model.l2_penalty = config.l2_penalty;
    const std::size_t m = d + 1;
    model.hessian_diag.resize(m);
    for (std::size_t j = 0; j < m; ++j) model.hessian_diag[j] = res.hessian[j * m + j];
    if (d <= kFullHessianMaxDim) model.hessian_full = std::move(res.hessian);
    model.feature_names = default_names({}, d);
    model.fit_iterations = res.iterations;
    return model;
}

double logistic_score(const LogisticModel& model, const std::vector<double>& x) {
    return sigmoid(checked_dot(model.theta, model.intercept, x, model.dim()));
}

double sigmoid_of_gaussian_variance(const GaussianScorePosterior& posterior) {
    const double pi = std::acos(-1.0);
    const double mu = posterior.mu;
    const double s2 = posterior.sigma2;
    const double first =
        normal_cdf((pi * mu / std::sqrt(8.0) - 1.0) / std::sqrt(pi - 1.0 + pi * pi * s2 / 8.0));
    const double second = std::pow(1.0 + std::exp(-mu / std::sqrt(1.0 + pi * s2 / 8.0)), -2.0);
    return first - second;
}

PredictionVariance logistic_prediction_variance(const LogisticModel& model,
                                                const std::vector<double>& x,
                                                VarianceMode mode) {
    const std::size_t d = model.dim();
    const std::size_t m = d + 1;
    GaussianScorePosterior post;
    post.mu = checked_dot(model.theta, model.intercept, x, d);
    if (mode == VarianceMode::diagonal) {
        if (model.hessian_diag.size() != m) {
            throw std::runtime_error("model has no stored Hessian diagonal");
        }
        double s2 = 0.0;
        for (std::size_t j = 0; j < d; ++j) s2 += x[j] * x[j] / model.hessian_diag[j];
        s2 += 1.0 / model.hessian_diag[d];
        post.sigma2 = s2;
    } else {
        if (!model.has_full_hessian()) {
            throw std::runtime_error(
                "full-Hessian variance unavailable: model was fitted with more than 200 features");
        }
        std::vector<double> xt(x);
        xt.push_back(1.0);
        Cholesky ch;
        try {
            ch = cholesky_decompose(model.hessian_full, m);
        } catch (const std::runtime_error&) {
            throw std::runtime_error("full Hessian is singular; refit with l2_penalty > 0");
        }
        const std::vector<double> z = cholesky_solve(ch, xt);
        double s2 = 0.0;
        for (std::size_t j = 0; j < m; ++j) s2 += xt[j] * z[j];
        post.sigma2 = s2;
    }
    PredictionVariance out;
    out.posterior = post;
    out.raw = sigmoid_of_gaussian_variance(post);
    out.value = std::clamp(out.raw, 0.0, 0.25);
    return out;
}

GeometricModel fit_geometric_pointestimate(const std::vector<Observation>& observations,
                                           const GeometricConfig& config) {
    if (observations.empty()) throw std::invalid_argument("empty dataset");
    const std::size_t d = observations.front().features.size();
    validate_rows(observations, d);
    bool any_uncensored = false;
    for (const Observation& o : observations) any_uncensored |= !o.censored;
    if (!any_uncensored) {
        throw std::runtime_error(
            "all rows censored: likelihood is unbounded (rate -> 0), cannot fit");
    }
    std::vector<ScoreRow> rows;
    rows.reserve(observations.size());
    for (const Observation& o : observations) {
        rows.push_back({&o.features, o.weight, -1.0, o.t, o.censored});
    }
    GlmResult res = newton_glm(rows, d, config.l2_penalty, config.gradient_tolerance,
                               config.max_iterations);
    GeometricModel model;
    model.weights.assign(res.params.begin(), res.params.begin() + d);
    model.intercept = res.params[d];
    model.feature_names = default_names({}, d);
    model.fit_iterations = res.iterations;
    return model;
}

double geometric_event_rate(const GeometricModel& model, const std::vector<double>& x) {
    return sigmoid(checked_dot(model.weights, model.intercept, x, model.dim()));
}

double logistic_neg_log_likelihood(const LogisticModel& model,
                                   const std::vector<Observation>& observations) {
    double acc = 0.0, wsum = 0.0;
    for (const Observation& o : observations) {
        const std::optional<int> y = label_at_horizon(o, model.horizon);
        if (!y) continue;
        const double s = checked_dot(model.theta, model.intercept, o.features, model.dim());
        acc += o.weight * (softplus(s) - *y * s);
        wsum += o.weight;
    }
    if (wsum == 0.0) throw std::runtime_error("no labeled rows at the model's horizon");
    return acc / wsum;
}

double geometric_neg_log_likelihood(const GeometricModel& model,
                                    const std::vector<Observation>& observations) {
    double acc = 0.0, wsum = 0.0;
    for (const Observation& o : observations) {
        const double s = checked_dot(model.weights, model.intercept, o.features, model.dim());
        const double lp = -softplus(-s);
        const double lq = -softplus(s);
        acc -= o.weight * (o.censored ? static_cast<double>(o.t) * lq
                                      : lp + static_cast<double>(o.t - 1) * lq);
        wsum += o.weight;
    }
    return acc / wsum;
}

}  // namespace betasurv
