#include "betasurv/model_linear.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "betasurv/linalg.hpp"
#include "betasurv/parallel.hpp"
#include "betasurv/rng.hpp"
#include "betasurv/sbg.hpp"

namespace betasurv {

namespace {

// Trust-region cap on the per-epoch step length of the full-batch optimizer.
constexpr double kMaxStepNorm = 8.0;

double dot_score(const std::vector<double>& coef, double intercept, const std::vector<double>& x) {
    double s = intercept;
    for (std::size_t j = 0; j < coef.size(); ++j) {
        if (std::isnan(x[j])) {
            throw std::invalid_argument(
                "missing feature value: the linear model cannot route missing values");
        }
        s += coef[j] * x[j];
    }
    return s;
}

struct GradAccum {
    double loss = 0.0;
    std::vector<double> grad;
    std::vector<double> curv;
    std::vector<double> hess;  // row-major, only filled for Newton steps
};

// Parameter layout: [gamma_a(d), gamma_b(d), intercept_a, intercept_b].
class LinearObjective {
public:
    LinearObjective(const std::vector<Observation>& obs, const FitConfig& cfg, std::size_t d)
        : obs_(obs), cfg_(cfg), d_(d) {
        for (const Observation& o : obs_) wsum_ += o.weight;
    }

    std::size_t nparams() const { return 2 * d_ + 2; }
    double weight_sum() const { return wsum_; }

    double row_score_a(const std::vector<double>& p, const Observation& o) const {
        double s = p[2 * d_];
        for (std::size_t j = 0; j < d_; ++j) s += p[j] * o.features[j];
        return s;
    }
    double row_score_b(const std::vector<double>& p, const Observation& o) const {
        double s = p[2 * d_ + 1];
        for (std::size_t j = 0; j < d_; ++j) s += p[d_ + j] * o.features[j];
        return s;
    }

    double loss(const std::vector<double>& p) const {
        auto block = [&](std::size_t b0, std::size_t b1) {
            double acc = 0.0;
            for (std::size_t i = b0; i < b1; ++i) {
                const Observation& o = obs_[i];
                const BetaParams bp(std::exp(clamp_score(row_score_a(p, o))),
                                    std::exp(clamp_score(row_score_b(p, o))));
                acc -= o.weight * (o.censored ? sbg_log_survival(bp, o.t) : sbg_log_pmf(bp, o.t));
            }
            return acc;
        };
        double l = blocked_reduce<double>(obs_.size(), cfg_.threads, block,
                                          [](double x, double y) { return x + y; }, 0.0) /
                   wsum_;
        return l + penalty(p);
    }

    // Loss plus gradient, per-coordinate curvature when want_curv, and the
    // full Hessian when want_hess.
    GradAccum loss_and_grad(const std::vector<double>& p, bool want_curv,
                            bool want_hess = false) const {
        const std::size_t np = nparams();
        auto block = [&](std::size_t b0, std::size_t b1) {
            GradAccum acc;
            acc.grad.assign(np, 0.0);
            if (want_curv) acc.curv.assign(np, 0.0);
            if (want_hess) acc.hess.assign(np * np, 0.0);
            // extended feature vector (features, 1) with the coordinate of
            // each entry in the a-score and b-score blocks
            std::vector<double> ext(d_ + 1, 1.0);
            std::vector<std::size_t> ai(d_ + 1), bi(d_ + 1);
            for (std::size_t j = 0; j <= d_; ++j) {
                ai[j] = j < d_ ? j : 2 * d_;
                bi[j] = j < d_ ? d_ + j : 2 * d_ + 1;
            }
            for (std::size_t i = b0; i < b1; ++i) {
                const Observation& o = obs_[i];
                const double ra = row_score_a(p, o);
                const double rb = row_score_b(p, o);
                const double ga_gate = std::fabs(ra) < kClamp ? 1.0 : 0.0;
                const double gb_gate = std::fabs(rb) < kClamp ? 1.0 : 0.0;
                const BetaParams bp(std::exp(clamp_score(ra)), std::exp(clamp_score(rb)));
                const SbgDerivatives sd = sbg_derivatives(bp, o.t, o.censored);
                acc.loss -= o.weight * (o.censored ? sbg_log_survival(bp, o.t) : sbg_log_pmf(bp, o.t));
                const double la = -o.weight * sd.dlog_da * ga_gate;
                const double lb = -o.weight * sd.dlog_db * gb_gate;
                for (std::size_t j = 0; j < d_; ++j) {
                    acc.grad[j] += la * o.features[j];
                    acc.grad[d_ + j] += lb * o.features[j];
                }
                acc.grad[2 * d_] += la;
                acc.grad[2 * d_ + 1] += lb;
                if (want_curv || want_hess) {
                    const double ca = -o.weight * sd.d2log_da2 * ga_gate;
                    const double cb = -o.weight * sd.d2log_db2 * gb_gate;
                    if (want_curv) {
                        for (std::size_t j = 0; j < d_; ++j) {
                            acc.curv[j] += ca * o.features[j] * o.features[j];
                            acc.curv[d_ + j] += cb * o.features[j] * o.features[j];
                        }
                        acc.curv[2 * d_] += ca;
                        acc.curv[2 * d_ + 1] += cb;
                    }
                    if (want_hess) {
                        const double cab = -o.weight * sd.d2log_dadb * ga_gate * gb_gate;
                        for (std::size_t j = 0; j < d_; ++j) ext[j] = o.features[j];
                        for (std::size_t k = 0; k <= d_; ++k) {
                            for (std::size_t l = 0; l <= d_; ++l) {
                                const double f = ext[k] * ext[l];
                                acc.hess[ai[k] * np + ai[l]] += ca * f;
                                acc.hess[bi[k] * np + bi[l]] += cb * f;
                                acc.hess[ai[k] * np + bi[l]] += cab * f;
                                acc.hess[bi[k] * np + ai[l]] += cab * f;
                            }
                        }
                    }
                }
            }
            return acc;
        };
        auto combine = [](GradAccum a, const GradAccum& b) {
            if (a.grad.empty()) return b;
            a.loss += b.loss;
            for (std::size_t j = 0; j < b.grad.size(); ++j) a.grad[j] += b.grad[j];
            for (std::size_t j = 0; j < b.curv.size(); ++j) a.curv[j] += b.curv[j];
            for (std::size_t j = 0; j < b.hess.size(); ++j) a.hess[j] += b.hess[j];
            return a;
        };
        GradAccum total = blocked_reduce<GradAccum>(obs_.size(), cfg_.threads, block, combine, {});
        if (total.grad.empty()) total.grad.assign(np, 0.0);
        total.loss /= wsum_;
        for (double& g : total.grad) g /= wsum_;
        for (double& c : total.curv) c /= wsum_;
        for (double& h : total.hess) h /= wsum_;
        total.loss += penalty(p);
        for (std::size_t j = 0; j < 2 * d_; ++j) {
            total.grad[j] += cfg_.l2_penalty * p[j];
            if (want_curv) total.curv[j] += cfg_.l2_penalty;
            if (want_hess) total.hess[j * np + j] += cfg_.l2_penalty;
        }
        return total;
    }

    // Single mini-batch gradient (weight-normalized over the batch).
    void batch_grad(const std::vector<double>& p, const std::vector<std::size_t>& idx,
                    std::size_t b0, std::size_t b1, std::vector<double>& g) const {
        g.assign(nparams(), 0.0);
        double bw = 0.0;
        for (std::size_t k = b0; k < b1; ++k) {
            const Observation& o = obs_[idx[k]];
            bw += o.weight;
            const double ra = row_score_a(p, o);
            const double rb = row_score_b(p, o);
            const double ga_gate = std::fabs(ra) < kClamp ? 1.0 : 0.0;
            const double gb_gate = std::fabs(rb) < kClamp ? 1.0 : 0.0;
            const BetaParams bp(std::exp(clamp_score(ra)), std::exp(clamp_score(rb)));
            const SbgDerivatives sd = sbg_derivatives(bp, o.t, o.censored);
            const double la = -o.weight * sd.dlog_da * ga_gate;
            const double lb = -o.weight * sd.dlog_db * gb_gate;
            for (std::size_t j = 0; j < d_; ++j) {
                g[j] += la * o.features[j];
                g[d_ + j] += lb * o.features[j];
            }
            g[2 * d_] += la;
            g[2 * d_ + 1] += lb;
        }
        for (double& v : g) v /= bw;
        for (std::size_t j = 0; j < 2 * d_; ++j) g[j] += cfg_.l2_penalty * p[j];
    }

private:
    static constexpr double kClamp = 30.0;
    static double clamp_score(double s) { return std::clamp(s, -kClamp, kClamp); }

    double penalty(const std::vector<double>& p) const {
        double sq = 0.0;
        for (std::size_t j = 0; j < 2 * d_; ++j) sq += p[j] * p[j];
        return 0.5 * cfg_.l2_penalty * sq;
    }

    const std::vector<Observation>& obs_;
    const FitConfig& cfg_;
    std::size_t d_;
    double wsum_ = 0.0;
};

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

LinearFit fit_linear(const std::vector<Observation>& observations, const FitConfig& config,
                     std::vector<std::string> feature_names) {
    if (observations.empty()) throw std::invalid_argument("empty dataset");
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
        for (double x : o.features) {
            if (std::isnan(x)) {
                throw std::invalid_argument("row " + std::to_string(i) +
                                            ": missing feature values are not supported by the "
                                            "linear model (impute or use the boosted model)");
            }
        }
        any_uncensored |= !o.censored;
    }
    if (!any_uncensored) {
        throw std::runtime_error(
            "all rows censored: likelihood is unbounded (beta -> infinity), cannot fit");
    }
    if (!feature_names.empty() && feature_names.size() != d) {
        throw std::invalid_argument("feature_names size does not match feature dimension");
    }

    LinearObjective obj(observations, config, d);
    std::vector<double> p(obj.nparams(), 0.0);
    TrainingReport report;

    if (config.batch_size == 0) {
        // Full batch, descent direction with backtracking line search.
        double step0 = config.learning_rate;
        bool stalled = false;
        for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
            GradAccum ga = obj.loss_and_grad(p, config.use_newton, config.use_newton);
            report.final_grad_norm = norm2(ga.grad);
            if (report.final_grad_norm <= config.gradient_tolerance) {
                report.converged = true;
                report.epoch_losses.push_back(ga.loss);
                break;
            }
            // The previous epoch's accepted step produced no measurable loss
            // decrease: further certifiable progress is below one ulp of the
            // loss, so more epochs would only random-walk in rounding noise.
            if (stalled) break;
            const std::size_t np = ga.grad.size();
            std::vector<double> dir(np);
            bool have_dir = false;
            if (config.use_newton) {
                // Newton solve; escalate a ridge until the Hessian factors,
                // which also covers locally concave b-coordinates.
                double diag_max = 0.0;
                for (std::size_t j = 0; j < np; ++j) {
                    diag_max = std::max(diag_max, std::fabs(ga.hess[j * np + j]));
                }
                double mu = 0.0;
                for (int attempt = 0; attempt < 14 && !have_dir; ++attempt) {
                    std::vector<double> h = ga.hess;
                    if (mu > 0.0) {
                        for (std::size_t j = 0; j < np; ++j) h[j * np + j] += mu;
                    }
                    try {
                        Cholesky ch = cholesky_decompose(h, np);
                        std::vector<double> sol = cholesky_solve(ch, ga.grad);
                        for (std::size_t j = 0; j < np; ++j) dir[j] = -sol[j];
                        have_dir = true;
                    } catch (const std::runtime_error&) {
                        mu = mu == 0.0 ? 1e-10 * std::max(1.0, diag_max) : mu * 100.0;
                    }
                }
            }
            if (!have_dir) {
                for (std::size_t j = 0; j < np; ++j) {
                    const double scale =
                        config.use_newton ? 1.0 / (std::fabs(ga.curv[j]) + 1e-3) : 1.0;
                    dir[j] = -ga.grad[j] * scale;
                }
            }
            double dir_deriv = 0.0;
            for (std::size_t j = 0; j < np; ++j) dir_deriv += dir[j] * ga.grad[j];
            if (dir_deriv >= 0.0) {
                for (std::size_t j = 0; j < np; ++j) {
                    const double scale =
                        config.use_newton ? 1.0 / (std::fabs(ga.curv[j]) + 1e-3) : 1.0;
                    dir[j] = -ga.grad[j] * scale;
                }
                dir_deriv = 0.0;
                for (std::size_t j = 0; j < np; ++j) dir_deriv += dir[j] * ga.grad[j];
            }
            // Cap the step length: near-singular Hessians (weakly identified
            // directions) otherwise yield steps long enough to stall the line
            // search for dozens of halvings per epoch.
            double dir_norm = 0.0;
            for (std::size_t j = 0; j < np; ++j) dir_norm += dir[j] * dir[j];
            dir_norm = std::sqrt(dir_norm);
            if (dir_norm > kMaxStepNorm) {
                const double shrink = kMaxStepNorm / dir_norm;
                for (std::size_t j = 0; j < np; ++j) dir[j] *= shrink;
                dir_deriv *= shrink;
            }
            double step = step0;
            std::vector<double> cand(p.size());
            bool accepted = false;
            for (int ls = 0; ls < 60; ++ls) {
                for (std::size_t j = 0; j < p.size(); ++j) cand[j] = p[j] + step * dir[j];
                const double lc = obj.loss(cand);
                if (lc <= ga.loss + 1e-4 * step * dir_deriv) {
                    p.swap(cand);
                    report.epoch_losses.push_back(lc);
                    accepted = true;
                    stalled = !(lc < ga.loss);
                    break;
                }
                step *= 0.5;
            }
            report.epochs = epoch + 1;
            if (!accepted) {
                report.epoch_losses.push_back(ga.loss);
                break;
            }
            step0 = std::min(config.learning_rate, step * 2.0);
        }
    } else {
        // Mini-batch SGD with a seeded shuffle per epoch.
        std::vector<std::size_t> idx(observations.size());
        std::iota(idx.begin(), idx.end(), 0);
        Rng rng(config.seed);
        std::vector<double> g;
        for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
            std::shuffle(idx.begin(), idx.end(), rng);
            for (std::size_t b0 = 0; b0 < idx.size(); b0 += config.batch_size) {
                const std::size_t b1 = std::min(idx.size(), b0 + config.batch_size);
                obj.batch_grad(p, idx, b0, b1, g);
                for (std::size_t j = 0; j < p.size(); ++j) p[j] -= config.learning_rate * g[j];
            }
            GradAccum full = obj.loss_and_grad(p, false);
            report.epoch_losses.push_back(full.loss);
            report.final_grad_norm = norm2(full.grad);
            report.epochs = epoch + 1;
            if (report.final_grad_norm <= config.gradient_tolerance) {
                report.converged = true;
                break;
            }
        }
    }

    LinearFit out;
    out.model.gamma_a.assign(p.begin(), p.begin() + d);
    out.model.gamma_b.assign(p.begin() + d, p.begin() + 2 * d);
    out.model.intercept_a = p[2 * d];
    out.model.intercept_b = p[2 * d + 1];
    if (feature_names.empty()) {
        out.model.feature_names.resize(d);
        for (std::size_t j = 0; j < d; ++j) out.model.feature_names[j] = "x" + std::to_string(j);
    } else {
        out.model.feature_names = std::move(feature_names);
    }
    out.report = std::move(report);
    return out;
}

BetaParams predict_params(const LinearBetaLogistic& model, const std::vector<double>& x) {
    if (x.size() != model.dim()) {
        throw std::invalid_argument("feature dimension mismatch: model expects " +
                                    std::to_string(model.dim()) + ", got " +
                                    std::to_string(x.size()));
    }
    const double a = std::clamp(dot_score(model.gamma_a, model.intercept_a, x), -model.clamp, model.clamp);
    const double b = std::clamp(dot_score(model.gamma_b, model.intercept_b, x), -model.clamp, model.clamp);
    return BetaParams(std::exp(a), std::exp(b));
}

std::vector<double> predict_survival_curve(const LinearBetaLogistic& model,
                                           const std::vector<double>& x, std::int64_t horizon) {
    return sbg_survival_curve(predict_params(model, x), horizon);
}

double predict_event_variance(const LinearBetaLogistic& model, const std::vector<double>& x) {
    return predict_params(model, x).variance();
}

LogisticEquivalent to_logistic_equivalent(const LinearBetaLogistic& model) {
    LogisticEquivalent eq;
    eq.weights.resize(model.dim());
    for (std::size_t j = 0; j < model.dim(); ++j) eq.weights[j] = model.gamma_b[j] - model.gamma_a[j];
    eq.intercept = model.intercept_b - model.intercept_a;
    return eq;
}

}  // namespace betasurv
