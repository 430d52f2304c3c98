#include "betasurv/sbg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "betasurv/parallel.hpp"

namespace betasurv {

namespace {

void require_t_event(std::int64_t t) {
    if (t < 1) {
        throw std::domain_error("event time must be >= 1, got " + std::to_string(t) +
                                " (shift the dataset by one time unit)");
    }
}

// Bound on (a, b) iterates in the scalar fit; exp(18) stays inside the
// BetaParams shape range.
constexpr double kScalarClamp = 18.0;

// Trust-region cap on the per-iteration step length in (a, b).
constexpr double kMaxStepNorm = 4.0;

}  // namespace

double sbg_log_pmf(const BetaParams& params, std::int64_t t) {
    require_t_event(t);
    const double a = params.alpha;
    const double b = params.beta;
    const double s = a + b;
    double lp = std::log(a) - std::log(s);
    for (std::int64_t u = 2; u <= t; ++u) {
        lp += std::log(b + static_cast<double>(u) - 2.0) - std::log(s + static_cast<double>(u) - 1.0);
    }
    return lp;
}

double sbg_log_survival(const BetaParams& params, std::int64_t t) {
    if (t < 0) throw std::domain_error("survival time must be >= 0");
    if (t == 0) return 0.0;
    const double a = params.alpha;
    const double b = params.beta;
    const double s = a + b;
    double ls = std::log(b) - std::log(s);
    for (std::int64_t u = 2; u <= t; ++u) {
        ls += std::log(b + static_cast<double>(u) - 1.0) - std::log(s + static_cast<double>(u) - 1.0);
    }
    return ls;
}

double sbg_pmf(const BetaParams& params, std::int64_t t) {
    return std::exp(sbg_log_pmf(params, t));
}

double sbg_survival(const BetaParams& params, std::int64_t t) {
    return std::exp(sbg_log_survival(params, t));
}

std::vector<double> sbg_survival_curve(const BetaParams& params, std::int64_t horizon) {
    if (horizon < 1) throw std::domain_error("horizon must be >= 1");
    std::vector<double> curve;
    curve.reserve(horizon);
    const double s = params.alpha + params.beta;
    double ls = std::log(params.beta) - std::log(s);
    curve.push_back(std::exp(ls));
    for (std::int64_t t = 2; t <= horizon; ++t) {
        const double td = static_cast<double>(t);
        ls += std::log(params.beta + td - 1.0) - std::log(s + td - 1.0);
        curve.push_back(std::exp(ls));
    }
    return curve;
}

double sbg_neg_log_likelihood(const std::vector<Observation>& observations,
                              const std::vector<BetaParams>& params_per_row, int threads) {
    if (observations.size() != params_per_row.size()) {
        throw std::invalid_argument("observations and params_per_row must have equal length");
    }
    auto block = [&](std::size_t b0, std::size_t b1) {
        double acc = 0.0;
        for (std::size_t i = b0; i < b1; ++i) {
            const Observation& o = observations[i];
            const double lp = o.censored ? sbg_log_survival(params_per_row[i], o.t)
                                         : sbg_log_pmf(params_per_row[i], o.t);
            acc -= o.weight * lp;
        }
        return acc;
    };
    return blocked_reduce<double>(observations.size(), threads, block,
                                  [](double x, double y) { return x + y; }, 0.0);
}

SbgDerivatives sbg_derivatives(const BetaParams& params, std::int64_t t, bool censored) {
    require_t_event(t);
    const double a = params.alpha;
    const double b = params.beta;
    const double s = a + b;
    SbgDerivatives d;
    if (!censored) {
        d.dlog_da = b / s;
        d.dlog_db = -b / s;
    } else {
        d.dlog_da = -a / s;
        d.dlog_db = a / s;
    }
    d.d2log_da2 = -a * b / (s * s);
    d.d2log_db2 = d.d2log_da2;
    // both branches share -sum log(alpha+beta+u), so the mixed term is common
    d.d2log_dadb = a * b / (s * s);
    for (std::int64_t u = 2; u <= t; ++u) {
        const double uu = static_cast<double>(u);
        const double d2 = s + uu - 1.0;
        d.dlog_da += -a / d2;
        d.d2log_da2 += -a * (b + uu - 1.0) / (d2 * d2);
        d.d2log_dadb += a * b / (d2 * d2);
        if (!censored) {
            const double d1 = b + uu - 2.0;
            d.dlog_db += (a + 1.0) * b / (d1 * d2);
            d.d2log_db2 += (a + 1.0) * b * ((uu - 2.0) * (a + uu - 1.0) - b * b) / (d1 * d1 * d2 * d2);
        } else {
            const double d1 = b + uu - 1.0;
            d.dlog_db += a * b / (d1 * d2);
            d.d2log_db2 += a * b * ((uu - 1.0) * (a + uu - 1.0) - b * b) / (d1 * d1 * d2 * d2);
        }
    }
    return d;
}

ConvexityDiagnostic convexity_diagnostic(const std::vector<Observation>& observations,
                                         const std::vector<BetaParams>& params_per_row) {
    if (observations.size() != params_per_row.size()) {
        throw std::invalid_argument("observations and params_per_row must have equal length");
    }
    ConvexityDiagnostic out;
    out.a_curvature.reserve(observations.size());
    out.b_curvature.reserve(observations.size());
    for (std::size_t i = 0; i < observations.size(); ++i) {
        const Observation& o = observations[i];
        const SbgDerivatives d = sbg_derivatives(params_per_row[i], o.t, o.censored);
        out.a_curvature.push_back(-o.weight * d.d2log_da2);
        out.b_curvature.push_back(-o.weight * d.d2log_db2);
    }
    return out;
}

ScalarFitResult fit_sbg_scalar(const std::vector<Observation>& observations, double tolerance,
                               int max_iterations) {
    if (observations.empty()) throw std::invalid_argument("empty dataset");
    double wsum = 0.0;
    bool any_uncensored = false;
    for (const Observation& o : observations) {
        require_t_event(o.t);
        if (o.weight <= 0.0) throw std::invalid_argument("weights must be positive");
        wsum += o.weight;
        any_uncensored |= !o.censored;
    }
    if (!any_uncensored) {
        throw std::runtime_error(
            "all rows censored: likelihood is unbounded (beta -> infinity), cannot fit");
    }

    ScalarFitResult res;
    double a = 0.0, b = 0.0;

    auto loss_at = [&](double aa, double bb) {
        const BetaParams p(std::exp(aa), std::exp(bb));
        double acc = 0.0;
        for (const Observation& o : observations) {
            acc -= o.weight *
                   (o.censored ? sbg_log_survival(p, o.t) : sbg_log_pmf(p, o.t));
        }
        return acc / wsum;
    };

    double loss = loss_at(a, b);
    bool stalled = false;
    for (res.iterations = 0; res.iterations < max_iterations; ++res.iterations) {
        const BetaParams p(std::exp(a), std::exp(b));
        double ga = 0.0, gb = 0.0, ha = 0.0, hb = 0.0, hab = 0.0;
        for (const Observation& o : observations) {
            const SbgDerivatives d = sbg_derivatives(p, o.t, o.censored);
            ga -= o.weight * d.dlog_da;
            gb -= o.weight * d.dlog_db;
            ha -= o.weight * d.d2log_da2;
            hb -= o.weight * d.d2log_db2;
            hab -= o.weight * d.d2log_dadb;
        }
        ga /= wsum;
        gb /= wsum;
        ha /= wsum;
        hb /= wsum;
        hab /= wsum;
        if (std::max(std::fabs(ga), std::fabs(gb)) < tolerance) {
            res.converged = true;
            break;
        }
        // The previous step was accepted without a measurable loss decrease:
        // the decrement needed to push the gradient further is below one ulp
        // of the loss, so iterating more would only random-walk in noise.
        if (stalled) break;
        // Full Newton step when the Hessian is positive definite; otherwise a
        // diagonally scaled step, where |curvature| keeps it a descent
        // direction even if the b-coordinate is locally concave. The norm cap
        // tames near-singular Hessians on likelihood ridges (alpha+beta only
        // weakly identified), where the raw step can be astronomically long.
        double da, db;
        const double det = ha * hb - hab * hab;
        if (ha > 0.0 && det > 0.0) {
            da = -(hb * ga - hab * gb) / det;
            db = -(ha * gb - hab * ga) / det;
        } else {
            da = -ga / std::max(std::fabs(ha), 1e-8);
            db = -gb / std::max(std::fabs(hb), 1e-8);
        }
        double dir_deriv = ga * da + gb * db;
        if (dir_deriv >= 0.0) {
            da = -ga / std::max(std::fabs(ha), 1e-8);
            db = -gb / std::max(std::fabs(hb), 1e-8);
            dir_deriv = ga * da + gb * db;
        }
        const double dir_norm = std::hypot(da, db);
        if (dir_norm > kMaxStepNorm) {
            const double shrink = kMaxStepNorm / dir_norm;
            da *= shrink;
            db *= shrink;
            dir_deriv *= shrink;
        }
        double step = 1.0;
        bool accepted = false;
        const double prev_loss = loss;
        for (int ls = 0; ls < 60; ++ls) {
            const double an = std::clamp(a + step * da, -kScalarClamp, kScalarClamp);
            const double bn = std::clamp(b + step * db, -kScalarClamp, kScalarClamp);
            const double ln = loss_at(an, bn);
            if (ln <= loss + 1e-4 * step * dir_deriv || ln < loss) {
                a = an;
                b = bn;
                loss = ln;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        stalled = !(loss < prev_loss);
    }
    res.a = a;
    res.b = b;
    res.loss = loss;
    res.params = BetaParams(std::exp(a), std::exp(b));
    res.hit_clamp = std::max(std::fabs(a), std::fabs(b)) >= kScalarClamp - 1e-9;
    return res;
}

}  // namespace betasurv
