#include "betasurv/beta_math.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "betasurv/rng.hpp"

namespace betasurv {

namespace {

constexpr double kShapeLo = 1e-8;
constexpr double kShapeHi = 1e8;

double require_positive_finite(double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0) {
        throw std::domain_error(std::string(name) + " must be positive and finite, got " +
                                std::to_string(v));
    }
    return v;
}

// Stirling series remainder: lgamma(x) = (x-.5)ln x - x + .5 ln 2pi + stirling_delta(x)
double stirling_delta(double x) {
    const double x2 = x * x;
    return (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - (1.0 / 1680.0 - 1.0 / (1188.0 * x2)) / x2) / x2) / x2) / x;
}

// Continued fraction for the incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 1000; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 3e-15) return h;
    }
    throw std::runtime_error("incomplete beta continued fraction did not converge");
}

double beta_pdf(double x, double a, double b, double ln_b_ab) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - ln_b_ab);
}

}  // namespace

BetaParams::BetaParams(double a, double b) {
    require_positive_finite(a, "alpha");
    require_positive_finite(b, "beta");
    alpha = std::min(std::max(a, kShapeLo), kShapeHi);
    beta = std::min(std::max(b, kShapeLo), kShapeHi);
}

double log_beta_fn(double alpha, double beta) {
    require_positive_finite(alpha, "alpha");
    require_positive_finite(beta, "beta");
    double a = std::min(alpha, beta);
    double b = std::max(alpha, beta);
    if (b < 20.0) {
        return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    }
    // lgamma(b) - lgamma(a+b) rearranged so the large terms cancel analytically.
    const double d = -(a + b - 0.5) * std::log1p(a / b) - a * std::log(b) + a +
                     stirling_delta(b) - stirling_delta(a + b);
    return std::lgamma(a) + d;
}

double reg_inc_beta(double x, const BetaParams& params) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::domain_error("reg_inc_beta: x must lie in [0,1], got " + std::to_string(x));
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double a = params.alpha;
    const double b = params.beta;
    const double front =
        std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta_fn(a, b));
    if (x > params.mean()) {
        return 1.0 - front * betacf(b, a, 1.0 - x) / b;
    }
    return front * betacf(a, b, x) / a;
}

double inv_reg_inc_beta(double p, const BetaParams& params) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::domain_error("inv_reg_inc_beta: p must lie in [0,1]");
    }
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    const double ln_b_ab = log_beta_fn(params.alpha, params.beta);
    double lo = 0.0, hi = 1.0;
    double x = 0.5;
    // Bisection establishes a tight bracket, Newton polishes inside it.
    for (int it = 0; it < 200; ++it) {
        const double f = reg_inc_beta(x, params) - p;
        if (f > 0.0) {
            hi = x;
        } else {
            lo = x;
        }
        double next = x;
        const double dfdx = beta_pdf(x, params.alpha, params.beta, ln_b_ab);
        if (dfdx > 0.0) {
            next = x - f / dfdx;
        }
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        const double step = std::fabs(next - x);
        // converged at the current point: keep it rather than stepping off it
        if (step < 1e-12 && std::fabs(f) < 1e-13) break;
        x = next;
        if (hi - lo < 1e-15) break;
    }
    return x;
}

double beta_median(const BetaParams& params) {
    return inv_reg_inc_beta(0.5, params);
}

std::vector<double> sample_beta(const BetaParams& params, std::uint64_t seed, std::size_t n) {
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rng r = Rng::stream(seed, i);
        out.push_back(r.beta(params.alpha, params.beta));
    }
    return out;
}

}  // namespace betasurv
