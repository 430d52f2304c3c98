#include "betasurv/simgen.hpp"

#include <cmath>
#include <stdexcept>

#include "betasurv/rng.hpp"

namespace betasurv {

namespace {

void draw_event_time(double theta, std::int64_t horizon, Rng& rng, Observation& out) {
    if (theta >= 1.0) {
        out.t = 1;
        out.censored = false;
        return;
    }
    if (theta <= 0.0) {
        out.t = horizon;
        out.censored = true;
        return;
    }
    // Inverse transform: T = floor(log U / log(1-theta)) + 1 gives
    // P(T > t) = (1-theta)^t.
    const double r = std::log(rng.uniform_pos()) / std::log1p(-theta);
    if (r >= static_cast<double>(horizon)) {
        out.t = horizon;
        out.censored = true;
    } else {
        out.t = static_cast<std::int64_t>(std::floor(r)) + 1;
        out.censored = false;
    }
}

void check_gen_args(std::size_t, std::int64_t censor_horizon) {
    if (censor_horizon < 1) throw std::domain_error("censor horizon must be >= 1");
}

}  // namespace

std::vector<CohortSpec> mixture_cohorts(std::size_t n_per_cohort) {
    return {
        {"normal", BetaParams(4.75, 14.25), n_per_cohort},
        {"right", BetaParams(0.5, 1.5), n_per_cohort},
        {"u", BetaParams(1.0 / 12.0, 0.25), n_per_cohort},
    };
}

std::vector<Observation> gen_beta_geometric(const BetaParams& params, std::size_t n,
                                            std::int64_t censor_horizon, std::uint64_t seed) {
    check_gen_args(n, censor_horizon);
    std::vector<Observation> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng = Rng::stream(seed, i);
        const double theta = rng.beta(params.alpha, params.beta);
        draw_event_time(theta, censor_horizon, rng, out[i]);
    }
    return out;
}

Dataset gen_table1_mixture(std::size_t n_per_cohort, std::int64_t censor_horizon,
                           std::uint64_t seed) {
    check_gen_args(n_per_cohort, censor_horizon);
    const std::vector<CohortSpec> cohorts = mixture_cohorts(n_per_cohort);
    Dataset ds;
    for (const CohortSpec& c : cohorts) ds.feature_names.push_back("group_" + c.name);
    ds.rows.reserve(cohorts.size() * n_per_cohort);
    for (std::size_t c = 0; c < cohorts.size(); ++c) {
        for (std::size_t i = 0; i < n_per_cohort; ++i) {
            Rng rng = Rng::stream(seed, c * n_per_cohort + i);
            const double theta = rng.beta(cohorts[c].params.alpha, cohorts[c].params.beta);
            Observation o;
            o.features.assign(cohorts.size(), 0.0);
            o.features[c] = 1.0;
            draw_event_time(theta, censor_horizon, rng, o);
            ds.rows.push_back(std::move(o));
        }
    }
    return ds;
}

Dataset gen_heterogeneity_sweep(std::size_t n, double homogeneity_level, double noise_scale,
                                std::int64_t censor_horizon, std::uint64_t seed) {
    check_gen_args(n, censor_horizon);
    if (homogeneity_level < 0.0 || !std::isfinite(homogeneity_level)) {
        throw std::domain_error("homogeneity level must be >= 0");
    }
    if (noise_scale <= 0.0 || !std::isfinite(noise_scale)) {
        throw std::domain_error("noise scale must be > 0");
    }
    const std::vector<CohortSpec> cohorts = mixture_cohorts(0);
    Dataset ds;
    for (const CohortSpec& c : cohorts) ds.feature_names.push_back("group_" + c.name);
    ds.feature_names.push_back("u");
    ds.rows.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng = Rng::stream(seed, i);
        const std::size_t g = static_cast<std::size_t>(rng.below(cohorts.size()));
        const double u = rng.uniform();
        const double a_base = cohorts[g].params.alpha * (1.0 + homogeneity_level * u);
        const double alpha = a_base - noise_scale * std::log(rng.uniform_pos());
        const double beta = 3.0 * a_base - noise_scale * std::log(rng.uniform_pos());
        const double theta = rng.beta(alpha, beta);
        Observation& o = ds.rows[i];
        o.features.assign(cohorts.size() + 1, 0.0);
        o.features[g] = 1.0;
        o.features[cohorts.size()] = u;
        draw_event_time(theta, censor_horizon, rng, o);
    }
    return ds;
}

}  // namespace betasurv
