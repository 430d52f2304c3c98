#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "betasurv/beta_math.hpp"
#include "betasurv/dataset.hpp"

namespace betasurv {

struct CohortSpec {
    std::string name;
    BetaParams params;
    std::size_t n = 0;
};

// The three benchmark prior shapes, all with mean 0.25: bell-shaped,
// right-skewed, and u-shaped (alpha = 1/12 exactly).
std::vector<CohortSpec> mixture_cohorts(std::size_t n_per_cohort);

// Per unit: draw theta ~ Beta(alpha, beta) once, then a shifted-geometric
// event time; times past the horizon are right-censored at the horizon.
// Each unit gets its own counter-split RNG stream, so output is reproducible
// independently of traversal order.
std::vector<Observation> gen_beta_geometric(const BetaParams& params, std::size_t n,
                                            std::int64_t censor_horizon, std::uint64_t seed);

// Three-cohort mixture with one-hot group features.
Dataset gen_table1_mixture(std::size_t n_per_cohort, std::int64_t censor_horizon,
                           std::uint64_t seed);

// Mixture draws with a per-unit homogeneity covariate u ~ Uniform(0,1):
// alpha = alpha0 * (1 + homogeneity_level * u) + Exp(noise_scale), beta matched
// to keep the prior mean at 0.25 plus Exp(noise_scale). Features: group one-hot
// plus u. homogeneity_level = 0 recovers the plain heterogeneous mixture.
Dataset gen_heterogeneity_sweep(std::size_t n, double homogeneity_level, double noise_scale,
                                std::int64_t censor_horizon, std::uint64_t seed);

}  // namespace betasurv
