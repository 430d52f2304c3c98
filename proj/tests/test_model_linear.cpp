#include <cmath>
#include <stdexcept>
#include <vector>

#include "betasurv/model_linear.hpp"
#include "betasurv/rng.hpp"
#include "betasurv/sbg.hpp"
#include "betasurv/simgen.hpp"
#include "doctest.h"
#include "oracles.hpp"

using betasurv::BetaParams;
using betasurv::FitConfig;
using betasurv::Observation;
using betasurv::fit_linear;
using betasurv::predict_params;

namespace {

// One-step rows: event at 1 or censored at 1, with a couple of noise features.
std::vector<Observation> one_step_rows(std::size_t n, std::uint64_t seed) {
    betasurv::Rng rng(seed);
    std::vector<Observation> obs(n);
    for (auto& o : obs) {
        o.t = 1;
        o.censored = rng.uniform() < 0.6;
        o.features = {rng.normal(), rng.uniform()};
    }
    return obs;
}

}  // namespace

TEST_CASE("zero epochs leave the uniform prior") {
    std::vector<Observation> obs = {{2, false, {0.3}, 1.0}, {1, true, {-0.2}, 1.0}};
    FitConfig cfg;
    cfg.max_epochs = 0;
    auto fit = fit_linear(obs, cfg);
    BetaParams p = predict_params(fit.model, {1.7});
    CHECK(p.alpha == 1.0);
    CHECK(p.beta == 1.0);
    CHECK(betasurv::predict_event_variance(fit.model, {1.7}) ==
          doctest::Approx(1.0 / 12.0).epsilon(1e-15));
}

TEST_CASE("intercept-only fit agrees with the scalar optimizer") {
    auto obs = betasurv::gen_beta_geometric(BetaParams(2.0, 5.0), 2000, 8, 31);
    auto scalar = betasurv::fit_sbg_scalar(obs);
    REQUIRE(scalar.converged);

    FitConfig cfg;
    cfg.use_newton = true;
    cfg.max_epochs = 20000;
    cfg.l2_penalty = 0.0;
    cfg.gradient_tolerance = 1e-8;
    auto fit = fit_linear(obs, cfg);
    CHECK(fit.report.converged);
    CHECK(std::fabs(fit.model.intercept_a - scalar.a) < 1e-4);
    CHECK(std::fabs(fit.model.intercept_b - scalar.b) < 1e-4);
}

TEST_CASE("full-batch line search never increases the objective") {
    auto data = betasurv::gen_heterogeneity_sweep(600, 1.0, 0.05, 6, 5);
    FitConfig cfg;
    cfg.max_epochs = 80;
    auto fit = fit_linear(data.rows, cfg, data.feature_names);
    REQUIRE(!fit.report.epoch_losses.empty());
    for (std::size_t i = 1; i < fit.report.epoch_losses.size(); ++i) {
        CHECK(fit.report.epoch_losses[i] <= fit.report.epoch_losses[i - 1] + 1e-12);
    }
    CHECK(fit.model.feature_names == data.feature_names);
}

TEST_CASE("one-step data keeps the two score blocks antisymmetric") {
    auto obs = one_step_rows(400, 12);
    FitConfig cfg;
    cfg.max_epochs = 120;
    auto fit = fit_linear(obs, cfg);
    CHECK(std::fabs(fit.model.intercept_a + fit.model.intercept_b) < 1e-12);
    for (std::size_t j = 0; j < fit.model.dim(); ++j) {
        CHECK(std::fabs(fit.model.gamma_a[j] + fit.model.gamma_b[j]) < 1e-12);
    }
    auto eq = betasurv::to_logistic_equivalent(fit.model);
    REQUIRE(eq.weights.size() == fit.model.dim());
    for (std::size_t j = 0; j < eq.weights.size(); ++j) {
        CHECK(eq.weights[j] ==
              doctest::Approx(fit.model.gamma_b[j] - fit.model.gamma_a[j]).epsilon(1e-15));
    }
    CHECK(eq.intercept == fit.model.intercept_b - fit.model.intercept_a);
    // P(T=1|x) from the equivalent scores matches the model's pmf at t=1
    std::vector<double> x = {0.4, 0.6};
    double s = eq.intercept + eq.weights[0] * x[0] + eq.weights[1] * x[1];
    double p1 = 1.0 / (1.0 + std::exp(s));
    CHECK(betasurv::sbg_pmf(predict_params(fit.model, x), 1) ==
          doctest::Approx(p1).epsilon(1e-12));
}

TEST_CASE("feature scaling does not change the unpenalized optimum") {
    betasurv::Rng rng(77);
    std::vector<Observation> obs(250);
    for (auto& o : obs) {
        double x = rng.normal();
        double theta = rng.beta(2.0, 5.0);
        double r = std::log(rng.uniform_pos()) / std::log1p(-theta);
        o.t = std::min<std::int64_t>(static_cast<std::int64_t>(r) + 1, 10);
        o.censored = o.t >= 10;
        o.features = {x};
    }
    FitConfig cfg;
    cfg.use_newton = true;
    cfg.max_epochs = 20000;
    cfg.l2_penalty = 0.0;
    cfg.gradient_tolerance = 1e-8;
    auto base = fit_linear(obs, cfg);
    REQUIRE(base.report.converged);

    auto scaled_obs = obs;
    for (auto& o : scaled_obs) o.features[0] *= 10.0;
    auto scaled = fit_linear(scaled_obs, cfg);
    REQUIRE(scaled.report.converged);

    for (double x : {-2.0, -0.5, 0.0, 1.0, 2.5}) {
        BetaParams p = predict_params(base.model, {x});
        BetaParams q = predict_params(scaled.model, {10.0 * x});
        CHECK(oracles::rel_error(q.alpha, p.alpha) < 1e-5);
        CHECK(oracles::rel_error(q.beta, p.beta) < 1e-5);
    }
}

TEST_CASE("mini-batch training is seeded and reduces the objective") {
    auto data = betasurv::gen_heterogeneity_sweep(800, 1.5, 0.05, 6, 21);
    FitConfig cfg;
    cfg.batch_size = 64;
    cfg.learning_rate = 0.05;
    cfg.max_epochs = 30;
    cfg.seed = 5;
    auto fit1 = fit_linear(data.rows, cfg, data.feature_names);
    auto fit2 = fit_linear(data.rows, cfg, data.feature_names);
    CHECK(fit1.model.gamma_a == fit2.model.gamma_a);
    CHECK(fit1.model.gamma_b == fit2.model.gamma_b);
    CHECK(fit1.model.intercept_a == fit2.model.intercept_a);

    double total_weight = 0.0;
    for (const auto& o : data.rows) total_weight += o.weight;
    std::vector<BetaParams> uniform(data.rows.size(), BetaParams(1.0, 1.0));
    double initial = betasurv::sbg_neg_log_likelihood(data.rows, uniform) / total_weight;
    REQUIRE(!fit1.report.epoch_losses.empty());
    CHECK(fit1.report.epoch_losses.back() < initial);
}

TEST_CASE("prediction clamps scores and matches the survival recurrence") {
    betasurv::LinearBetaLogistic model;
    model.gamma_a = {40.0};
    model.gamma_b = {-1.0};
    model.feature_names = {"x0"};
    BetaParams p = predict_params(model, {1.0});
    // raw score 40 hits the +-30 score clamp, then the shape-range clamp
    CHECK(p.alpha == 1e8);
    CHECK(p.beta == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));

    model.gamma_a = {0.3};
    auto curve = betasurv::predict_survival_curve(model, {1.0}, 5);
    auto direct = betasurv::sbg_survival_curve(predict_params(model, {1.0}), 5);
    REQUIRE(curve.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(curve[i] == direct[i]);

    CHECK_THROWS_AS(predict_params(model, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("default feature names are positional") {
    std::vector<Observation> obs = {{1, false, {0.1, 0.2}, 1.0}, {2, true, {0.0, 1.0}, 1.0}};
    FitConfig cfg;
    cfg.max_epochs = 1;
    auto fit = fit_linear(obs, cfg);
    REQUIRE(fit.model.feature_names.size() == 2);
    CHECK(fit.model.feature_names[0] == "x0");
    CHECK(fit.model.feature_names[1] == "x1");
}

TEST_CASE("invalid training inputs are rejected with row context") {
    FitConfig cfg;
    CHECK_THROWS_AS(fit_linear({}, cfg), std::invalid_argument);

    std::vector<Observation> mismatch = {{1, false, {0.1}, 1.0}, {2, false, {0.1, 0.2}, 1.0}};
    CHECK_THROWS_AS(fit_linear(mismatch, cfg), std::invalid_argument);

    std::vector<Observation> bad_t = {{0, false, {0.1}, 1.0}};
    CHECK_THROWS_AS(fit_linear(bad_t, cfg), std::invalid_argument);

    std::vector<Observation> bad_w = {{1, false, {0.1}, -1.0}};
    CHECK_THROWS_AS(fit_linear(bad_w, cfg), std::invalid_argument);

    std::vector<Observation> nan_x = {{1, false, {std::nan("")}, 1.0}};
    CHECK_THROWS_AS(fit_linear(nan_x, cfg), std::invalid_argument);

    std::vector<Observation> all_cens = {{3, true, {0.1}, 1.0}, {2, true, {0.4}, 1.0}};
    CHECK_THROWS_AS(fit_linear(all_cens, cfg), std::runtime_error);

    std::vector<Observation> ok = {{1, false, {0.1}, 1.0}};
    CHECK_THROWS_AS(fit_linear(ok, cfg, {"a", "b"}), std::invalid_argument);
}
