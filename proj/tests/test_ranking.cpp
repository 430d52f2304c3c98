#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "betasurv/beta_math.hpp"
#include "betasurv/ranking.hpp"
#include "doctest.h"
#include "oracles.hpp"

using betasurv::BetaParams;
using betasurv::MedianOrder;
using betasurv::ProjectionMode;
using betasurv::compare_by_median;
using betasurv::pairwise_prob_integer;
using betasurv::power_beta_moments;
using betasurv::project_power_beta;
using betasurv::rank_at_horizon;

TEST_CASE("pairwise win probabilities match the exact finite sums") {
    struct Case {
        double au, bu, av, bv, expected;
    };
    // mpmath, 50 digits
    const Case table[] = {
        {1, 1, 1, 2, 0.33333333333333333},
        {2, 3, 3, 2, 0.75714285714285714},
        {5, 7, 4, 2, 0.85897435897435897},
        {3, 3, 3, 3, 0.5},
        {8, 1, 1, 8, 7.77000777000777e-5},
        {2, 2, 6, 6, 0.5},
    };
    for (const auto& c : table) {
        double got = pairwise_prob_integer(BetaParams(c.au, c.bu), BetaParams(c.av, c.bv));
        CHECK(oracles::rel_error(got, c.expected) < 1e-12);
    }
}

TEST_CASE("pairwise probabilities are complementary and bounded") {
    for (int au = 1; au <= 6; ++au) {
        for (int bu = 1; bu <= 6; ++bu) {
            BetaParams u(au, bu);
            BetaParams v(7 - (au + bu) % 6, 1 + (au * bu) % 5);
            double puv = pairwise_prob_integer(u, v);
            double pvu = pairwise_prob_integer(v, u);
            CHECK(puv > 0.0);
            CHECK(puv < 1.0);
            CHECK(std::fabs(puv + pvu - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("pairwise probabilities require small integer shapes") {
    CHECK_THROWS_AS(pairwise_prob_integer(BetaParams(1.5, 2.0), BetaParams(1.0, 1.0)),
                    std::domain_error);
    CHECK_THROWS_AS(pairwise_prob_integer(BetaParams(1.0, 1.0), BetaParams(2.0, 61.0)),
                    std::domain_error);
}

TEST_CASE("median comparison agrees with pairwise probabilities on integers") {
    for (int au = 1; au <= 5; ++au) {
        for (int bu = 1; bu <= 5; ++bu) {
            for (int av = 1; av <= 5; ++av) {
                for (int bv = 1; bv <= 5; ++bv) {
                    BetaParams u(au, bu);
                    BetaParams v(av, bv);
                    double p = pairwise_prob_integer(u, v);  // P(theta_v > theta_u)
                    MedianOrder order = compare_by_median(u, v);
                    MedianOrder reversed = compare_by_median(v, u);
                    // antisymmetric under argument swap, including tie-breaks
                    if (order == MedianOrder::u_first) {
                        CHECK(reversed == MedianOrder::v_first);
                    } else if (order == MedianOrder::v_first) {
                        CHECK(reversed == MedianOrder::u_first);
                    } else {
                        CHECK(reversed == MedianOrder::tie);
                    }
                    if (p > 0.5 + 1e-9) {
                        CHECK(order == MedianOrder::v_first);
                    } else if (p < 0.5 - 1e-9) {
                        CHECK(order == MedianOrder::u_first);
                    }
                }
            }
        }
    }
}

TEST_CASE("median comparison falls back to the lower alpha on ties") {
    CHECK(compare_by_median(BetaParams(2, 2), BetaParams(5, 5)) == MedianOrder::u_first);
    CHECK(compare_by_median(BetaParams(5, 5), BetaParams(2, 2)) == MedianOrder::v_first);
    CHECK(compare_by_median(BetaParams(3, 3), BetaParams(3, 3)) == MedianOrder::tie);
}

TEST_CASE("projected moments match the frozen references") {
    struct Case {
        double a, b;
        std::int64_t t;
        double m1, m2, ahat, bhat;
    };
    // mpmath, 50 digits
    const Case table[] = {
        {2, 2, 3, 0.1, 0.011904761904761905, 4.625, 41.625},
        {4.75, 14.25, 4, 0.014964234983766234, 0.00042051965540105646, 1.1070456530646308,
         72.872389598092254},
        {0.5, 1.5, 2, 0.125, 0.0234375, 1.625, 11.375},
        {3.3, 0.7, 5, 0.049354593749999999, 0.0031531006615306489, 3.1792767363253492,
         61.23776116757492},
    };
    for (const auto& c : table) {
        auto m = power_beta_moments(BetaParams(c.a, c.b), c.t);
        CHECK(oracles::rel_error(m.m1, c.m1) < 1e-12);
        CHECK(oracles::rel_error(m.m2, c.m2) < 1e-12);
        BetaParams proj = project_power_beta(BetaParams(c.a, c.b), c.t);
        CHECK(oracles::rel_error(proj.alpha, c.ahat) < 1e-10);
        CHECK(oracles::rel_error(proj.beta, c.bhat) < 1e-10);
    }
}

TEST_CASE("horizon one mirrors the shape parameters") {
    for (auto [a, b] : {std::pair{1.0, 1.0}, {2.0, 1.0}, {4.75, 14.25}, {0.5, 1.5}}) {
        BetaParams proj = project_power_beta(BetaParams(a, b), 1);
        CHECK(std::fabs(proj.alpha - b) < 1e-9);
        CHECK(std::fabs(proj.beta - a) < 1e-9);
    }
}

TEST_CASE("the product-form moments differ from integration for skewed shapes") {
    BetaParams p(2.0, 3.0);
    auto exact = power_beta_moments(p, 1, ProjectionMode::exact);
    auto prod = power_beta_moments(p, 1, ProjectionMode::closed_form_products);
    CHECK(exact.m1 == doctest::Approx(0.6).epsilon(1e-12));   // E[1-theta]
    CHECK(exact.m2 == doctest::Approx(0.4).epsilon(1e-12));   // E[(1-theta)^2]
    CHECK(prod.m1 == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(prod.m2 == doctest::Approx(0.2).epsilon(1e-12));    // E[theta^2] instead
    BetaParams sym(3.0, 3.0);
    auto se = power_beta_moments(sym, 1, ProjectionMode::exact);
    auto sp = power_beta_moments(sym, 1, ProjectionMode::closed_form_products);
    CHECK(se.m2 == doctest::Approx(sp.m2).epsilon(1e-12));
}

TEST_CASE("ranking orders by projected median with deterministic tie-breaks") {
    std::vector<std::pair<std::string, BetaParams>> items = {
        {"u-shaped", BetaParams(1.0 / 12.0, 0.25)},
        {"bell", BetaParams(4.75, 14.25)},
        {"skew", BetaParams(0.5, 1.5)},
    };
    auto ranked1 = rank_at_horizon(items, 1);
    REQUIRE(ranked1.size() == 3);
    CHECK(ranked1[0].item_id == "bell");   // median 0.241
    CHECK(ranked1[1].item_id == "skew");   // median 0.163
    CHECK(ranked1[2].item_id == "u-shaped");
    for (const auto& r : ranked1) {
        CHECK(r.horizon == 1);
        CHECK(!r.projection_fallback);
    }

    auto ranked4 = rank_at_horizon(items, 4);
    for (const auto& r : ranked4) {
        for (const auto& item : items) {
            if (item.first != r.item_id) continue;
            BetaParams proj = project_power_beta(item.second, 4);
            CHECK(r.params.alpha == proj.alpha);
            CHECK(r.params.beta == proj.beta);
            CHECK(r.median_score ==
                  doctest::Approx(betasurv::beta_median(proj)).epsilon(1e-12));
        }
    }
    for (std::size_t i = 1; i < ranked4.size(); ++i) {
        CHECK(ranked4[i - 1].median_score >= ranked4[i].median_score);
    }
}

TEST_CASE("equal medians rank the lower alpha first, then input order") {
    std::vector<std::pair<std::string, BetaParams>> items = {
        {"high-alpha", BetaParams(5, 5)},
        {"low-alpha", BetaParams(2, 2)},
        {"high-alpha-again", BetaParams(5, 5)},
    };
    auto ranked = rank_at_horizon(items, 1);
    CHECK(ranked[0].item_id == "low-alpha");
    CHECK(ranked[1].item_id == "high-alpha");
    CHECK(ranked[2].item_id == "high-alpha-again");
}
