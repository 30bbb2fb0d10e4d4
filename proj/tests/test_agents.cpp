#include "drm/agents.hpp"
#include "drm/config_io.hpp"
#include "drm/core_model.hpp"
#include "drm/errors.hpp"
#include "drm/sim_engine.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace drm;

namespace {

MarketConfig market(int T, int m)
{
    MarketConfig mk;
    mk.p0 = 1.0;
    mk.c = 2.0;
    mk.delta_p = 0.5;
    mk.m = m;
    mk.T = T;
    return mk;
}

// Consumption path of a history generated by the closed-form response.
std::vector<double> history(const ConsumerPolicy& pol, const PriceSeries& prices, const BaselineRule& rule,
                            const MarketConfig& mk, int upto, std::mt19937_64& rng)
{
    std::normal_distribution<double> eps(0.0, pol.params.noise_sd);
    std::vector<double> q;
    for (int s = 1; s <= upto; ++s)
        q.push_back(consumer_consumption(pol, s, eps(rng), prices, rule, mk));
    return q;
}

} // namespace

TEST(ConsumerConsumption, MyopicIsHypotheticalResponse)
{
    const auto mk = market(50, 3);
    const auto prices = announced_prices({}, mk);
    const ConsumerPolicy pol{ConsumerKind::myopic, 3, {3.0, 2.0, 0.1, 1}};
    for (int t : {1, 2, 10, 50})
        EXPECT_DOUBLE_EQ(consumer_consumption(pol, t, 0.0, prices, LeastSquaresRule{}, mk),
                         1.0 - prices.at(t) / 2.0);
}

TEST(ConsumerConsumption, StrategicInflatesAtDayTen)
{
    const auto mk = market(1000, 3);
    const auto prices = announced_prices({}, mk);
    const ConsumerParams params{3.0, 2.0, 0.1, 1};
    const ConsumerPolicy strategic{ConsumerKind::strategic, 3, params};
    const ConsumerPolicy myopic{ConsumerKind::myopic, 3, params};
    const double qs = consumer_consumption(strategic, 10, 0.0, prices, LeastSquaresRule{}, mk);
    const double qm = consumer_consumption(myopic, 10, 0.0, prices, LeastSquaresRule{}, mk);
    EXPECT_GT(qs, qm);
    EXPECT_DOUBLE_EQ(qs - qm, inflation_term(10, params, prices, 3, 1000));

    std::mt19937_64 rng(10);
    const auto past = history(strategic, prices, LeastSquaresRule{}, mk, 9, rng);
    const auto br = brute_force_best_response(10, params, 0.0, prices.values(), past,
                                              dense_least_squares_baseline(mk.b_init), mk, 3);
    EXPECT_NEAR(br.q_t, qs, 1e-8);
}

TEST(ConsumerConsumption, LastDayHasNoFuture)
{
    const auto mk = market(40, 3);
    const auto prices = announced_prices({}, mk);
    const ConsumerParams params{3.0, 2.0, 0.1, 1};
    EXPECT_EQ(consumer_consumption({ConsumerKind::strategic, 3, params}, 40, 0.2, prices, LeastSquaresRule{}, mk),
              consumer_consumption({ConsumerKind::myopic, 3, params}, 40, 0.2, prices, LeastSquaresRule{}, mk));
}

TEST(ConsumerConsumption, StrategicZeroLookaheadIsMyopicBitwise)
{
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto mk = market(200, 0);
    const auto prices = announced_prices({}, mk);
    for (int k = 0; k < 200; ++k) {
        const ConsumerParams params{1.5 + 3 * u(rng), 0.5 + 3 * u(rng), 0.1, 1};
        const int t = 1 + static_cast<int>(u(rng) * 199);
        const double eps = u(rng) - 0.5;
        EXPECT_EQ(consumer_consumption({ConsumerKind::strategic, 0, params}, t, eps, prices, LeastSquaresRule{}, mk),
                  consumer_consumption({ConsumerKind::myopic, 7, params}, t, eps, prices, LeastSquaresRule{}, mk));
    }
}

TEST(BruteForce, MyopicIsClosedForm)
{
    const auto mk = market(30, 0);
    const auto prices = announced_prices({}, mk);
    const ConsumerParams params{3.0, 2.0, 0.1, 1};
    const std::vector<double> past(4, 1.0);
    const auto br = brute_force_best_response(5, params, 0.3, prices.values(), past, dense_least_squares_baseline(0.0),
                                              mk, 0);
    EXPECT_NEAR(br.q_t, (3.0 + 0.3 - 1.0 - prices.at(5)) / 2.0, 1e-10);
}

TEST(BruteForce, AgreesWithClosedFormAndIsConcave)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const ConsumerParams params{2.0 + 2 * u(rng), 1.0 + 2 * u(rng), 0.1, 1};
        const int T = 20 + static_cast<int>(40 * u(rng));
        const auto mk = market(T, 2);
        const auto prices = announced_prices({}, mk);
        const int t = 1 + static_cast<int>(u(rng) * (T - 1));
        const ConsumerPolicy pol{ConsumerKind::strategic, 2, params};
        const auto past = history(pol, prices, LeastSquaresRule{}, mk, t - 1, rng);
        const double eps = 0.1 * (u(rng) - 0.5);
        const auto br =
            brute_force_best_response(t, params, eps, prices.values(), past, dense_least_squares_baseline(0.0), mk, 2);
        EXPECT_NEAR(br.q_t, consumer_consumption(pol, t, eps, prices, LeastSquaresRule{}, mk), 1e-8) << trial;
        for (double h : br.hessian_diagonal)
            EXPECT_LT(h, 0.0);
        EXPECT_LE(br.gradient_norm, 1e-10);
    }
}

TEST(BruteForce, AgreesUnderAveragingRule)
{
    const int T = 40, n = 12;
    const auto mk = market(T, 3);
    const SoPolicy etc{SoKind::averaging_etc, n};
    const auto prices = announced_prices(etc, mk);
    const BaselineRule rule = baseline_rule(etc, mk);
    const ConsumerParams params{3.0, 2.0, 0.1, 1};
    const ConsumerPolicy pol{ConsumerKind::strategic, 3, params};
    std::mt19937_64 rng(4);
    for (int t : {1, 9, 10, 12, 13, 30}) {
        const auto past = history(pol, prices, rule, mk, t - 1, rng);
        const auto br = brute_force_best_response(t, params, 0.05, prices.values(), past, averaging_baseline(n), mk, 3);
        EXPECT_NEAR(br.q_t, consumer_consumption(pol, t, 0.05, prices, rule, mk), 1e-8) << t;
    }
}

TEST(RuleSensitivity, AveragingAndFixed)
{
    const PriceSeries prices(std::vector<double>(30, 1.0));
    const BaselineRule avg = AveragingRule{10};
    EXPECT_EQ(rule_sensitivity(avg, 8, 2, prices), 0.0);  // baseline for day 10 is not yet fixed
    EXPECT_EQ(rule_sensitivity(avg, 8, 3, prices), 0.1);
    EXPECT_EQ(rule_sensitivity(avg, 10, 1, prices), 0.1);
    EXPECT_EQ(rule_sensitivity(avg, 11, 1, prices), 0.0);
    EXPECT_EQ(rule_sensitivity(FixedRule{}, 5, 1, prices), 0.0);
}

TEST(Inflation, NonnegativeAndVanishingOnSchedule)
{
    const int T = 10000;
    const auto mk = market(T, 3);
    const auto prices = announced_prices({}, mk);
    const auto w = inflation_profile(prices, 3, T);
    double early = 0, late = 0;
    for (int t = 3; t <= T; ++t) {
        const double v = w[static_cast<std::size_t>(t - 1)];
        ASSERT_GE(v, 0.0) << t;
        if (t <= 100)
            early = std::max(early, t * v);
        else
            late = std::max(late, t * v);
    }
    EXPECT_LE(late, early);
    EXPECT_LT(w[0], 0.0); // day 1 carries the largest price, so raising q_1 lowers later fits
}

TEST(SoDecide, OlDrmDayOne)
{
    const auto mk = market(20, 3);
    const auto prices = announced_prices({}, mk);
    const std::vector<ConsumerParams> cs{{3.0, 2.0, 0.1, 1}, {2.5, 1.5, 0.1, 2}};
    auto mk2 = mk;
    mk2.b_init = 0.7;
    const auto dec = so_decide({}, 1, mk2, prices, SoMemory(2), cs);
    EXPECT_EQ(dec.price, 1.0 + 0.5 * std::exp(-1.0));
    EXPECT_EQ(dec.baselines, (std::vector<double>{0.7, 0.7}));
    EXPECT_TRUE(dec.dr_event);
}

TEST(SoDecide, OlDrmPricesIgnoreHistory)
{
    const auto mk = market(20, 3);
    const auto prices = announced_prices({}, mk);
    const std::vector<ConsumerParams> cs{{3.0, 2.0, 0.1, 1}};
    SoMemory a(1), b(1);
    for (int t = 1; t <= 6; ++t) {
        const std::vector<double> qa{1.0 + 0.1 * t}, qb{-3.0 * t};
        so_record({}, t, mk, a, prices.at(t), qa);
        so_record({}, t, mk, b, prices.at(t), qb);
    }
    EXPECT_EQ(so_decide({}, 7, mk, prices, a, cs).price, so_decide({}, 7, mk, prices, b, cs).price);
}

TEST(SoDecide, ExploreDayIsNoEvent)
{
    SimulationConfig cfg;
    cfg.market = market(30, 3);
    cfg.consumers = {{3.0, 2.0, 0.1, 1}};
    cfg.consumer_policy = ConsumerKind::myopic;
    cfg.so_policy = {SoKind::averaging_etc, 10};
    const auto tr = run(cfg, 0);
    const auto& day5 = tr.days[4];
    EXPECT_EQ(day5.price, 0.0);
    EXPECT_EQ(day5.baselines[0], 0.0);
    EXPECT_EQ(day5.dr_payments[0], 0.0);
    EXPECT_DOUBLE_EQ(day5.consumptions[0], 1.0 + day5.shocks[0] / 2.0);
}

TEST(SoDecide, CommitPhaseUsesNoiselessMean)
{
    SimulationConfig cfg;
    cfg.market = market(30, 3);
    cfg.consumers = {{3.0, 2.0, 0.0, 1}, {2.5, 1.5, 0.0, 2}};
    cfg.market.n_consumers = 2;
    cfg.consumer_policy = ConsumerKind::myopic;
    cfg.so_policy = {SoKind::averaging_etc, 10};
    const auto tr = run(cfg, 0);
    const auto& day11 = tr.days[10];
    EXPECT_EQ(day11.price, 1.0);
    EXPECT_NEAR(day11.baselines[0], 1.0, 1e-15);
    EXPECT_NEAR(day11.baselines[1], 1.0, 1e-15);
}

TEST(ExploreDays, DefaultsAndRange)
{
    EXPECT_EQ(explore_days(1000, 2.0 / 3.0), 100);
    EXPECT_EQ(explore_days(4000, 2.0 / 3.0), 252);
    EXPECT_EQ(explore_days(2, 2.0 / 3.0), 1);
    EXPECT_EQ(resolved_explore_days({SoKind::averaging_etc, 0}, 1000), 100);
    EXPECT_EQ(resolved_explore_days({SoKind::averaging_etc, 7}, 1000), 7);
    EXPECT_THROW(resolved_explore_days({SoKind::averaging_etc, 1000}, 1000), InvalidConfig);
}
