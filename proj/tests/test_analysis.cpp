#include "drm/analysis.hpp"
#include "drm/config_io.hpp"
#include "drm/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace drm;

namespace {

std::vector<CurvePoint> curve(double (*f)(double))
{
    std::vector<CurvePoint> out;
    for (double t = 10; t <= 20000; t *= 1.25)
        out.push_back({t, f(t)});
    return out;
}

} // namespace

TEST(FitGrowth, RecoversLogSquared)
{
    const auto c = curve([](double t) { return 3 * std::log(t) * std::log(t); });
    const auto fit = fit_growth(c);
    EXPECT_NEAR(fit.c2, 3.0, 1e-6);
    EXPECT_NEAR(fit.c0, 0.0, 1e-6);
    EXPECT_NEAR(fit.r2_log2, 1.0, 1e-12);
    EXPECT_LT(fit.r2_power, fit.r2_log2);
}

TEST(FitGrowth, RecoversPowerLaw)
{
    const auto c = curve([](double t) { return std::cbrt(t); });
    const auto fit = fit_growth(c);
    EXPECT_NEAR(fit.alpha, 1.0 / 3.0, 1e-6);
    EXPECT_NEAR(fit.beta, 0.0, 1e-6);
}

TEST(FitGrowth, ScaleEquivariant)
{
    auto c = curve([](double t) { return 2 + std::log(t) * std::log(t) + 0.1 * std::sqrt(t); });
    const auto base = fit_growth(c);
    for (auto& p : c)
        p.value *= 7.5;
    const auto scaled = fit_growth(c);
    EXPECT_NEAR(scaled.c2, 7.5 * base.c2, 1e-9 * std::abs(7.5 * base.c2));
    EXPECT_NEAR(scaled.alpha, base.alpha, 1e-9);
}

TEST(FitGrowth, InsufficientData)
{
    std::vector<CurvePoint> c{{100, 1}, {200, 2}, {300, 3}};
    EXPECT_THROW(fit_growth(c), InsufficientData);
    // Non-positive values drop out of the power-law fit only.
    std::vector<CurvePoint> d;
    for (int k = 0; k < 8; ++k)
        d.push_back({100.0 * (k + 1), k < 4 ? -1.0 : 1.0 + k});
    EXPECT_THROW(fit_growth(d), InsufficientData);
    // Points below t_min are ignored.
    std::vector<CurvePoint> e;
    for (int k = 1; k <= 20; ++k)
        e.push_back({static_cast<double>(k), static_cast<double>(k)});
    EXPECT_THROW(fit_growth(e), InsufficientData);
    EXPECT_NO_THROW(fit_growth(e, 1.0));
}

TEST(ParsePolicy, Names)
{
    for (const auto& n : policy_names())
        EXPECT_TRUE(parse_policy(n).has_value()) << n;
    EXPECT_FALSE(parse_policy("ucb").has_value());
    EXPECT_EQ(parse_policy("averaging-etc")->kind, SoKind::averaging_etc);
}

TEST(ComparePolicies, IdenticalPolicyTwiceGivesIdenticalColumns)
{
    auto cfg = standard_config(100);
    cfg.n_replications = 10;
    const std::vector<PolicySpec> specs{*parse_policy("ol-drm"), *parse_policy("ol-drm")};
    const std::vector<int> grid{100, 300};
    const auto table = compare_policies(cfg, specs, grid, 2);
    EXPECT_EQ(table.policies[0].mean_regret, table.policies[1].mean_regret);
    EXPECT_EQ(table.policies[0].replication_regret, table.policies[1].replication_regret);
    EXPECT_EQ(table.pairs[0].paired_sd, 0.0);
}

TEST(ComparePolicies, SinglePointGridHasNoFit)
{
    auto cfg = standard_config(100);
    cfg.n_replications = 5;
    const std::vector<PolicySpec> specs{*parse_policy("ol-drm"), *parse_policy("averaging-etc")};
    const std::vector<int> grid{200};
    const auto table = compare_policies(cfg, specs, grid);
    ASSERT_EQ(table.policies.size(), 2u);
    EXPECT_FALSE(table.policies[0].fit.has_value());
    EXPECT_FALSE(table.policies[1].fit.has_value());
    EXPECT_EQ(table.policies[0].mean_regret.size(), 1u);
}

TEST(ComparePolicies, CommonRandomNumbersReduceVariance)
{
    auto cfg = standard_config(1000);
    cfg.n_replications = 200;
    const std::vector<PolicySpec> specs{*parse_policy("averaging-etc"), *parse_policy("averaging-etc-sqrt")};
    const std::vector<int> grid{1000};
    const auto table = compare_policies(cfg, specs, grid, 2);
    EXPECT_LT(table.pairs[0].paired_sd, table.pairs[0].unpaired_sd);
}

TEST(ComparePolicies, EmptyInputsRejected)
{
    auto cfg = standard_config(100);
    const std::vector<PolicySpec> specs{*parse_policy("ol-drm")};
    EXPECT_THROW(compare_policies(cfg, specs, std::vector<int>{}), InvalidConfig);
    EXPECT_THROW(compare_policies(cfg, std::vector<PolicySpec>{}, std::vector<int>{100}), InvalidConfig);
}
