#include "drm/analysis.hpp"

#include "drm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace drm {

namespace {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y)
{
    const auto n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
        syy += (y[k] - my) * (y[k] - my);
    }
    if (!(sxx > 0.0))
        throw InsufficientData("growth fit needs at least two distinct t values");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double r = y[k] - (fit.intercept + fit.slope * x[k]);
        ss_res += r * r;
    }
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

double sample_variance(std::span<const double> xs)
{
    if (xs.size() < 2)
        return 0.0;
    const double mu = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs)
        ss += (x - mu) * (x - mu);
    return ss / static_cast<double>(xs.size() - 1);
}

} // namespace

GrowthFit fit_growth(std::span<const CurvePoint> curve, double t_min)
{
    std::vector<double> log2_x, log2_y, log_x, log_y;
    for (const auto& pt : curve) {
        if (!(pt.t >= t_min) || !(pt.t > 0.0) || !std::isfinite(pt.value))
            continue;
        const double lt = std::log(pt.t);
        log2_x.push_back(lt * lt);
        log2_y.push_back(pt.value);
        if (pt.value > 0.0) {
            log_x.push_back(lt);
            log_y.push_back(std::log(pt.value));
        }
    }
    if (static_cast<int>(log2_x.size()) < min_fit_points)
        throw InsufficientData("growth fit needs at least 5 points with t >= t_min");
    if (static_cast<int>(log_x.size()) < min_fit_points)
        throw InsufficientData("power-law fit needs at least 5 positive points with t >= t_min");

    const LineFit quad = fit_line(log2_x, log2_y);
    const LineFit power = fit_line(log_x, log_y);
    GrowthFit fit;
    fit.c2 = quad.slope;
    fit.c0 = quad.intercept;
    fit.r2_log2 = quad.r2;
    fit.alpha = power.slope;
    fit.beta = power.intercept;
    fit.r2_power = power.r2;
    fit.points_log2 = static_cast<int>(log2_x.size());
    fit.points_power = static_cast<int>(log_x.size());
    return fit;
}

std::vector<std::string> policy_names()
{
    return {"ol-drm", "averaging-etc", "averaging-etc-sqrt", "averaging-etc-cbrt"};
}

std::optional<PolicySpec> parse_policy(const std::string& name)
{
    if (name == "ol-drm")
        return PolicySpec{name, SoKind::ol_drm, 0.0};
    if (name == "averaging-etc")
        return PolicySpec{name, SoKind::averaging_etc, 2.0 / 3.0};
    if (name == "averaging-etc-sqrt")
        return PolicySpec{name, SoKind::averaging_etc, 1.0 / 2.0};
    if (name == "averaging-etc-cbrt")
        return PolicySpec{name, SoKind::averaging_etc, 1.0 / 3.0};
    return std::nullopt;
}

ComparisonTable compare_policies(const SimulationConfig& config, std::span<const PolicySpec> policies,
                                 std::span<const int> t_grid, unsigned threads, double t_min)
{
    if (policies.empty())
        throw InvalidConfig("policies", "need at least one policy");
    if (t_grid.empty())
        throw InvalidConfig("t_grid", "need at least one horizon");

    ComparisonTable table;
    table.t_grid.assign(t_grid.begin(), t_grid.end());
    for (const PolicySpec& spec : policies) {
        PolicyResult result;
        result.policy = spec.name;
        for (int T : t_grid) {
            SimulationConfig run_config = config;
            run_config.market.T = T;
            run_config.so_policy.kind = spec.kind;
            run_config.so_policy.n_explore =
                spec.kind == SoKind::averaging_etc ? explore_days(T, spec.explore_exponent) : 0;
            const Ensemble ensemble = run_ensemble(run_config, threads);
            const RegretReport report = regret(ensemble, run_config);
            result.mean_regret.push_back(report.cumulative_regret.back());
            result.standard_error.push_back(report.regret_standard_error);
            result.replication_regret.push_back(replication_regret(ensemble));
        }
        std::vector<CurvePoint> curve;
        for (std::size_t k = 0; k < t_grid.size(); ++k)
            curve.push_back({static_cast<double>(t_grid[k]), result.mean_regret[k]});
        try {
            result.fit = fit_growth(curve, t_min);
        } catch (const InsufficientData&) {
            result.fit.reset();
        }
        table.policies.push_back(std::move(result));
    }

    const PolicyResult& base = table.policies.front();
    for (std::size_t p = 1; p < table.policies.size(); ++p) {
        const PolicyResult& other = table.policies[p];
        PairedStats stats;
        stats.baseline = base.policy;
        stats.other = other.policy;
        const auto& a = base.replication_regret.back();
        const auto& b = other.replication_regret.back();
        std::vector<double> diff(a.size());
        int wins = 0;
        for (std::size_t r = 0; r < a.size(); ++r) {
            diff[r] = a[r] - b[r];
            wins += a[r] < b[r] ? 1 : 0;
        }
        stats.fraction_baseline_better = static_cast<double>(wins) / static_cast<double>(a.size());
        stats.paired_sd = std::sqrt(sample_variance(diff));
        stats.unpaired_sd = std::sqrt(sample_variance(a) + sample_variance(b));
        for (std::size_t k = t_grid.size(); k-- > 0;) {
            if (!(base.mean_regret[k] < other.mean_regret[k]))
                break;
            stats.crossover_T = t_grid[k];
        }
        table.pairs.push_back(stats);
    }
    return table;
}

std::vector<CurvePoint> regret_curve(const ComparisonTable& table, std::size_t policy)
{
    std::vector<CurvePoint> curve;
    const PolicyResult& result = table.policies.at(policy);
    for (std::size_t k = 0; k < table.t_grid.size(); ++k)
        curve.push_back({static_cast<double>(table.t_grid[k]), result.mean_regret[k]});
    return curve;
}

} // namespace drm
