#include "drm/agents.hpp"

#include "drm/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace drm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

} // namespace

double rule_sensitivity(const BaselineRule& rule, int t, int j, const PriceSeries& prices)
{
    return std::visit(
        overloaded{
            [&](const LeastSquaresRule&) {
                return t + j >= first_fitted_day ? baseline_sensitivity(t, j, prices) : 0.0;
            },
            [&](const AveragingRule& r) {
                return (t <= r.n_explore && t + j > r.n_explore) ? 1.0 / r.n_explore : 0.0;
            },
            [](const FixedRule&) { return 0.0; },
        },
        rule);
}

double rule_inflation_weight(const BaselineRule& rule, int t, const PriceSeries& prices, int m, int T)
{
    if (std::holds_alternative<LeastSquaresRule>(rule))
        return inflation_weight(t, prices, m, T);
    double w = 0.0;
    const int last = std::min(m, T - t);
    for (int j = 1; j <= last; ++j)
        w += prices.at(t + j) * rule_sensitivity(rule, t, j, prices);
    return w;
}

std::vector<double> rule_inflation_profile(const BaselineRule& rule, const PriceSeries& prices, int m, int T)
{
    std::vector<double> out(static_cast<std::size_t>(T));
    for (int t = 1; t <= T; ++t)
        out[static_cast<std::size_t>(t - 1)] = rule_inflation_weight(rule, t, prices, m, T);
    return out;
}

double consumer_consumption(const ConsumerPolicy& policy, int t, double eps, const PriceSeries& prices,
                            const BaselineRule& rule, const MarketConfig& market)
{
    const double base = hypothetical_consumption(policy.params, market.p0, prices.at(t), eps);
    const double inflation = rule_inflation_weight(rule, t, prices, policy.lookahead(), market.T) / policy.params.d;
    double q = base + inflation;
    if (market.clamp_nonneg)
        q = std::max(q, 0.0);
    return q;
}

std::string to_string(SoKind kind)
{
    return kind == SoKind::ol_drm ? "ol-drm" : "averaging-etc";
}

int explore_days(int T, double exponent)
{
    // The epsilon keeps exact powers (1000^(2/3) = 100) from rounding up.
    const double raw = std::pow(static_cast<double>(T), exponent);
    const int n = static_cast<int>(std::ceil(raw - 1e-9));
    return std::clamp(n, 1, std::max(1, T - 1));
}

int resolved_explore_days(const SoPolicy& policy, int T)
{
    const int n = policy.n_explore > 0 ? policy.n_explore : explore_days(T, 2.0 / 3.0);
    if (n < 1 || n > T - 1)
        throw InvalidConfig("so_policy.n_explore", "exploration days must lie in [1, T-1]");
    return n;
}

SoMemory::SoMemory(std::size_t n_consumers) : estimator(n_consumers), explore_sum(n_consumers) {}

PriceSeries announced_prices(const SoPolicy& policy, const MarketConfig& market, const Counterfactual& cf)
{
    const double p_star = optimal_price(market.c);
    PriceSeries prices;
    if (cf.fixed_price) {
        for (int t = 1; t <= market.T; ++t)
            prices.push_back(*cf.fixed_price);
        return prices;
    }
    if (policy.kind == SoKind::ol_drm)
        return make_price_schedule(p_star, market.delta_p, market.T).prices;
    const int n = resolved_explore_days(policy, market.T);
    for (int t = 1; t <= market.T; ++t)
        prices.push_back(t <= n ? 0.0 : p_star);
    return prices;
}

BaselineRule baseline_rule(const SoPolicy& policy, const MarketConfig& market, const Counterfactual& cf)
{
    if (cf.oracle_baselines)
        return FixedRule{};
    if (policy.kind == SoKind::ol_drm)
        return LeastSquaresRule{};
    return AveragingRule{resolved_explore_days(policy, market.T)};
}

SoDecision so_decide(const SoPolicy& policy, int t, const MarketConfig& market, const PriceSeries& announced,
                     const SoMemory& memory, std::span<const ConsumerParams> consumers, const Counterfactual& cf)
{
    if (t < 1 || t > market.T)
        throw std::out_of_range("so_decide: day outside the program");
    SoDecision decision;
    decision.price = announced.at(t);
    decision.baselines.resize(consumers.size());

    if (policy.kind == SoKind::averaging_etc && t <= resolved_explore_days(policy, market.T)) {
        // No event: nothing is paid, so the baseline is immaterial.
        decision.dr_event = false;
        if (!cf.fixed_price)
            decision.price = 0.0;
        std::fill(decision.baselines.begin(), decision.baselines.end(), 0.0);
        return decision;
    }

    for (std::size_t i = 0; i < consumers.size(); ++i) {
        if (cf.oracle_baselines) {
            decision.baselines[i] = correct_baseline(consumers[i], market.p0);
        } else if (policy.kind == SoKind::ol_drm) {
            decision.baselines[i] =
                t < first_fitted_day ? market.b_init : ls_estimate(memory.estimator, i).b_hat;
        } else {
            decision.baselines[i] = memory.explore_sum[i].value() / memory.explore_days;
        }
    }
    return decision;
}

void so_record(const SoPolicy& policy, int t, const MarketConfig& market, SoMemory& memory, double price,
               std::span<const double> consumption)
{
    memory.estimator.observe(price, consumption);
    if (policy.kind == SoKind::averaging_etc && t <= resolved_explore_days(policy, market.T)) {
        for (std::size_t i = 0; i < consumption.size(); ++i)
            memory.explore_sum[i] += consumption[i];
        ++memory.explore_days;
    }
}

BaselineFunction dense_least_squares_baseline(double b_init)
{
    return [b_init](int day, std::span<const double> prices, std::span<const double> consumption) {
        if (day < first_fitted_day)
            return b_init;
        const auto n = static_cast<Eigen::Index>(day - 1);
        Eigen::MatrixXd design(n, 2);
        Eigen::VectorXd rhs(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            design(k, 0) = 1.0;
            design(k, 1) = -prices[static_cast<std::size_t>(k)];
            rhs(k) = consumption[static_cast<std::size_t>(k)];
        }
        const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(rhs);
        return coef(0);
    };
}

BaselineFunction averaging_baseline(int n_explore)
{
    return [n_explore](int day, std::span<const double>, std::span<const double> consumption) {
        if (day <= n_explore)
            return 0.0;
        double s = 0.0;
        for (int k = 0; k < n_explore; ++k)
            s += consumption[static_cast<std::size_t>(k)];
        return s / n_explore;
    };
}

BaselineFunction fixed_baseline(double value)
{
    return [value](int, std::span<const double>, std::span<const double>) { return value; };
}

BestResponse brute_force_best_response(int t, const ConsumerParams& params, double eps_t,
                                       std::span<const double> prices, std::span<const double> past,
                                       const BaselineFunction& baseline, const MarketConfig& market, int m)
{
    if (static_cast<int>(past.size()) != t - 1)
        throw std::invalid_argument("brute_force_best_response: past must hold days 1..t-1");
    const int last = std::min(t + m, market.T);
    const auto width = static_cast<std::size_t>(last - t + 1);

    std::vector<double> history(past.begin(), past.end());
    history.resize(static_cast<std::size_t>(last));

    auto objective = [&](const std::vector<double>& window) {
        std::copy(window.begin(), window.end(), history.begin() + (t - 1));
        double j = 0.0;
        for (int s = t; s <= last; ++s) {
            const double q = window[static_cast<std::size_t>(s - t)];
            const double eps = s == t ? eps_t : 0.0;
            const double p = prices[static_cast<std::size_t>(s - 1)];
            const double b = baseline(s, prices, std::span<const double>(history).first(static_cast<std::size_t>(s - 1)));
            j += (params.a + eps - market.p0) * q - params.d * q * q / 2.0 + p * (b - q);
        }
        return j;
    };

    // The objective is quadratic, so central differences are exact up to
    // rounding for any step; a moderate step keeps rounding noise small.
    constexpr double h = 1e-2;
    constexpr double tolerance = 1e-10;
    constexpr int max_updates = 100000;

    std::vector<double> window(width, 0.0);
    for (std::size_t k = 0; k < width; ++k)
        window[k] = (params.a - market.p0) / params.d;

    auto derivatives = [&](std::size_t k) {
        std::vector<double> probe = window;
        const double centre = objective(probe);
        probe[k] = window[k] + h;
        const double up = objective(probe);
        probe[k] = window[k] - h;
        const double down = objective(probe);
        return std::pair{(up - down) / (2.0 * h), (up - 2.0 * centre + down) / (h * h)};
    };

    BestResponse result;
    while (true) {
        double norm = 0.0;
        for (std::size_t k = 0; k < width; ++k)
            norm = std::max(norm, std::abs(derivatives(k).first));
        result.gradient_norm = norm;
        if (norm <= tolerance)
            break;
        for (std::size_t k = 0; k < width; ++k) {
            if (++result.updates > max_updates)
                throw OracleFailure("best-response coordinate ascent did not converge");
            const auto [g, curvature] = derivatives(k);
            if (!(curvature < 0.0))
                throw OracleFailure("best-response objective is not concave along a coordinate");
            window[k] -= g / curvature;
        }
    }

    result.hessian_diagonal.resize(width);
    for (std::size_t k = 0; k < width; ++k)
        result.hessian_diagonal[k] = derivatives(k).second;
    result.q_t = window.front();
    result.window = std::move(window);
    return result;
}

} // namespace drm
