#include "drm/core_model.hpp"

#include "drm/errors.hpp"

#include <cmath>
#include <string>

namespace drm {

double optimal_price(double c)
{
    if (!(c > 0.0))
        throw InvalidConfig("market.c", "procurement cost must be > 0");
    return c / 2.0;
}

double price_schedule(int t, double p_star, double delta_p)
{
    return p_star + delta_p * std::exp(-static_cast<double>(t));
}

double correct_baseline(const ConsumerParams& params, double p0)
{
    if (!(params.d > 0.0))
        throw InvalidConfig("d", "utility curvature must be > 0");
    return (params.a - p0) / params.d;
}

double hypothetical_consumption(const ConsumerParams& params, double p0, double p, double eps)
{
    if (!(params.d > 0.0))
        throw InvalidConfig("d", "utility curvature must be > 0");
    return (params.a + eps - p0 - p) / params.d;
}

double so_day_cost(double c, double p, double total_baseline, double total_consumption)
{
    return c * total_consumption + p * (total_baseline - total_consumption);
}

double optimal_expected_cost(const MarketConfig& config, std::span<const ConsumerParams> consumers,
                             double p_star)
{
    double consumption = 0.0;
    double baseline = 0.0;
    for (const auto& params : consumers) {
        const double b = correct_baseline(params, config.p0);
        baseline += b;
        consumption += b - p_star / params.d;
    }
    return so_day_cost(config.c, p_star, baseline, consumption);
}

double optimal_expected_cost(const MarketConfig& config, std::span<const ConsumerParams> consumers)
{
    return optimal_expected_cost(config, consumers, optimal_price(config.c));
}

double no_dr_utility(const ConsumerParams& params, double p0)
{
    const double b = correct_baseline(params, p0);
    const double var = params.noise_sd * params.noise_sd;
    return params.a * b - params.d * b * b / 2.0 - p0 * b + var / (2.0 * params.d);
}

double utility(const ConsumerParams& params, double q, double eps)
{
    return (params.a + eps) * q - params.d * q * q / 2.0;
}

double aggregate_inverse_curvature(std::span<const ConsumerParams> consumers)
{
    double h = 0.0;
    for (const auto& params : consumers)
        h += 1.0 / params.d;
    return h;
}

void validate(const ConsumerParams& params, double p0, int index)
{
    const std::string prefix = "consumers[" + std::to_string(index) + "].";
    if (!std::isfinite(params.d) || !(params.d > 0.0))
        throw InvalidConfig(prefix + "d", "utility curvature d must be > 0");
    if (!std::isfinite(params.a) || !(params.a > p0))
        throw InvalidConfig(prefix + "a", "utility slope a must exceed the retail price p0");
    if (!std::isfinite(params.noise_sd) || params.noise_sd < 0.0)
        throw InvalidConfig(prefix + "noise_sd", "shock standard deviation must be >= 0");
}

void validate(const MarketConfig& config)
{
    if (!std::isfinite(config.p0) || config.p0 < 0.0)
        throw InvalidConfig("market.p0", "retail price must be >= 0");
    if (!std::isfinite(config.c) || !(config.c > 0.0))
        throw InvalidConfig("market.c", "procurement cost must be > 0");
    // delta_p == 0 is accepted here; the estimator reports it as a singular design.
    if (!std::isfinite(config.delta_p) || config.delta_p < 0.0)
        throw InvalidConfig("market.delta_p", "price perturbation must be >= 0");
    if (config.m < 0)
        throw InvalidConfig("market.m", "lookahead must be >= 0");
    if (config.T < 1)
        throw InvalidConfig("market.T", "horizon must be >= 1");
    if (config.n_consumers < 1)
        throw InvalidConfig("market.n_consumers", "need at least one consumer");
    if (!std::isfinite(config.b_init))
        throw InvalidConfig("market.b_init", "initial baseline must be finite");
}

} // namespace drm
