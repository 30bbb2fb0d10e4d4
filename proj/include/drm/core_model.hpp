#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace drm {

/// Private quadratic-utility parameters of one consumer.
///
/// Daily utility is (a + eps) q - d q^2 / 2 with eps ~ N(0, noise_sd^2),
/// independent across consumers and days.
struct ConsumerParams {
    double a = 0.0;        // utility slope, value/kWh
    double d = 1.0;        // utility curvature, value/kWh^2
    double noise_sd = 0.0; // standard deviation of the daily shock
    int id = 1;            // 1-based consumer index
};

/// Constants the system operator (SO) works with.
struct MarketConfig {
    double p0 = 1.0;      // retail price
    double c = 2.0;       // unit procurement cost
    double delta_p = 0.5; // amplitude of the decaying price perturbation
    int m = 0;            // consumer lookahead, days
    int T = 1;            // program length, days
    int n_consumers = 1;
    double b_init = 0.0;  // baseline assigned before the estimator has two observations
    bool clamp_nonneg = false; // exploratory only: clip consumption at zero
};

/// Everything that happened on one day of the program, for every consumer.
struct DayRecord {
    int t = 0;
    double price = 0.0;
    std::vector<double> baselines;
    std::vector<double> consumptions;
    std::vector<double> shocks;
    std::vector<double> inflation; // strategic inflation term applied by each consumer
    std::vector<double> dr_payments;
    std::vector<double> consumer_net_utilities;
    double realized_cost = 0.0;
    double conditional_expected_cost = 0.0;
};

/// Regret over a horizon, its four-way breakdown and the individual
/// rationality (IR) ledger.
struct RegretReport {
    int T = 0;
    int n_replications = 0;
    double optimal_cost = 0.0;            // per-day optimal expected cost
    std::vector<double> cumulative_regret; // R_t, t = 1..T; upfront payments charged at t = 1

    struct Decomposition {
        std::vector<double> inflation;   // (c - p_t) * aggregate inflation, per day
        std::vector<double> exploration; // (p_t - p*)^2 * sum_i 1/d_i, per day
        std::vector<double> baseline_error; // p_t * E[b_hat_t - b_tilde], per day
        double upfront = 0.0;            // total upfront payment
        double inflation_total = 0.0;
        double exploration_total = 0.0;
        double baseline_error_total = 0.0;
        double sum() const { return inflation_total + exploration_total + baseline_error_total + upfront; }
    } decomposition;

    std::vector<double> ir_ledger;        // per consumer: E[sum U_t] + P_o - T U*
    std::vector<double> upfront_payments; // per consumer
    double regret_standard_error = 0.0;

    // Filled by analysis when a growth fit is available.
    bool fit_available = false;
    double fitted_log2_coeff = 0.0;
    double fitted_power_exponent = 0.0;
};

/// Minimizer of the SO's expected daily cost when baselines are correct.
double optimal_price(double c);

/// p_t = p_star + delta_p * exp(-t).
double price_schedule(int t, double p_star, double delta_p);

/// Expected consumption when no DR event is called: (a - p0) / d.
double correct_baseline(const ConsumerParams& params, double p0);

/// Consumption maximizing net utility when baselines ignore behaviour.
double hypothetical_consumption(const ConsumerParams& params, double p0, double p, double eps);

/// Purchase cost plus DR payments: c q + p (b_hat - q), aggregate quantities.
double so_day_cost(double c, double p, double total_baseline, double total_consumption);

/// SO's expected daily cost with correct baselines at the optimal price.
double optimal_expected_cost(const MarketConfig& config, std::span<const ConsumerParams> consumers);

/// Same, with an explicit reference price instead of c/2.
double optimal_expected_cost(const MarketConfig& config, std::span<const ConsumerParams> consumers,
                             double p_star);

/// Expected daily net utility of a consumer who stays out of the program.
double no_dr_utility(const ConsumerParams& params, double p0);

/// Realized quadratic utility u(q, eps), before retail price and payments.
double utility(const ConsumerParams& params, double q, double eps);

/// sum_i 1/d_i, the aggregate price sensitivity of the population.
double aggregate_inverse_curvature(std::span<const ConsumerParams> consumers);

void validate(const ConsumerParams& params, double p0, int index);
void validate(const MarketConfig& config);

} // namespace drm
