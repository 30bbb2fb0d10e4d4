#pragma once

#include "drm/compensated.hpp"
#include "drm/core_model.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace drm {

/// Announced DR prices with prefix sums of p and p^2. Days are 1-based.
class PriceSeries {
public:
    PriceSeries() = default;
    explicit PriceSeries(std::span<const double> prices);

    void push_back(double price);

    int size() const { return static_cast<int>(prices_.size()); }
    /// Price on day t, 1 <= t <= size().
    double at(int t) const { return prices_[static_cast<std::size_t>(t - 1)]; }
    std::span<const double> values() const { return prices_; }

    /// sum_{s <= n} p_s and sum_{s <= n} p_s^2; n = 0 gives zero.
    const Compensated& sum(int n) const { return sum_[static_cast<std::size_t>(n)]; }
    const Compensated& sum_sq(int n) const { return sum_sq_[static_cast<std::size_t>(n)]; }

private:
    std::vector<double> prices_;
    std::vector<Compensated> sum_{Compensated{}};
    std::vector<Compensated> sum_sq_{Compensated{}};
};

/// The OL-DRM price sequence p_t = p* + delta_p e^{-t} over a horizon, together
/// with the constants that generated it (the upfront payment needs both).
struct PriceSchedule {
    double p_star = 0.0;
    double delta_p = 0.0;
    PriceSeries prices;

    int horizon() const { return prices.size(); }
};

PriceSchedule make_price_schedule(double p_star, double delta_p, int T);

/// Intercept and slope of the fitted model q = b_hat - b1_hat * p.
struct BaselineEstimate {
    double b_hat = 0.0;
    double b1_hat = 0.0;
};

/// Running sufficient statistics for the per-consumer least-squares baseline
/// fit. Price sums are shared by all consumers; consumption sums are not.
class EstimatorState {
public:
    EstimatorState() = default;
    explicit EstimatorState(std::size_t n_consumers)
        : sum_q_(n_consumers), sum_pq_(n_consumers) {}

    /// Records one day. q holds every consumer's consumption.
    void observe(double price, std::span<const double> q);

    int n_days() const { return n_days_; }
    std::size_t n_consumers() const { return sum_q_.size(); }

    const Compensated& sum_p() const { return sum_p_; }
    const Compensated& sum_p2() const { return sum_p2_; }
    const Compensated& sum_q(std::size_t consumer) const { return sum_q_.at(consumer); }
    const Compensated& sum_pq(std::size_t consumer) const { return sum_pq_.at(consumer); }

    /// n * sum(p^2) - (sum p)^2, the determinant of the normal equations.
    Compensated determinant() const;

    friend bool operator==(const EstimatorState&, const EstimatorState&) = default;

private:
    int n_days_ = 0;
    Compensated sum_p_;
    Compensated sum_p2_;
    std::vector<Compensated> sum_q_;
    std::vector<Compensated> sum_pq_;
};

/// Value-semantics form of EstimatorState::observe.
EstimatorState update(EstimatorState state, double price, std::span<const double> q);

/// Closed-form least-squares fit for one consumer (0-based index).
/// Throws SingularDesign with fewer than two days or no price spread.
BaselineEstimate ls_estimate(const EstimatorState& state, std::size_t consumer);

/// d b_hat_{t+j} / d q_t, the weight of day t's consumption in the baseline
/// fitted from days 1..t+j-1. Requires t + j - 1 >= 2.
double baseline_sensitivity(int t, int j, const PriceSeries& prices);

/// Days 1 and 2 carry the initial baseline; the fitted baseline starts on
/// day 3. A baseline for `day` therefore reacts to consumption only from 3 on.
inline constexpr int first_fitted_day = 3;

/// Price-weighted sum of future baseline sensitivities,
/// sum_{j=1..min(m, T-t)} p_{t+j} * d b_hat_{t+j} / d q_t, without the 1/d factor.
/// Baselines that are not fitted (day <= 2) contribute nothing.
double inflation_weight(int t, const PriceSeries& prices, int m, int T);

/// inflation_weight for every day 1..T; entry [t-1] is day t.
std::vector<double> inflation_profile(const PriceSeries& prices, int m, int T);

/// Strategic consumption inflation of a consumer on day t.
double inflation_term(int t, const ConsumerParams& params, const PriceSeries& prices, int m, int T);

/// Baseline correction
///   delta_b_t = sum_{k<=t} p* dp e^{-k} Dt_k / sum_{k<=t} (p_k - mean_t p)^2,
/// summing over the first t days. Requires t >= 2 and t <= horizon.
double delta_b(int t, const ConsumerParams& params, const PriceSchedule& schedule, int m);

/// delta_b for every day 1..T without the 1/d factor; entry [t-1] is day t
/// and entry [0] is 0 (undefined for a single observation).
std::vector<double> delta_b_profile(const PriceSchedule& schedule, int m);

/// Upfront participation payment sum_{t=2..T} p_t delta_b_t. The t = 1 term
/// has no least-squares denominator and is skipped.
double upfront_payment(const ConsumerParams& params, const PriceSchedule& schedule, int m);

/// (p_{t+1} / d) (sum_{s<=t} p_s^2 - p_{t-k} sum_{s<=t} p_s) / D(t); the
/// quantity bounded as O((p* + dp) / t) in the regret analysis.
double delta_tk_diagnostic(int t, int k, const PriceSeries& prices, double d);

} // namespace drm
