#include "drm/estimator.hpp"

#include "drm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace drm {

namespace {

constexpr double singular_floor = 1e-12;

// n * S_p2 - S_p^2 for the first n days, checked against the numeric floor.
Compensated checked_determinant(int n, const Compensated& sum_p, const Compensated& sum_p2)
{
    if (n < 2)
        throw SingularDesign("least-squares baseline needs at least two observed days");
    const Compensated det = sum_p2 * static_cast<double>(n) - sum_p * sum_p;
    if (!(det.value() > singular_floor * static_cast<double>(n) * sum_p2.value()))
        throw SingularDesign("price history has no spread; price perturbation delta_p must be > 0");
    return det;
}

} // namespace

PriceSeries::PriceSeries(std::span<const double> prices)
{
    prices_.reserve(prices.size());
    sum_.reserve(prices.size() + 1);
    sum_sq_.reserve(prices.size() + 1);
    for (double p : prices)
        push_back(p);
}

void PriceSeries::push_back(double price)
{
    prices_.push_back(price);
    Compensated s = sum_.back();
    s += price;
    Compensated s2 = sum_sq_.back();
    s2.add_product(price, price);
    sum_.push_back(s);
    sum_sq_.push_back(s2);
}

PriceSchedule make_price_schedule(double p_star, double delta_p, int T)
{
    PriceSchedule schedule{p_star, delta_p, {}};
    for (int t = 1; t <= T; ++t)
        schedule.prices.push_back(price_schedule(t, p_star, delta_p));
    return schedule;
}

void EstimatorState::observe(double price, std::span<const double> q)
{
    if (q.size() != sum_q_.size())
        throw std::invalid_argument("consumption vector size does not match estimator");
    ++n_days_;
    sum_p_ += price;
    sum_p2_.add_product(price, price);
    for (std::size_t i = 0; i < q.size(); ++i) {
        sum_q_[i] += q[i];
        sum_pq_[i].add_product(price, q[i]);
    }
}

Compensated EstimatorState::determinant() const
{
    return sum_p2_ * static_cast<double>(n_days_) - sum_p_ * sum_p_;
}

EstimatorState update(EstimatorState state, double price, std::span<const double> q)
{
    state.observe(price, q);
    return state;
}

BaselineEstimate ls_estimate(const EstimatorState& state, std::size_t consumer)
{
    const Compensated det = checked_determinant(state.n_days(), state.sum_p(), state.sum_p2());
    const Compensated& sp = state.sum_p();
    const Compensated& sp2 = state.sum_p2();
    const Compensated& sq = state.sum_q(consumer);
    const Compensated& spq = state.sum_pq(consumer);
    const Compensated intercept = sp2 * sq - sp * spq;
    const Compensated slope = sp * sq - spq * static_cast<double>(state.n_days());
    return {intercept.value() / det.value(), slope.value() / det.value()};
}

double baseline_sensitivity(int t, int j, const PriceSeries& prices)
{
    const int n = t + j - 1;
    if (t < 1 || j < 1 || n > prices.size())
        throw std::out_of_range("baseline_sensitivity: day outside the price series");
    const Compensated det = checked_determinant(n, prices.sum(n), prices.sum_sq(n));
    const Compensated numer = prices.sum_sq(n) - prices.sum(n) * prices.at(t);
    return numer.value() / det.value();
}

double inflation_weight(int t, const PriceSeries& prices, int m, int T)
{
    double w = 0.0;
    const int last = std::min(m, T - t);
    for (int j = 1; j <= last; ++j) {
        if (t + j < first_fitted_day)
            continue;
        w += prices.at(t + j) * baseline_sensitivity(t, j, prices);
    }
    return w;
}

std::vector<double> inflation_profile(const PriceSeries& prices, int m, int T)
{
    std::vector<double> out(static_cast<std::size_t>(T));
    for (int t = 1; t <= T; ++t)
        out[static_cast<std::size_t>(t - 1)] = inflation_weight(t, prices, m, T);
    return out;
}

double inflation_term(int t, const ConsumerParams& params, const PriceSeries& prices, int m, int T)
{
    if (!(params.d > 0.0))
        throw InvalidConfig("d", "utility curvature must be > 0");
    return inflation_weight(t, prices, m, T) / params.d;
}

std::vector<double> delta_b_profile(const PriceSchedule& schedule, int m)
{
    const PriceSeries& prices = schedule.prices;
    const int T = schedule.horizon();
    std::vector<double> out(static_cast<std::size_t>(T), 0.0);
    Compensated numer;
    for (int t = 1; t <= T; ++t) {
        const double weight = schedule.p_star * schedule.delta_p * std::exp(-static_cast<double>(t));
        if (weight != 0.0)
            numer.add_product(weight, inflation_weight(t, prices, m, T));
        if (t < 2)
            continue;
        const Compensated det = checked_determinant(t, prices.sum(t), prices.sum_sq(t));
        // sum (p_k - mean)^2 = det / t
        out[static_cast<std::size_t>(t - 1)] = numer.value() * static_cast<double>(t) / det.value();
    }
    return out;
}

double delta_b(int t, const ConsumerParams& params, const PriceSchedule& schedule, int m)
{
    if (t < 2)
        throw SingularDesign("delta_b needs at least two days of prices");
    if (t > schedule.horizon())
        throw std::out_of_range("delta_b: day beyond the horizon");
    const PriceSeries& prices = schedule.prices;
    const int T = schedule.horizon();
    const Compensated det = checked_determinant(t, prices.sum(t), prices.sum_sq(t));
    Compensated numer;
    for (int k = 1; k <= t; ++k) {
        const double weight = schedule.p_star * schedule.delta_p * std::exp(-static_cast<double>(k));
        if (weight != 0.0)
            numer.add_product(weight, inflation_weight(k, prices, m, T));
    }
    return numer.value() * static_cast<double>(t) / det.value() / params.d;
}

double upfront_payment(const ConsumerParams& params, const PriceSchedule& schedule, int m)
{
    if (!(params.d > 0.0))
        throw InvalidConfig("d", "utility curvature must be > 0");
    const int T = schedule.horizon();
    if (T < 2)
        return 0.0;
    const std::vector<double> db = delta_b_profile(schedule, m);
    Compensated total;
    for (int t = 2; t <= T; ++t)
        total.add_product(schedule.prices.at(t), db[static_cast<std::size_t>(t - 1)]);
    return total.value() / params.d;
}

double delta_tk_diagnostic(int t, int k, const PriceSeries& prices, double d)
{
    if (t - k < 1 || k < 0)
        throw std::out_of_range("delta_tk_diagnostic: need 0 <= k < t");
    if (t + 1 > prices.size())
        throw std::out_of_range("delta_tk_diagnostic: need the price of day t + 1");
    const Compensated det = checked_determinant(t, prices.sum(t), prices.sum_sq(t));
    const Compensated numer = prices.sum_sq(t) - prices.sum(t) * prices.at(t - k);
    return prices.at(t + 1) / d * (numer.value() / det.value());
}

} // namespace drm
