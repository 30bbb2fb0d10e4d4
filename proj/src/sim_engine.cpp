#include "drm/sim_engine.hpp"

#include "drm/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

namespace drm {

namespace {

bool pays_upfront(const SimulationConfig& config)
{
    return config.so_policy.kind == SoKind::ol_drm && config.counterfactual.pay_upfront &&
           !config.counterfactual.oracle_baselines && !config.counterfactual.fixed_price;
}

int lookahead(const SimulationConfig& config)
{
    return config.consumer_policy == ConsumerKind::myopic ? 0 : config.market.m;
}

std::mt19937_64 replication_engine(std::uint64_t seed, int replication)
{
    const auto rep = static_cast<std::uint64_t>(replication);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(rep), static_cast<std::uint32_t>(rep >> 32)};
    return std::mt19937_64(seq);
}

double mean(std::span<const double> xs)
{
    return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double standard_error(std::span<const double> xs)
{
    if (xs.size() < 2)
        return 0.0;
    const double mu = mean(xs);
    double ss = 0.0;
    for (double x : xs)
        ss += (x - mu) * (x - mu);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
}

} // namespace

void validate(const SimulationConfig& config)
{
    validate(config.market);
    if (config.consumers.empty())
        throw InvalidConfig("consumers", "need at least one consumer");
    if (static_cast<int>(config.consumers.size()) != config.market.n_consumers)
        throw InvalidConfig("market.n_consumers", "does not match the number of consumers");
    for (std::size_t i = 0; i < config.consumers.size(); ++i)
        validate(config.consumers[i], config.market.p0, static_cast<int>(i));
    if (config.n_replications < 1)
        throw InvalidConfig("n_replications", "need at least one replication");
    if (config.so_policy.kind == SoKind::averaging_etc) {
        if (config.market.T < 2)
            throw InvalidConfig("market.T", "explore-then-commit needs T >= 2");
        resolved_explore_days(config.so_policy, config.market.T);
    }
    if (config.counterfactual.fixed_price && !std::isfinite(*config.counterfactual.fixed_price))
        throw InvalidConfig("counterfactual.fixed_price", "must be finite");
}

Trajectory run(const SimulationConfig& config, int replication)
{
    validate(config);
    const MarketConfig& market = config.market;
    const auto& consumers = config.consumers;
    const std::size_t n = consumers.size();
    const int T = market.T;
    const int m = lookahead(config);
    const double p_star = optimal_price(market.c);

    Trajectory traj;
    traj.replication = replication;
    traj.days.reserve(static_cast<std::size_t>(T));
    traj.p_o.assign(n, 0.0);
    traj.baseline_correction.assign(static_cast<std::size_t>(T) * n, 0.0);

    const PriceSeries prices = announced_prices(config.so_policy, market, config.counterfactual);
    const BaselineRule rule = baseline_rule(config.so_policy, market, config.counterfactual);
    const std::vector<double> weights = rule_inflation_profile(rule, prices, m, T);

    const bool fitted = config.so_policy.kind == SoKind::ol_drm && !config.counterfactual.oracle_baselines &&
                        !config.counterfactual.fixed_price;
    if (fitted && T >= 2) {
        try {
            const PriceSchedule schedule{p_star, market.delta_p, prices};
            const std::vector<double> db = delta_b_profile(schedule, m);
            for (std::size_t i = 0; i < n; ++i) {
                if (pays_upfront(config))
                    traj.p_o[i] = upfront_payment(consumers[i], schedule, m);
                // The baseline for day t is fitted on days 1..t-1.
                for (int t = first_fitted_day; t <= T; ++t)
                    traj.baseline_correction[static_cast<std::size_t>(t - 1) * n + i] =
                        db[static_cast<std::size_t>(t - 2)] / consumers[i].d;
            }
        } catch (const SingularDesign& e) {
            throw SingularDesign(e.what(), 0);
        }
    }

    std::mt19937_64 engine = replication_engine(config.seed, replication);
    std::normal_distribution<double> normal(0.0, 1.0);

    SoMemory memory(n);
    std::vector<double> q(n);
    for (int t = 1; t <= T; ++t) {
        SoDecision decision;
        try {
            decision = so_decide(config.so_policy, t, market, prices, memory, consumers, config.counterfactual);
        } catch (const SingularDesign& e) {
            throw SingularDesign(std::string(e.what()) + " (day " + std::to_string(t) + ")", t);
        }

        DayRecord day;
        day.t = t;
        day.price = decision.price;
        day.baselines = decision.baselines;
        day.consumptions.resize(n);
        day.shocks.resize(n);
        day.inflation.resize(n);
        day.dr_payments.resize(n);
        day.consumer_net_utilities.resize(n);

        const double p = decision.price;
        double total_q = 0.0;
        double total_b = 0.0;
        double total_expected_q = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const ConsumerParams& params = consumers[i];
            // Always draw, so every policy sees the same shock on the same (replication, day, consumer).
            const double eps = params.noise_sd * normal(engine);
            const double inflation = weights[static_cast<std::size_t>(t - 1)] / params.d;
            double qi = hypothetical_consumption(params, market.p0, p, eps) + inflation;
            if (market.clamp_nonneg)
                qi = std::max(qi, 0.0);
            const double payment = p * (decision.baselines[i] - qi);

            day.shocks[i] = eps;
            day.inflation[i] = inflation;
            day.consumptions[i] = qi;
            day.dr_payments[i] = payment;
            day.consumer_net_utilities[i] = utility(params, qi, eps) - market.p0 * qi + payment;

            q[i] = qi;
            total_q += qi;
            total_b += decision.baselines[i];
            total_expected_q += correct_baseline(params, market.p0) - p / params.d + inflation;
        }
        day.realized_cost = so_day_cost(market.c, p, total_b, total_q);
        day.conditional_expected_cost = so_day_cost(market.c, p, total_b, total_expected_q);
        traj.days.push_back(std::move(day));

        so_record(config.so_policy, t, market, memory, p, q);
    }

    if (fitted && memory.estimator.n_days() >= 2) {
        std::vector<BaselineEstimate> est(n);
        for (std::size_t i = 0; i < n; ++i)
            est[i] = ls_estimate(memory.estimator, i);
        traj.final_estimates = std::move(est);
    }
    return traj;
}

void Ensemble::add(const Trajectory& trajectory, const SimulationConfig& config)
{
    const auto N = static_cast<int>(config.consumers.size());
    if (n_replications == 0) {
        T = config.market.T;
        n_consumers = N;
        const auto cells = static_cast<std::size_t>(T) * static_cast<std::size_t>(N);
        prices.resize(static_cast<std::size_t>(T));
        inflation.resize(cells);
        mean_expected_cost.assign(static_cast<std::size_t>(T), 0.0);
        mean_baseline.assign(cells, 0.0);
        mean_envelope.assign(cells, 0.0);
        mean_abs_envelope.assign(cells, 0.0);
        upfront = trajectory.p_o;
        for (int t = 1; t <= T; ++t) {
            const DayRecord& day = trajectory.days[static_cast<std::size_t>(t - 1)];
            prices[static_cast<std::size_t>(t - 1)] = day.price;
            for (int i = 0; i < N; ++i)
                inflation[index(t, i)] = day.inflation[static_cast<std::size_t>(i)];
        }
    }
    ++n_replications;

    const double c_star = optimal_expected_cost(config.market, config.consumers);
    double excess = 0.0;
    std::vector<double> util(static_cast<std::size_t>(N), 0.0);
    for (int t = 1; t <= T; ++t) {
        const DayRecord& day = trajectory.days[static_cast<std::size_t>(t - 1)];
        mean_expected_cost[static_cast<std::size_t>(t - 1)] += day.conditional_expected_cost;
        excess += day.conditional_expected_cost - c_star;
        for (int i = 0; i < N; ++i) {
            const auto k = index(t, i);
            const auto ii = static_cast<std::size_t>(i);
            const double b = day.baselines[ii];
            const double env = b - correct_baseline(config.consumers[ii], config.market.p0) +
                               trajectory.baseline_correction[k];
            mean_baseline[k] += b;
            mean_envelope[k] += env;
            mean_abs_envelope[k] += std::abs(env);
            util[ii] += day.consumer_net_utilities[ii];
        }
    }
    replication_cost_excess.push_back(excess);
    replication_utility.insert(replication_utility.end(), util.begin(), util.end());
}

void Ensemble::finalize()
{
    const double r = n_replications;
    for (auto* v : {&mean_expected_cost, &mean_baseline, &mean_envelope, &mean_abs_envelope})
        for (double& x : *v)
            x /= r;
}

Ensemble run_ensemble(const SimulationConfig& config, unsigned threads)
{
    validate(config);
    threads = std::max(1u, threads);
    const int total = config.n_replications;
    const int batch = static_cast<int>(threads) * 4;

    Ensemble ensemble;
    std::vector<Trajectory> slots(static_cast<std::size_t>(batch));
    for (int start = 0; start < total; start += batch) {
        const int count = std::min(batch, total - start);
        std::atomic<int> next{0};
        std::exception_ptr failure;
        std::atomic<bool> failed{false};
        auto worker = [&] {
            for (int k = next++; k < count; k = next++) {
                try {
                    slots[static_cast<std::size_t>(k)] = run(config, start + k);
                } catch (...) {
                    if (!failed.exchange(true))
                        failure = std::current_exception();
                }
            }
        };
        const unsigned spawn = std::min<unsigned>(threads, static_cast<unsigned>(count));
        if (spawn <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < spawn; ++w)
                pool.emplace_back(worker);
            for (auto& th : pool)
                th.join();
        }
        if (failure)
            std::rethrow_exception(failure);
        for (int k = 0; k < count; ++k)
            ensemble.add(slots[static_cast<std::size_t>(k)], config);
    }
    ensemble.finalize();
    return ensemble;
}

std::vector<double> replication_regret(const Ensemble& ensemble)
{
    const double p_o = std::accumulate(ensemble.upfront.begin(), ensemble.upfront.end(), 0.0);
    std::vector<double> out;
    out.reserve(ensemble.replication_cost_excess.size());
    for (double excess : ensemble.replication_cost_excess)
        out.push_back(excess + p_o);
    return out;
}

RegretReport regret(const Ensemble& ensemble, const SimulationConfig& config)
{
    const MarketConfig& market = config.market;
    const double p_star = optimal_price(market.c);
    const double c_star = optimal_expected_cost(market, config.consumers);
    const double h = aggregate_inverse_curvature(config.consumers);
    const int T = ensemble.T;
    const int N = ensemble.n_consumers;

    RegretReport report;
    report.T = T;
    report.n_replications = ensemble.n_replications;
    report.optimal_cost = c_star;
    report.upfront_payments = ensemble.upfront;
    const double p_o = std::accumulate(ensemble.upfront.begin(), ensemble.upfront.end(), 0.0);

    auto& dec = report.decomposition;
    dec.upfront = p_o;
    dec.inflation.resize(static_cast<std::size_t>(T));
    dec.exploration.resize(static_cast<std::size_t>(T));
    dec.baseline_error.resize(static_cast<std::size_t>(T));
    report.cumulative_regret.resize(static_cast<std::size_t>(T));

    std::vector<double> b_tilde(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i)
        b_tilde[static_cast<std::size_t>(i)] = correct_baseline(config.consumers[static_cast<std::size_t>(i)], market.p0);

    Compensated running(p_o);
    Compensated infl_total, expl_total, base_total;
    for (int t = 1; t <= T; ++t) {
        const auto k = static_cast<std::size_t>(t - 1);
        const double p = ensemble.prices[k];
        double inflation = 0.0;
        double error = 0.0;
        for (int i = 0; i < N; ++i) {
            inflation += ensemble.inflation[ensemble.index(t, i)];
            error += ensemble.mean_baseline[ensemble.index(t, i)] - b_tilde[static_cast<std::size_t>(i)];
        }
        dec.inflation[k] = (market.c - p) * inflation;
        dec.exploration[k] = (p - p_star) * (p - p_star) * h;
        dec.baseline_error[k] = p * error;
        infl_total += dec.inflation[k];
        expl_total += dec.exploration[k];
        base_total += dec.baseline_error[k];

        running += ensemble.mean_expected_cost[k] - c_star;
        report.cumulative_regret[k] = running.value();
    }
    dec.inflation_total = infl_total.value();
    dec.exploration_total = expl_total.value();
    dec.baseline_error_total = base_total.value();

    const double r_t = report.cumulative_regret.back();
    if (std::abs(dec.sum() - r_t) > decomposition_tolerance * std::max(1.0, std::abs(r_t)))
        throw std::logic_error("regret breakdown does not sum to the regret");

    report.regret_standard_error = standard_error(replication_regret(ensemble));

    report.ir_ledger = ir_check(ensemble, config).margin;
    return report;
}

bool IrReport::all_passed() const
{
    return std::all_of(passed.begin(), passed.end(), [](bool b) { return b; });
}

IrReport ir_check(const Ensemble& ensemble, const SimulationConfig& config)
{
    const int N = ensemble.n_consumers;
    const int R = ensemble.n_replications;
    IrReport report;
    for (int i = 0; i < N; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        const double outside = ensemble.T * no_dr_utility(config.consumers[ii], config.market.p0);
        std::vector<double> ledger(static_cast<std::size_t>(R));
        for (int r = 0; r < R; ++r)
            ledger[static_cast<std::size_t>(r)] =
                ensemble.replication_utility[static_cast<std::size_t>(r) * static_cast<std::size_t>(N) + ii] +
                ensemble.upfront[ii] - outside;
        const double margin = mean(ledger);
        const double se = standard_error(ledger);
        report.margin.push_back(margin);
        report.standard_error.push_back(se);
        report.passed.push_back(margin >= -3.0 * se);
    }
    return report;
}

} // namespace drm
