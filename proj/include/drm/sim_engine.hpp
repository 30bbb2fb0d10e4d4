#pragma once

#include "drm/agents.hpp"
#include "drm/core_model.hpp"
#include "drm/estimator.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace drm {

struct SimulationConfig {
    MarketConfig market;
    std::vector<ConsumerParams> consumers;
    ConsumerKind consumer_policy = ConsumerKind::strategic;
    SoPolicy so_policy;
    std::uint64_t seed = 42;
    int n_replications = 200;
    Counterfactual counterfactual;
};

void validate(const SimulationConfig& config);

/// One realization of the T-day program.
struct Trajectory {
    int replication = 0;
    std::vector<DayRecord> days;
    std::vector<double> p_o; // upfront payment per consumer
    /// Per day and consumer (index (t-1)*N + i): the correction delta_b matched
    /// to the data window of the day's fitted baseline; zero when no fit applies.
    std::vector<double> baseline_correction;
    std::optional<std::vector<BaselineEstimate>> final_estimates;
};

/// Runs replication `replication` of the program. Identical config and
/// replication index give an identical trajectory.
Trajectory run(const SimulationConfig& config, int replication = 0);

/// Replication-averaged quantities needed for regret and IR.
struct Ensemble {
    int T = 0;
    int n_consumers = 0;
    int n_replications = 0;
    std::vector<double> prices;              // per day
    std::vector<double> inflation;           // (t-1)*N + i, deterministic
    std::vector<double> mean_expected_cost;  // per day
    std::vector<double> mean_baseline;       // (t-1)*N + i
    std::vector<double> mean_envelope;       // mean of b_hat - b_tilde + correction
    std::vector<double> mean_abs_envelope;   // mean of |b_hat - b_tilde + correction|
    std::vector<double> upfront;             // per consumer
    std::vector<double> replication_cost_excess; // per replication: sum_t (C~_t - C~*)
    std::vector<double> replication_utility;     // r*N + i: sum_t U_t

    /// Folds one trajectory in. Trajectories must arrive in replication order
    /// for results to be independent of scheduling.
    void add(const Trajectory& trajectory, const SimulationConfig& config);
    void finalize();

    std::size_t index(int t, int i) const
    {
        return static_cast<std::size_t>(t - 1) * static_cast<std::size_t>(n_consumers) + static_cast<std::size_t>(i);
    }
};

/// Runs config.n_replications replications on up to `threads` threads and
/// reduces them in replication order.
Ensemble run_ensemble(const SimulationConfig& config, unsigned threads = 1);

/// Per-replication regret sum_t (C~_t - C~*) + P_o.
std::vector<double> replication_regret(const Ensemble& ensemble);

/// Expected regret with the four-way breakdown. Throws std::logic_error if the
/// breakdown does not reproduce R_T to 1e-6 relative (floored at 1 for R_T near zero).
RegretReport regret(const Ensemble& ensemble, const SimulationConfig& config);

struct IrReport {
    std::vector<double> margin;          // mean of sum_t U_t + P_o - T U*
    std::vector<double> standard_error;
    std::vector<bool> passed;            // margin >= -3 standard errors
    bool all_passed() const;
};

IrReport ir_check(const Ensemble& ensemble, const SimulationConfig& config);

/// Relative tolerance for the regret breakdown identity.
inline constexpr double decomposition_tolerance = 1e-6;

} // namespace drm
