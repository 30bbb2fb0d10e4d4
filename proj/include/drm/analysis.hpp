#pragma once

#include "drm/sim_engine.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace drm {

struct CurvePoint {
    double t = 0.0;
    double value = 0.0;
};

/// Two competing growth models for a regret curve:
///   R_t = c2 (ln t)^2 + c0           (least squares in R)
///   ln R_t = alpha ln t + beta       (least squares in logs, R_t > 0 only)
struct GrowthFit {
    double c2 = 0.0;
    double c0 = 0.0;
    double r2_log2 = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double r2_power = 0.0;
    int points_log2 = 0;
    int points_power = 0;
};

inline constexpr double default_t_min = 50.0;
inline constexpr int min_fit_points = 5;

/// Fits both models over points with t >= t_min. Throws InsufficientData if
/// either model is left with fewer than five points.
GrowthFit fit_growth(std::span<const CurvePoint> curve, double t_min = default_t_min);

/// A named SO policy for comparisons. Explore-then-commit variants differ in
/// the exponent of their exploration length ceil(T^exponent).
struct PolicySpec {
    std::string name;
    SoKind kind = SoKind::ol_drm;
    double explore_exponent = 2.0 / 3.0;
};

/// Names accepted by parse_policy.
std::vector<std::string> policy_names();
std::optional<PolicySpec> parse_policy(const std::string& name);

struct PolicyResult {
    std::string policy;
    std::vector<double> mean_regret;     // per T in the grid
    std::vector<double> standard_error;  // per T
    std::vector<std::vector<double>> replication_regret; // [grid index][replication]
    std::optional<GrowthFit> fit;        // absent when the grid is too small
};

/// Pairwise statistics of policies[k] against policies[0] at the largest T.
struct PairedStats {
    std::string baseline;
    std::string other;
    double fraction_baseline_better = 0.0; // share of seeds where baseline regret < other regret
    double paired_sd = 0.0;                // sd of per-seed differences
    double unpaired_sd = 0.0;              // sqrt(var_a + var_b): the sd without common random numbers
    std::optional<int> crossover_T;        // smallest grid T from which baseline beats other for good
};

struct ComparisonTable {
    std::vector<int> t_grid;
    std::vector<PolicyResult> policies;
    std::vector<PairedStats> pairs;
};

/// Runs every policy on every horizon of the grid with common random numbers
/// (same seeds, same shock streams) and summarizes the result.
ComparisonTable compare_policies(const SimulationConfig& config, std::span<const PolicySpec> policies,
                                 std::span<const int> t_grid, unsigned threads = 1,
                                 double t_min = default_t_min);

/// Horizon-indexed curve of one policy's mean regret.
std::vector<CurvePoint> regret_curve(const ComparisonTable& table, std::size_t policy);

} // namespace drm
