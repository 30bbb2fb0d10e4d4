#pragma once

#include "drm/core_model.hpp"
#include "drm/estimator.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace drm {

// How the SO turns a consumer's history into future baselines. Consumers know
// the announced rule and use it to work out how today's consumption moves
// tomorrow's payments.

/// OL-DRM: initial baseline on days 1-2, least-squares intercept afterwards.
struct LeastSquaresRule {};

/// Explore-then-commit: mean consumption over the first n_explore days.
struct AveragingRule {
    int n_explore = 1;
};

/// Baselines that do not react to behaviour (oracle baselines, no-DR runs).
struct FixedRule {};

using BaselineRule = std::variant<LeastSquaresRule, AveragingRule, FixedRule>;

/// d b_hat_{t+j} / d q_t under the rule.
double rule_sensitivity(const BaselineRule& rule, int t, int j, const PriceSeries& prices);

/// sum_{j=1..min(m, T-t)} p_{t+j} * rule_sensitivity(t, j); divide by d for the
/// inflation of a specific consumer.
double rule_inflation_weight(const BaselineRule& rule, int t, const PriceSeries& prices, int m, int T);
std::vector<double> rule_inflation_profile(const BaselineRule& rule, const PriceSeries& prices, int m, int T);

enum class ConsumerKind { strategic, myopic };

struct ConsumerPolicy {
    ConsumerKind kind = ConsumerKind::strategic;
    int m = 0; // lookahead for strategic consumers
    ConsumerParams params;

    /// Lookahead actually used; a myopic consumer behaves as strategic with m = 0.
    int lookahead() const { return kind == ConsumerKind::myopic ? 0 : m; }
};

/// Best response on day t: (a + eps - p0 - p_t)/d + inflation. Exact because
/// the utility is quadratic and future baselines are linear in today's
/// consumption.
double consumer_consumption(const ConsumerPolicy& policy, int t, double eps, const PriceSeries& prices,
                            const BaselineRule& rule, const MarketConfig& market);

enum class SoKind { ol_drm, averaging_etc };

struct SoPolicy {
    SoKind kind = SoKind::ol_drm;
    int n_explore = 0; // averaging_etc only; 0 selects ceil(T^(2/3))
};

std::string to_string(SoKind kind);

/// ceil(T^exponent) clamped to [1, T - 1].
int explore_days(int T, double exponent);

/// n_explore after defaults are resolved; throws InvalidConfig if out of range.
int resolved_explore_days(const SoPolicy& policy, int T);

/// Switches for counterfactual and diagnostic runs. The defaults reproduce the
/// mechanism as announced.
struct Counterfactual {
    std::optional<double> fixed_price; // replaces the announced price on every day
    bool oracle_baselines = false;     // baselines set to the correct value b_tilde
    bool pay_upfront = true;           // include the upfront payment P_o
};

/// Everything the SO remembers: the least-squares statistics and the
/// exploration-phase consumption totals.
struct SoMemory {
    explicit SoMemory(std::size_t n_consumers);

    EstimatorState estimator;
    std::vector<Compensated> explore_sum;
    int explore_days = 0;
};

struct SoDecision {
    double price = 0.0;
    std::vector<double> baselines;
    bool dr_event = true;
};

/// The price sequence the SO announces before day 1.
PriceSeries announced_prices(const SoPolicy& policy, const MarketConfig& market, const Counterfactual& cf = {});

/// The rule consumers face under this policy.
BaselineRule baseline_rule(const SoPolicy& policy, const MarketConfig& market, const Counterfactual& cf = {});

SoDecision so_decide(const SoPolicy& policy, int t, const MarketConfig& market, const PriceSeries& announced,
                     const SoMemory& memory, std::span<const ConsumerParams> consumers,
                     const Counterfactual& cf = {});

/// Feeds day t's outcome back into the SO's memory.
void so_record(const SoPolicy& policy, int t, const MarketConfig& market, SoMemory& memory, double price,
               std::span<const double> consumption);

// ---------------------------------------------------------------------------
// Brute-force oracle for the best response.

/// Baseline assigned on `day` given prices and one consumer's consumption on
/// days 1..day-1 (consumption.size() == day - 1).
using BaselineFunction =
    std::function<double(int day, std::span<const double> prices, std::span<const double> consumption)>;

/// Least-squares baseline computed by a dense QR solve of the design matrix,
/// independent of the closed form used by the estimator.
BaselineFunction dense_least_squares_baseline(double b_init);
BaselineFunction averaging_baseline(int n_explore);
BaselineFunction fixed_baseline(double value);

struct BestResponse {
    double q_t = 0.0;
    std::vector<double> window;           // maximizer over days t..min(t+m, T)
    std::vector<double> hessian_diagonal; // finite-difference curvature at the maximizer
    double gradient_norm = 0.0;
    int updates = 0;
};

/// Maximizes the certainty-equivalent lookahead objective
///   sum_{s=t}^{t+m} (a + eps_s - p0) q_s - d q_s^2 / 2 + p_s (b_hat_s - q_s)
/// over (q_t, ..., q_{t+m}) by coordinate ascent with numeric derivatives.
/// Future shocks are set to zero. `past` holds days 1..t-1.
BestResponse brute_force_best_response(int t, const ConsumerParams& params, double eps_t,
                                       std::span<const double> prices, std::span<const double> past,
                                       const BaselineFunction& baseline, const MarketConfig& market, int m);

} // namespace drm
