#pragma once

#include "drm/sim_engine.hpp"

#include <json.hpp>

#include <filesystem>
#include <span>
#include <string>

namespace drm {

inline constexpr int config_schema_version = 1;

/// Applies "dotted.path=value" to a JSON document. The value is parsed as JSON
/// when possible and taken as a string otherwise; numeric path segments index
/// arrays.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Builds and validates a simulation config. Throws InvalidConfig naming the
/// offending field.
SimulationConfig parse_config(const nlohmann::json& doc);

SimulationConfig load_config(const std::filesystem::path& path, std::span<const std::string> overrides = {});

nlohmann::json to_json(const SimulationConfig& config);

/// Consumers with a ~ U[a_lo, a_hi), d ~ U[d_lo, d_hi), drawn from `seed`.
std::vector<ConsumerParams> generate_population(int n, double a_lo, double a_hi, double d_lo, double d_hi,
                                                double noise_sd, std::uint64_t seed);

/// The reference setup: five consumers with a in [2, 4], d in [1, 3],
/// p0 = 1, c = 2, delta_p = 0.5, noise 0.1, lookahead 3, seed 42, 200 replications.
SimulationConfig standard_config(int T = 1000);

} // namespace drm
