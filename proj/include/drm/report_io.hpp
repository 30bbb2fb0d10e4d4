#pragma once

#include "drm/analysis.hpp"
#include "drm/sim_engine.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace drm {

/// Shortest round-trip decimal form ("%.17g").
std::string format_number(double x);

/// One row per day of `trajectory`. When `report` and `ensemble` are given, the
/// replication-mean expected cost and the cumulative regret are appended.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, const RegretReport* report = nullptr,
                          const Ensemble* ensemble = nullptr);

nlohmann::json to_json(const Trajectory& trajectory);
nlohmann::json to_json(const RegretReport& report);
nlohmann::json to_json(const IrReport& ir);
nlohmann::json to_json(const GrowthFit& fit);
nlohmann::json to_json(const ComparisonTable& table);

void write_comparison_csv(std::ostream& out, const ComparisonTable& table);

/// Reads (t, value) pairs from a CSV with a header row. The value column is
/// chosen by name. Throws InvalidConfig naming the line for malformed rows.
std::vector<CurvePoint> read_curve_csv(std::istream& in, const std::string& value_column = "cumulative_regret");

/// Dumps with a trailing newline; numbers keep full precision.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

} // namespace drm
