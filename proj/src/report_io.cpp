#include "drm/report_io.hpp"

#include "drm/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace drm {

using nlohmann::json;

std::string format_number(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, const RegretReport* report,
                          const Ensemble* ensemble)
{
    const std::size_t n = trajectory.p_o.size();
    out << "t,price";
    for (const char* name : {"baseline", "consumption", "shock", "payment", "utility"})
        for (std::size_t i = 0; i < n; ++i)
            out << ',' << name << '_' << (i + 1);
    out << ",realized_cost,conditional_expected_cost";
    if (report && ensemble)
        out << ",expected_cost_mean,cumulative_regret";
    out << '\n';

    for (const DayRecord& day : trajectory.days) {
        out << day.t << ',' << format_number(day.price);
        for (const auto* column : {&day.baselines, &day.consumptions, &day.shocks, &day.dr_payments,
                                   &day.consumer_net_utilities})
            for (double v : *column)
                out << ',' << format_number(v);
        out << ',' << format_number(day.realized_cost) << ',' << format_number(day.conditional_expected_cost);
        if (report && ensemble) {
            const auto k = static_cast<std::size_t>(day.t - 1);
            out << ',' << format_number(ensemble->mean_expected_cost[k]) << ','
                << format_number(report->cumulative_regret[k]);
        }
        out << '\n';
    }
}

json to_json(const Trajectory& trajectory)
{
    json days = json::array();
    for (const DayRecord& day : trajectory.days) {
        days.push_back({{"t", day.t},
                        {"price", day.price},
                        {"baselines", day.baselines},
                        {"consumptions", day.consumptions},
                        {"shocks", day.shocks},
                        {"inflation", day.inflation},
                        {"dr_payments", day.dr_payments},
                        {"consumer_net_utilities", day.consumer_net_utilities},
                        {"realized_cost", day.realized_cost},
                        {"conditional_expected_cost", day.conditional_expected_cost}});
    }
    json doc{{"replication", trajectory.replication}, {"days", days}, {"p_o", trajectory.p_o}};
    if (trajectory.final_estimates) {
        json est = json::array();
        for (const auto& e : *trajectory.final_estimates)
            est.push_back({{"b_hat", e.b_hat}, {"b1_hat", e.b1_hat}});
        doc["final_estimates"] = est;
    } else {
        doc["final_estimates"] = nullptr;
    }
    return doc;
}

json to_json(const RegretReport& report)
{
    const auto& d = report.decomposition;
    json doc{{"T", report.T},
             {"n_replications", report.n_replications},
             {"optimal_cost", report.optimal_cost},
             {"regret", report.cumulative_regret.empty() ? 0.0 : report.cumulative_regret.back()},
             {"regret_standard_error", report.regret_standard_error},
             {"cumulative_regret", report.cumulative_regret},
             {"decomposition",
              {{"inflation_total", d.inflation_total},
               {"exploration_total", d.exploration_total},
               {"baseline_error_total", d.baseline_error_total},
               {"upfront", d.upfront},
               {"sum", d.sum()},
               {"inflation", d.inflation},
               {"exploration", d.exploration},
               {"baseline_error", d.baseline_error}}},
             {"ir_ledger", report.ir_ledger},
             {"upfront_payments", report.upfront_payments}};
    if (report.fit_available)
        doc["fit"] = {{"log2_coeff", report.fitted_log2_coeff}, {"power_exponent", report.fitted_power_exponent}};
    else
        doc["fit"] = nullptr;
    return doc;
}

json to_json(const IrReport& ir)
{
    json doc{{"margin", ir.margin}, {"standard_error", ir.standard_error}};
    json passed = json::array();
    for (bool b : ir.passed)
        passed.push_back(b);
    doc["passed"] = passed;
    doc["all_passed"] = ir.all_passed();
    return doc;
}

json to_json(const GrowthFit& fit)
{
    return {{"log2_model", {{"c2", fit.c2}, {"c0", fit.c0}, {"r2", fit.r2_log2}, {"points", fit.points_log2}}},
            {"power_model", {{"alpha", fit.alpha}, {"beta", fit.beta}, {"r2", fit.r2_power}, {"points", fit.points_power}}}};
}

json to_json(const ComparisonTable& table)
{
    json policies = json::array();
    for (const auto& p : table.policies) {
        policies.push_back({{"policy", p.policy},
                            {"mean_regret", p.mean_regret},
                            {"standard_error", p.standard_error},
                            {"fit", p.fit ? to_json(*p.fit) : json(nullptr)},
                            {"alpha", p.fit ? json(p.fit->alpha) : json(nullptr)},
                            {"c2", p.fit ? json(p.fit->c2) : json(nullptr)}});
    }
    json pairs = json::array();
    for (const auto& s : table.pairs) {
        pairs.push_back({{"baseline", s.baseline},
                         {"other", s.other},
                         {"fraction_baseline_better", s.fraction_baseline_better},
                         {"paired_sd", s.paired_sd},
                         {"unpaired_sd", s.unpaired_sd},
                         {"crossover_T", s.crossover_T ? json(*s.crossover_T) : json(nullptr)}});
    }
    return {{"t_grid", table.t_grid}, {"policies", policies}, {"pairs", pairs}};
}

void write_comparison_csv(std::ostream& out, const ComparisonTable& table)
{
    out << "T";
    for (const auto& p : table.policies)
        out << ',' << p.policy << ',' << p.policy << "_se";
    out << '\n';
    for (std::size_t g = 0; g < table.t_grid.size(); ++g) {
        out << table.t_grid[g];
        for (const auto& p : table.policies)
            out << ',' << format_number(p.mean_regret[g]) << ',' << format_number(p.standard_error[g]);
        out << '\n';
    }
}

namespace {

std::vector<std::string> split_row(const std::string& line)
{
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
        cells.push_back(cell);
    if (!line.empty() && line.back() == ',')
        cells.emplace_back();
    return cells;
}

bool parse_double(const std::string& s, double& out)
{
    if (s.empty())
        return false;
    std::size_t used = 0;
    try {
        out = std::stod(s, &used);
    } catch (const std::exception&) {
        return false;
    }
    return used == s.size();
}

} // namespace

std::vector<CurvePoint> read_curve_csv(std::istream& in, const std::string& value_column)
{
    std::string line;
    if (!std::getline(in, line))
        throw InvalidConfig("csv", "line 1: missing header");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    const auto header = split_row(line);
    std::ptrdiff_t t_col = -1, v_col = -1;
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (header[k] == "t" || header[k] == "T")
            t_col = static_cast<std::ptrdiff_t>(k);
        if (header[k] == value_column)
            v_col = static_cast<std::ptrdiff_t>(k);
    }
    if (t_col < 0)
        throw InvalidConfig("csv", "line 1: no t column");
    if (v_col < 0)
        throw InvalidConfig("csv", "line 1: no column named " + value_column);

    std::vector<CurvePoint> points;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto cells = split_row(line);
        CurvePoint p;
        if (cells.size() != header.size() || !parse_double(cells[static_cast<std::size_t>(t_col)], p.t) ||
            !parse_double(cells[static_cast<std::size_t>(v_col)], p.value))
            throw InvalidConfig("csv", "line " + std::to_string(line_no) + ": malformed row");
        points.push_back(p);
    }
    return points;
}

void write_json(const std::filesystem::path& path, const json& doc)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

} // namespace drm
