#include "drm/cli.hpp"

#include "drm/analysis.hpp"
#include "drm/config_io.hpp"
#include "drm/errors.hpp"
#include "drm/report_io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace drm {

using nlohmann::json;

namespace {

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

unsigned resolve_threads(unsigned threads)
{
    if (threads > 0)
        return threads;
    return std::max(1u, std::thread::hardware_concurrency());
}

SimulationConfig load(const RunOptions& options)
{
    SimulationConfig config = load_config(options.config_path, options.overrides);
    if (options.seed)
        config.seed = *options.seed;
    return config;
}

// Maps library exceptions onto exit codes.
template <class F>
int guarded(std::ostream& log, F&& body)
{
    try {
        return body();
    } catch (const SingularDesign& e) {
        log << "error: price perturbation delta_p must be > 0";
        if (e.day() > 0)
            log << " (singular least-squares design at day " << e.day() << ")";
        log << '\n';
        return exit_singular;
    } catch (const InvalidConfig& e) {
        log << "error: invalid " << e.what() << '\n';
        return exit_invalid;
    } catch (const InsufficientData& e) {
        log << "error: insufficient data: " << e.what() << '\n';
        return exit_invalid;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return exit_internal;
    }
}

void ensure_dir(const std::filesystem::path& dir)
{
    if (!dir.empty())
        std::filesystem::create_directories(dir);
}

} // namespace

int cmd_run(const RunOptions& options, std::ostream& log)
{
    return guarded(log, [&] {
        const SimulationConfig config = load(options);
        const Ensemble ensemble = run_ensemble(config, resolve_threads(options.threads));
        RegretReport report = regret(ensemble, config);
        const IrReport ir = ir_check(ensemble, config);

        std::vector<CurvePoint> curve;
        for (std::size_t k = 0; k < report.cumulative_regret.size(); ++k)
            curve.push_back({static_cast<double>(k + 1), report.cumulative_regret[k]});
        json fit = nullptr;
        try {
            const GrowthFit g = fit_growth(curve);
            report.fit_available = true;
            report.fitted_log2_coeff = g.c2;
            report.fitted_power_exponent = g.alpha;
            fit = to_json(g);
        } catch (const InsufficientData&) {
        }

        const Trajectory trajectory = run(config, 0);
        ensure_dir(options.out_dir);
        {
            std::ofstream csv(options.out_dir / "trajectory.csv");
            if (!csv)
                throw std::runtime_error("cannot write trajectory.csv");
            write_trajectory_csv(csv, trajectory, &report, &ensemble);
        }

        json doc;
        doc["metadata"] = {{"generated_at", utc_timestamp()}, {"schema_version", config_schema_version}};
        doc["config"] = to_json(config);
        doc["regret"] = to_json(report);
        doc["fit"] = fit;
        doc["ir"] = to_json(ir);
        doc["trajectory_replication"] = trajectory.replication;
        doc["notes"] = {"upfront payments are charged to the regret at t = 1",
                        "upfront payments are computed from each consumer's private curvature d",
                        "trajectory.csv shows replication 0; regret and IR use the replication mean"};
        write_json(options.out_dir / "report.json", doc);

        log << "R_T = " << format_number(report.cumulative_regret.back()) << " (se "
            << format_number(report.regret_standard_error) << "), IR "
            << (ir.all_passed() ? "holds" : "violated") << " for all consumers\n";
        return static_cast<int>(exit_ok);
    });
}

int cmd_compare(const CompareOptions& options, std::ostream& log)
{
    return guarded(log, [&] {
        std::vector<PolicySpec> specs;
        for (const auto& name : options.policies) {
            auto spec = parse_policy(name);
            if (!spec) {
                std::string valid;
                for (const auto& n : policy_names())
                    valid += (valid.empty() ? "" : ", ") + n;
                throw InvalidConfig("policies", "unknown policy '" + name + "'; valid names: " + valid);
            }
            specs.push_back(*spec);
        }
        if (options.t_grid.empty())
            throw InvalidConfig("t_grid", "need at least one horizon");
        for (int T : options.t_grid)
            if (T < 2)
                throw InvalidConfig("t_grid", "every horizon must be >= 2");

        const SimulationConfig config = load(options.run);
        const ComparisonTable table =
            compare_policies(config, specs, options.t_grid, resolve_threads(options.run.threads), options.t_min);

        ensure_dir(options.run.out_dir);
        {
            std::ofstream csv(options.run.out_dir / "comparison.csv");
            if (!csv)
                throw std::runtime_error("cannot write comparison.csv");
            write_comparison_csv(csv, table);
        }
        json doc = to_json(table);
        doc["metadata"] = {{"generated_at", utc_timestamp()}, {"schema_version", config_schema_version}};
        doc["config"] = to_json(config);
        write_json(options.run.out_dir / "summary.json", doc);

        for (const auto& p : table.policies) {
            log << p.policy << ": R_T = " << format_number(p.mean_regret.back());
            if (p.fit)
                log << ", alpha = " << format_number(p.fit->alpha);
            log << '\n';
        }
        return static_cast<int>(exit_ok);
    });
}

int cmd_fit(const FitOptions& options, std::ostream& log)
{
    return guarded(log, [&] {
        std::ifstream in(options.curve_csv);
        if (!in)
            throw InvalidConfig("curve_csv", "cannot read " + options.curve_csv.string());
        const auto curve = read_curve_csv(in, options.column);
        const GrowthFit fit = fit_growth(curve, options.t_min);
        json doc = to_json(fit);
        doc["column"] = options.column;
        doc["t_min"] = options.t_min;
        if (options.out_path.has_parent_path())
            ensure_dir(options.out_path.parent_path());
        write_json(options.out_path, doc);
        log << "c2 = " << format_number(fit.c2) << " (r2 " << format_number(fit.r2_log2)
            << "), alpha = " << format_number(fit.alpha) << " (r2 " << format_number(fit.r2_power) << ")\n";
        return static_cast<int>(exit_ok);
    });
}

namespace {

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

} // namespace

int cli_main(int argc, char** argv)
{
    CLI::App app{"Demand-response baseline learning simulator"};
    app.require_subcommand(1);

    RunOptions run_opts;
    auto add_common = [&](CLI::App* sub, RunOptions& o) {
        sub->add_option("config", o.config_path, "Config JSON")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", o.out_dir, "Output directory");
        sub->add_option("--seed", o.seed, "Override the config seed");
        sub->add_option("--threads", o.threads, "Worker threads (default: available cores)");
        sub->add_option("--set", o.overrides, "Dotted-path override, e.g. market.delta_p=0.3");
    };

    auto* run_cmd = app.add_subcommand("run", "Simulate, compute regret and IR, write trajectory.csv and report.json");
    add_common(run_cmd, run_opts);

    CompareOptions cmp_opts;
    std::string policies_text = "ol-drm,averaging-etc";
    std::string grid_text = "250,500,1000,2000,4000";
    auto* cmp_cmd = app.add_subcommand("compare", "Compare SO policies over a horizon grid");
    add_common(cmp_cmd, cmp_opts.run);
    cmp_cmd->add_option("--policies", policies_text, "Comma-separated policy names");
    cmp_cmd->add_option("--t-grid", grid_text, "Comma-separated horizons");
    cmp_cmd->add_option("--t-min", cmp_opts.t_min, "Smallest t used by the growth fits");

    FitOptions fit_opts;
    auto* fit_cmd = app.add_subcommand("fit", "Fit growth models to a (t, value) CSV");
    fit_cmd->add_option("curve_csv", fit_opts.curve_csv, "Input CSV")->required();
    fit_cmd->add_option("--out", fit_opts.out_path, "Output JSON path");
    fit_cmd->add_option("--column", fit_opts.column, "Value column name");
    fit_cmd->add_option("--t-min", fit_opts.t_min, "Smallest t used by the fits");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(exit_invalid);
    }

    if (*run_cmd)
        return cmd_run(run_opts, std::cerr);
    if (*cmp_cmd) {
        cmp_opts.policies = split_list(policies_text);
        cmp_opts.t_grid.clear();
        for (const auto& item : split_list(grid_text)) {
            try {
                std::size_t used = 0;
                cmp_opts.t_grid.push_back(std::stoi(item, &used));
                if (used != item.size())
                    throw std::invalid_argument(item);
            } catch (const std::exception&) {
                std::cerr << "error: invalid t_grid entry '" << item << "'\n";
                return exit_invalid;
            }
        }
        if (cmp_opts.policies.empty()) {
            std::cerr << "error: invalid policies: need at least one policy\n";
            return exit_invalid;
        }
        return cmd_compare(cmp_opts, std::cerr);
    }
    return cmd_fit(fit_opts, std::cerr);
}

} // namespace drm
