#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace drm {

/// Process exit codes.
enum ExitCode : int {
    exit_ok = 0,
    exit_invalid = 1,  // bad config, unknown policy, bad CSV, too little data
    exit_singular = 2, // price history without spread
    exit_internal = 3,
};

struct RunOptions {
    std::filesystem::path config_path;
    std::filesystem::path out_dir = ".";
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0; // 0: available cores
};

struct CompareOptions {
    RunOptions run;
    std::vector<std::string> policies{"ol-drm", "averaging-etc"};
    std::vector<int> t_grid{250, 500, 1000, 2000, 4000};
    double t_min = 50.0;
};

struct FitOptions {
    std::filesystem::path curve_csv;
    std::filesystem::path out_path = "fit.json";
    std::string column = "cumulative_regret";
    double t_min = 50.0;
};

int cmd_run(const RunOptions& options, std::ostream& log);
int cmd_compare(const CompareOptions& options, std::ostream& log);
int cmd_fit(const FitOptions& options, std::ostream& log);

int cli_main(int argc, char** argv);

} // namespace drm
