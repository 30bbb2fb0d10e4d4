#include "drm/config_io.hpp"
#include "drm/errors.hpp"
#include "drm/report_io.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace drm;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code = -1;
    std::string output;
};

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("drm_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Result sim(const std::string& args, const fs::path& dir)
{
    const fs::path log = dir / "stderr.txt";
    const std::string cmd = std::string(DRM_SIM_EXE) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    r.output = ss.str();
    return r;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path write_config(const fs::path& dir, const json& doc)
{
    const fs::path p = dir / "config.json";
    std::ofstream(p) << doc.dump(2);
    return p;
}

json minimal()
{
    return json::parse(R"({
      "schema_version": 1,
      "market": {"c": 2.0, "delta_p": 0.5, "m": 2, "T": 60},
      "consumers": [{"a": 3.0, "d": 2.0, "noise_sd": 0.1}],
      "n_replications": 8
    })");
}

const std::string demo = std::string(DRM_SOURCE_DIR) + "/configs/demo.json";

} // namespace

TEST(Config, ParsesMinimal)
{
    const auto cfg = parse_config(minimal());
    EXPECT_EQ(cfg.market.T, 60);
    EXPECT_EQ(cfg.market.n_consumers, 1);
    EXPECT_EQ(cfg.market.p0, 1.0);
    EXPECT_EQ(cfg.consumers[0].d, 2.0);
    EXPECT_EQ(cfg.seed, 42u);
}

TEST(Config, RejectsUnknownFieldsByName)
{
    auto doc = minimal();
    doc["market"]["deltap"] = 0.1;
    try {
        parse_config(doc);
        FAIL();
    } catch (const InvalidConfig& e) {
        EXPECT_EQ(e.field(), "market.deltap");
    }
}

TEST(Config, OverridesWithDottedPaths)
{
    auto doc = minimal();
    apply_override(doc, "market.delta_p=0.3");
    apply_override(doc, "consumers.0.d=4");
    apply_override(doc, "so_policy.kind=averaging-etc");
    const auto cfg = parse_config(doc);
    EXPECT_EQ(cfg.market.delta_p, 0.3);
    EXPECT_EQ(cfg.consumers[0].d, 4.0);
    EXPECT_EQ(cfg.so_policy.kind, SoKind::averaging_etc);
    EXPECT_THROW(apply_override(doc, "consumers.5.d=1"), InvalidConfig);
    EXPECT_THROW(apply_override(doc, "no_equals"), InvalidConfig);
}

TEST(Config, RoundTrips)
{
    const auto cfg = standard_config(321);
    const auto back = parse_config(to_json(cfg));
    EXPECT_EQ(to_json(back), to_json(cfg));
}

TEST(Config, ShippedConfigsLoad)
{
    EXPECT_NO_THROW(load_config(demo));
    const auto standard = load_config(std::string(DRM_SOURCE_DIR) + "/configs/standard.json");
    EXPECT_EQ(to_json(standard), to_json(standard_config(1000)));
}

TEST(CurveCsv, ReportsLineNumbers)
{
    std::istringstream ok("t,x,cumulative_regret\n1,0,2.5\n2,0,3\n");
    const auto pts = read_curve_csv(ok);
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_EQ(pts[1].value, 3.0);
    std::istringstream bad("t,cumulative_regret\n1,2\n2,abc\n");
    try {
        read_curve_csv(bad);
        FAIL();
    } catch (const InvalidConfig& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
}

TEST(CmdRun, MinimalConfigWritesOutputs)
{
    const auto dir = scratch("run_ok");
    const auto cfg = write_config(dir, minimal());
    const auto r = sim("run " + cfg.string() + " --out " + (dir / "out").string(), dir);
    EXPECT_EQ(r.code, 0) << r.output;
    EXPECT_TRUE(fs::exists(dir / "out" / "trajectory.csv"));
    EXPECT_TRUE(fs::exists(dir / "out" / "report.json"));
    const auto report = json::parse(slurp(dir / "out" / "report.json"));
    EXPECT_TRUE(report["metadata"].contains("generated_at"));
    EXPECT_NEAR(report["regret"]["decomposition"]["sum"].get<double>(), report["regret"]["regret"].get<double>(),
                1e-6 * std::max(1.0, std::abs(report["regret"]["regret"].get<double>())));
}

TEST(CmdRun, ZeroPerturbationExitsTwo)
{
    const auto dir = scratch("run_singular");
    const auto cfg = write_config(dir, minimal());
    const auto r = sim("run " + cfg.string() + " --set market.delta_p=0 --out " + dir.string(), dir);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("price perturbation delta_p must be > 0"), std::string::npos) << r.output;
}

TEST(CmdRun, NegativeCurvatureExitsOneNamingField)
{
    const auto dir = scratch("run_invalid");
    auto doc = minimal();
    doc["consumers"][0]["d"] = -1;
    const auto cfg = write_config(dir, doc);
    const auto r = sim("run " + cfg.string() + " --out " + dir.string(), dir);
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.output.find("consumers[0].d"), std::string::npos) << r.output;
}

TEST(CmdRun, ByteIdenticalAcrossThreadCounts)
{
    const auto dir = scratch("run_threads");
    const auto cfg = write_config(dir, minimal());
    ASSERT_EQ(sim("run " + cfg.string() + " --threads 1 --out " + (dir / "a").string(), dir).code, 0);
    ASSERT_EQ(sim("run " + cfg.string() + " --threads 4 --out " + (dir / "b").string(), dir).code, 0);
    EXPECT_EQ(slurp(dir / "a" / "trajectory.csv"), slurp(dir / "b" / "trajectory.csv"));
    auto ra = json::parse(slurp(dir / "a" / "report.json"));
    auto rb = json::parse(slurp(dir / "b" / "report.json"));
    ra.erase("metadata");
    rb.erase("metadata");
    EXPECT_EQ(ra, rb);
}

TEST(CmdCompare, DemoConfigReportsBothExponents)
{
    const auto dir = scratch("compare_ok");
    const auto r = sim("compare " + demo + " --out " + dir.string(), dir);
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_TRUE(fs::exists(dir / "comparison.csv"));
    const auto summary = json::parse(slurp(dir / "summary.json"));
    ASSERT_EQ(summary["policies"].size(), 2u);
    for (const auto& p : summary["policies"])
        EXPECT_TRUE(p["alpha"].is_number()) << p["policy"];
}

TEST(CmdCompare, UnknownPolicyListsValidNames)
{
    const auto dir = scratch("compare_policy");
    const auto r = sim("compare " + demo + " --policies ol-drm,greedy --out " + dir.string(), dir);
    EXPECT_EQ(r.code, 1);
    for (const auto& n : {"ol-drm", "averaging-etc", "averaging-etc-sqrt"})
        EXPECT_NE(r.output.find(n), std::string::npos) << r.output;
}

TEST(CmdCompare, EmptyGridExitsOne)
{
    const auto dir = scratch("compare_grid");
    const auto r = sim("compare " + demo + " --t-grid '' --out " + dir.string(), dir);
    EXPECT_EQ(r.code, 1) << r.output;
}

TEST(CmdFit, FitsRunOutput)
{
    const auto dir = scratch("fit_ok");
    const auto cfg = write_config(dir, minimal());
    ASSERT_EQ(sim("run " + cfg.string() + " --set market.T=400 --out " + dir.string(), dir).code, 0);
    const auto r = sim("fit " + (dir / "trajectory.csv").string() + " --out " +
                           (dir / "fit.json").string(),
                       dir);
    EXPECT_EQ(r.code, 0) << r.output;
    const auto fit = json::parse(slurp(dir / "fit.json"));
    EXPECT_TRUE(fit["log2_model"]["c2"].is_number());
}

TEST(CmdFit, MalformedRowReportsLine)
{
    const auto dir = scratch("fit_bad");
    std::ofstream(dir / "c.csv") << "t,cumulative_regret\n50,1\n60,2\n70,x\n";
    const auto r = sim("fit " + (dir / "c.csv").string() + " --out " + (dir / "f.json").string(), dir);
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.output.find("line 4"), std::string::npos) << r.output;
}

TEST(CmdFit, ThreeRowsInsufficient)
{
    const auto dir = scratch("fit_short");
    std::ofstream(dir / "c.csv") << "t,cumulative_regret\n100,1\n200,2\n300,3\n";
    const auto r = sim("fit " + (dir / "c.csv").string() + " --out " + (dir / "f.json").string(), dir);
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.output.find("insufficient"), std::string::npos) << r.output;
}
