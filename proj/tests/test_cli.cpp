#include "cli.hpp"
#include "csv.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

namespace fs = std::filesystem;
using namespace treelike::tools;

namespace {

fs::path scratch_dir(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("treelike_cli_" + name);
    fs::remove_all(p);
    return p;
}

int run(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr)
{
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

}  // namespace

TEST(Cli, GraphEdgeCountAndProvenance)
{
    const auto dir = scratch_dir("graph");
    std::string text;
    ASSERT_EQ(run({"graph", "--n", "8", "--out", dir.string()}, &text), Success);
    EXPECT_NE(text.find("edges 20"), std::string::npos);
    const auto t = read_csv(dir / "graph.csv");
    EXPECT_EQ(t.rows.size(), 28u);
    EXPECT_EQ(t.provenance.at("command"), "graph");
    EXPECT_EQ(t.provenance.at("n"), "8");
    EXPECT_EQ(t.provenance.at("boundary"), "periodic");
    std::size_t edges = 0;
    for (const auto& r : t.rows) edges += std::stod(r[t.column("coupling")]) != 0.0;
    EXPECT_EQ(edges, 20u);
}

TEST(Cli, MagnonAtTimeZero)
{
    const auto dir = scratch_dir("magnon");
    ASSERT_EQ(run({"magnon", "--n", "16", "--tmax", "0", "--out", dir.string()}), Success);
    const auto t = read_csv(dir / "magnon_occupation.csv");
    ASSERT_EQ(t.rows.size(), 16u);
    for (const auto& r : t.rows) {
        const double occ = std::stod(r[t.column("occupation")]);
        EXPECT_NEAR(occ, r[t.column("j")] == "8" ? 1.0 : 0.0, 1e-15);
    }
}

TEST(Cli, UsageErrors)
{
    std::string err;
    EXPECT_EQ(run({"graph", "--s", "abc"}, nullptr, &err), UsageError);
    EXPECT_NE(err.find("--s"), std::string::npos);
    EXPECT_EQ(run({"graph", "--bogus", "1"}), UsageError);
    EXPECT_EQ(run({}), UsageError);
    EXPECT_EQ(run({"graph", "--n", "12"}), UsageError);
    EXPECT_EQ(run({"magnon", "--n", "16", "--dt", "0", "--out", scratch_dir("bad").string()}), UsageError);
    EXPECT_EQ(run({"graph", "--config", "/nonexistent/file"}), UsageError);
}

TEST(Cli, ConfigFromProvenanceReproducesOutput)
{
    const auto a = scratch_dir("cfg_a");
    const auto b = scratch_dir("cfg_b");
    ASSERT_EQ(run({"magnon", "--n", "32", "--s", "-0.5", "--tmax", "2", "--dt", "0.1", "--out", a.string()}), Success);
    ASSERT_EQ(run({"magnon", "--config", (a / "magnon_thresholds.csv").string(), "--out", b.string()}), Success);
    for (const char* f : {"magnon_occupation.csv", "magnon_thresholds.csv"})
        EXPECT_EQ(read_file(a / f), read_file(b / f)) << f;
}

TEST(Cli, CommandLineOverridesConfig)
{
    const auto dir = scratch_dir("override");
    fs::create_directories(dir);
    {
        std::ofstream cfg(dir / "run.cfg");
        cfg << "# prose comment line\nn=16\ns=1.5\n";
    }
    ASSERT_EQ(run({"graph", "--config", (dir / "run.cfg").string(), "--n", "8", "--out", dir.string()}), Success);
    const auto t = read_csv(dir / "graph.csv");
    EXPECT_EQ(t.provenance.at("n"), "8");
    EXPECT_EQ(t.provenance.at("s"), "1.5");
}

TEST(Cli, ExpdesignSummary)
{
    const auto dir = scratch_dir("exp");
    std::string text;
    ASSERT_EQ(run({"expdesign", "--samples", "256", "--out", dir.string()}, &text), Success);
    EXPECT_NE(text.find("rho 0.991"), std::string::npos) << text;
    EXPECT_TRUE(fs::exists(dir / "expdesign_cooperativity.csv"));
    EXPECT_TRUE(fs::exists(dir / "expdesign_waveform.csv"));
}

TEST(Cli, LevelsAndOtocSmallRuns)
{
    const auto dir = scratch_dir("small");
    ASSERT_EQ(run({"levels", "--n", "8", "--out", dir.string()}), Success);
    EXPECT_EQ(read_csv(dir / "levels_ks.csv").rows.size(), 2u);
    ASSERT_EQ(run({"otoc-ed", "--n", "8", "--pairs", "0:1,0:4", "--tmax", "0.5", "--out", dir.string()}), Success);
    EXPECT_EQ(read_csv(dir / "otoc.csv").rows.size(), 12u);
    ASSERT_EQ(run({"quench-ee", "--n", "8", "--tmax", "0.5", "--families", "all", "--out", dir.string()}), Success);
    EXPECT_EQ(read_csv(dir / "quench_ee.csv").rows.size(), 3u);
}
