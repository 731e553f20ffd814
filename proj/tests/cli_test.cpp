#include <gtest/gtest.h>

#include <filesystem>

#include "cvxspace/io.hpp"
#include "process.hpp"

namespace cvxspace {
namespace {

using testing::run_cli;

class Cli : public ::testing::Test {
protected:
    static void SetUpTestSuite()
    {
        dir = std::filesystem::temp_directory_path() / "cvxspace_cli_test";
        std::filesystem::create_directories(dir);
        for (const char* name : {"unit_square", "unit_edge_hexagon", "equilateral_triangle"})
            ASSERT_EQ(run_cli("body make --name " + std::string(name) + " --out " + file(name)).exit_code, 0);
    }
    static void TearDownTestSuite() { std::filesystem::remove_all(dir); }
    static std::string file(const std::string& name) { return (dir / (name + ".json")).string(); }
    static inline std::filesystem::path dir;
};

TEST_F(Cli, BmDistanceOfSquareAndHexagon)
{
    const auto r = run_cli("dist --metric bm --a " + file("unit_square") + " --b " + file("unit_edge_hexagon"));
    ASSERT_EQ(r.exit_code, 0);
    const json j = json::parse(r.output);
    EXPECT_NEAR(j["result"]["value"].get<double>(), std::log(1.5), 1e-3);
    EXPECT_EQ(j["command"], "dist");
    EXPECT_EQ(j["config"]["metric"], "bm");
    EXPECT_FALSE(j["cvxspace_version"].get<std::string>().empty());
    ASSERT_EQ(j["provenance"]["inputs"].size(), 2u);
    EXPECT_EQ(j["provenance"]["inputs"][0]["provenance"], "unit_square");
}

TEST_F(Cli, ThetaOfTheTriangle)
{
    const auto r = run_cli("density --functional theta --body " + file("equilateral_triangle"));
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_NEAR(json::parse(r.output)["result"]["value"].get<double>(), 1.5, 1e-2);
}

TEST_F(Cli, ConfigFileSetsDefaultsAndFlagsWin)
{
    const std::string cfg = (dir / "run.toml").string();
    write_text_file(cfg, "seed = 11\n[dist]\nmetric = \"hausdorff\"\n");
    const std::string args = "--config " + cfg + " dist --a " + file("unit_square") + " --b " + file("unit_edge_hexagon");
    const auto a = run_cli(args);
    ASSERT_EQ(a.exit_code, 0);
    const json ja = json::parse(a.output);
    EXPECT_EQ(ja["config"]["metric"], "hausdorff");
    EXPECT_EQ(ja["config"]["seed"], "11");
    const auto b = run_cli(args + " --metric bm");
    ASSERT_EQ(b.exit_code, 0);
    EXPECT_EQ(json::parse(b.output)["config"]["metric"], "bm");
}

TEST_F(Cli, UsageErrorsExitWithTwo)
{
    EXPECT_EQ(run_cli("dist --no-such-flag").exit_code, 2);
    EXPECT_EQ(run_cli("").exit_code, 2);
    EXPECT_EQ(run_cli("density --functional gamma --body " + file("unit_square")).exit_code, 2);
    const std::string bad = (dir / "bad.json").string();
    write_text_file(bad, R"({"vertices": [[0, 0], [1, 0]]})");
    const auto r = run_cli("body show --body " + bad, true);
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.output.find("at least 3 vertices"), std::string::npos);
}

TEST_F(Cli, ComputeErrorsExitWithOne)
{
    // phi needs a centrally symmetric body.
    EXPECT_EQ(run_cli("density --functional phi --body " + file("equilateral_triangle")).exit_code, 1);
}

TEST_F(Cli, ClockwiseInputWarns)
{
    const std::string cw = (dir / "cw.json").string();
    write_text_file(cw, R"({"vertices": [[0, 0], [0, 1], [1, 1], [1, 0]]})");
    const auto r = run_cli("body show --body " + cw, true);
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.output.find("warning: "), std::string::npos);
}

TEST_F(Cli, VersionFlag)
{
    const auto r = run_cli("--version");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_FALSE(r.output.empty());
}

}  // namespace
}  // namespace cvxspace
