// Acceptance suite: one pass/fail line per criterion. Golden values go through the
// command-line tool, one call per value.

#include <filesystem>
#include <iostream>

#include "cvxspace/io.hpp"
#include "cvxspace/verify.hpp"
#include "process.hpp"

using namespace cvxspace;

namespace {

std::filesystem::path scratch()
{
    static const std::filesystem::path dir = [] {
        auto d = std::filesystem::temp_directory_path() / "cvxspace-acceptance";
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

std::string make_body(const std::string& name, int resolution, std::string& error)
{
    const std::string path = (scratch() / (name + "_" + std::to_string(resolution) + ".json")).string();
    const auto r = testing::run_cli("body make --name " + name + " --resolution " + std::to_string(resolution) +
                                    " --out " + path, true);
    if (r.exit_code != 0)
        error = "body make " + name + ": " + r.output;
    return path;
}

GoldenOutcome run_golden_via_cli(const GoldenCase& c)
{
    GoldenOutcome out;
    const std::string a = make_body(c.body, c.resolution, out.error);
    std::string args;
    if (c.command == "dist")
        args = "dist --metric " + c.what + " --a " + a + " --b " + make_body(c.body_b, c.resolution, out.error);
    else
        args = "density --functional " + c.what + " --body " + a;
    if (!out.error.empty())
        return out;
    const auto r = testing::run_cli(args);
    out.seconds = r.seconds;
    if (r.exit_code != 0) {
        out.error = "exit code " + std::to_string(r.exit_code);
        return out;
    }
    try {
        out.value = json::parse(r.output).at("result").at("value").get<double>();
    } catch (const std::exception& e) {
        out.error = std::string("unreadable output: ") + e.what();
    }
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    SuiteOptions so;
    so.golden = run_golden_via_cli;
    so.scratch = (scratch() / "nets").string();
    for (int i = 1; i < argc; ++i)
        so.only.insert(std::atoi(argv[i]));
    so.on_result = [](const CriterionResult& r) { std::cout << format_criterion(r) << std::flush; };
    const std::vector<CriterionResult> res = run_paper_suite(so);
    std::size_t passed = 0;
    for (const CriterionResult& r : res)
        passed += r.pass;
    std::cout << passed << "/" << res.size() << " criteria passed\n";
    std::filesystem::remove_all(scratch());
    return passed == res.size() ? 0 : 1;
}
