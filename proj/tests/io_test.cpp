#include <gtest/gtest.h>

#include <filesystem>
#include <functional>
#include <optional>
#include <random>

#include "cvxspace/io.hpp"
#include "support.hpp"

namespace cvxspace {
namespace {

using testing::random_polygon;

std::string temp_path(const std::string& name)
{
    return (std::filesystem::temp_directory_path() / ("cvxspace_io_test_" + name)).string();
}

std::optional<ErrorKind> kind_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return std::nullopt;
}

std::string message_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

TEST(BodyIo, RoundTripIsBitExact)
{
    std::mt19937_64 rng(51);
    const std::string path = temp_path("roundtrip.json");
    for (int t = 0; t < 50; ++t) {
        const ConvexBody k = random_polygon(rng).with_provenance("trial " + std::to_string(t));
        write_body_file(path, k);
        const ParsedBody back = parse_body_file_checked(path);
        EXPECT_TRUE(back.warnings.empty());
        ASSERT_EQ(back.body.size(), k.size());
        for (std::size_t i = 0; i < k.size(); ++i) {
            EXPECT_EQ(back.body.vertex(i).x, k.vertex(i).x);
            EXPECT_EQ(back.body.vertex(i).y, k.vertex(i).y);
        }
        EXPECT_EQ(back.body.provenance(), k.provenance());
        EXPECT_EQ(back.body.symmetric(), k.symmetric());
    }
    std::filesystem::remove(path);
}

TEST(BodyIo, SchemaErrorsNameTheProblem)
{
    auto parse = [](const std::string& text) { return body_from_json(json::parse(text)); };
    EXPECT_EQ(kind_of([&] { parse(R"({"vertices": [[0, 0], [1, 0]]})"); }), ErrorKind::schema);
    EXPECT_NE(message_of([&] { parse(R"({"vertices": [[0, 0], [1, 0]]})"); }).find("at least 3 vertices required, found 2"),
              std::string::npos);
    EXPECT_EQ(kind_of([&] { parse(R"({"points": []})"); }), ErrorKind::schema);
    EXPECT_EQ(kind_of([&] { parse(R"({"vertices": [[0, 0], [1, "a"], [0, 1]]})"); }), ErrorKind::schema);
    EXPECT_EQ(kind_of([&] { parse(R"([1, 2, 3])"); }), ErrorKind::schema);
    EXPECT_EQ(kind_of([&] { parse(R"({"vertices": [[0, 0], [1, 0], [0, 1]], "symmetric": "yes"})"); }), ErrorKind::schema);
    EXPECT_NE(message_of([&] { parse(R"({"vertices": [[0, 0], [1, 0], [1, 0], [0, 1]]})"); }).find("duplicate"),
              std::string::npos);
    EXPECT_NE(message_of([&] { parse(R"({"vertices": [[0, 0], [2, 0], [1, 0.2], [2, 2], [0, 2]]})"); }).find("convex"),
              std::string::npos);
    // A claimed symmetric flag is verified.
    EXPECT_EQ(kind_of([&] { parse(R"({"vertices": [[0, 0], [1, 0], [0, 1]], "symmetric": true})"); }), ErrorKind::schema);
}

TEST(BodyIo, ClockwiseInputIsReorientedWithAWarning)
{
    const ParsedBody p = body_from_json(json::parse(R"({"vertices": [[0, 0], [0, 1], [1, 1], [1, 0]]})"));
    ASSERT_EQ(p.warnings.size(), 1u);
    EXPECT_NE(p.warnings.front().find("clockwise"), std::string::npos);
    EXPECT_GT(p.body.area(), 0.0);
    EXPECT_TRUE(p.body.symmetric());
}

TEST(BodyIo, MalformedAndMissingFiles)
{
    const std::string path = temp_path("broken.json");
    write_text_file(path, "{\"vertices\": [[0, 0], [1, 0]");
    EXPECT_NE(message_of([&] { parse_body_file(path); }).find("malformed JSON"), std::string::npos);
    std::filesystem::remove(path);
    EXPECT_EQ(kind_of([&] { parse_body_file(temp_path("does_not_exist.json")); }), ErrorKind::schema);
}

TEST(NetIo, RoundTripKeepsMembersAndConstruction)
{
    const Net net = build_net(0.5, NetMetric::hausdorff_star, 7);
    const std::string path = temp_path("net.json");
    write_net_file(path, net, {{"cvxspace_version", "test"}});
    const Net back = read_net_file(path);
    EXPECT_EQ(back.metric, net.metric);
    EXPECT_EQ(back.beta, net.beta);
    EXPECT_EQ(back.seed, net.seed);
    EXPECT_EQ(back.construction.key(), net.construction.key());
    EXPECT_EQ(back.construction.proven_bound, net.construction.proven_bound);
    ASSERT_EQ(back.size(), net.size());
    for (std::size_t i = 0; i < net.size(); ++i) {
        ASSERT_EQ(back.bodies[i].size(), net.bodies[i].size());
        for (std::size_t j = 0; j < net.bodies[i].size(); ++j)
            EXPECT_EQ(back.bodies[i].vertex(j).x, net.bodies[i].vertex(j).x);
    }
    EXPECT_TRUE(back.cell_member.empty());
    EXPECT_EQ(read_json_file(path).at("cvxspace_version"), "test");
    std::filesystem::remove(path);
    EXPECT_EQ(kind_of([&] { net_from_json(json::parse(R"({"metric": "hstar"})")); }), ErrorKind::schema);
}

TEST(Format, SeventeenDigitsSurvive)
{
    std::mt19937_64 rng(52);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) / 3.0;
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
}

}  // namespace
}  // namespace cvxspace
