#include <gtest/gtest.h>

#include <random>

#include "cvxspace/banach_mazur.hpp"
#include "cvxspace/hausdorff.hpp"
#include "cvxspace/john.hpp"
#include "support.hpp"

namespace cvxspace {
namespace {

using testing::random_affine;
using testing::random_polygon;
using testing::random_symmetric_polygon;

double segment_distance(Vec2 p, Vec2 a, Vec2 b)
{
    const Vec2 ab = b - a;
    const double t = std::clamp(dot(p - a, ab) / dot(ab, ab), 0.0, 1.0);
    return norm(p - (a + ab * t));
}

bool inside(const ConvexBody& k, Vec2 p)
{
    for (std::size_t i = 0; i < k.size(); ++i)
        if (cross(k.vertex(i + 1) - k.vertex(i), p - k.vertex(i)) < 0.0)
            return false;
    return true;
}

// Vertex-to-boundary distances: the distance to a convex set is convex, so the one-sided
// deviation is attained at a vertex.
double brute_hausdorff(const ConvexBody& a, const ConvexBody& b)
{
    auto one_sided = [](const ConvexBody& p, const ConvexBody& q) {
        double worst = 0.0;
        for (const Vec2& v : p.vertices()) {
            if (inside(q, v))
                continue;
            double best = 1e300;
            for (std::size_t i = 0; i < q.size(); ++i)
                best = std::min(best, segment_distance(v, q.vertex(i), q.vertex(i + 1)));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(one_sided(a, b), one_sided(b, a));
}

// max_u |h_K(u) - h_L(u)| over a fine direction grid (a lower bound converging from below).
double support_hausdorff(const ConvexBody& a, const ConvexBody& b, int dirs = 20000)
{
    double worst = 0.0;
    for (int i = 0; i < dirs; ++i) {
        const Vec2 u = unit(2.0 * kPi * i / dirs);
        worst = std::max(worst, std::abs(a.support(u) - b.support(u)));
    }
    return worst;
}

TEST(Hausdorff, MatchesVertexOracleAndSupportOracle)
{
    std::mt19937_64 rng(3);
    for (int t = 0; t < 200; ++t) {
        const ConvexBody a = random_polygon(rng), b = random_polygon(rng);
        const HausdorffResult h = hausdorff(a, b);
        EXPECT_NEAR(h.value, brute_hausdorff(a, b), 1e-12);
        if (t < 30) {
            const double s = support_hausdorff(a, b);
            EXPECT_LE(s, h.value + 1e-12);
            EXPECT_GE(s, h.value - 1e-3);
        }
        EXPECT_EQ(h.status, DistanceStatus::exact);
        EXPECT_NEAR(norm(h.witness.vertex - h.witness.nearest), h.value, 1e-12);
    }
}

TEST(Hausdorff, TranslatesAndConcentricDisks)
{
    const ConvexBody d = make_disk(64);
    EXPECT_NEAR(hausdorff(d, d.translated({0.3, -0.4})).value, 0.5, 1e-12);
    const ConvexBody d2 = make_disk(64, 1.75);
    EXPECT_NEAR(hausdorff(d, d2).value, 0.75, 1e-12);
    EXPECT_EQ(hausdorff(d, d).value, 0.0);
}

TEST(Hausdorff, MetricAxiomsOnRandomTriples)
{
    std::mt19937_64 rng(5);
    for (int t = 0; t < 100; ++t) {
        const ConvexBody a = random_polygon(rng), b = random_polygon(rng), c = random_polygon(rng);
        const double ab = hausdorff(a, b).value, bc = hausdorff(b, c).value, ac = hausdorff(a, c).value;
        EXPECT_NEAR(ab, hausdorff(b, a).value, 1e-14);
        EXPECT_LE(ac, ab + bc + 1e-12);
        EXPECT_GT(ab, 0.0);
    }
}

TEST(Hausdorff, NearestPointIsOnBoundaryOrInside)
{
    const ConvexBody sq = make_named_body(NamedBody::unit_square);
    EXPECT_NEAR(distance_to(sq, {1.5, 0.0}), 1.0, 1e-14);
    EXPECT_NEAR(distance_to(sq, {1.5, 1.5}), std::sqrt(2.0), 1e-14);
    EXPECT_EQ(distance_to(sq, {0.1, 0.2}), 0.0);
}

TEST(BanachMazur, SquareHexagonIsLogThreeHalves)
{
    const BmResult r = bm_distance(make_named_body(NamedBody::unit_square), make_named_body(NamedBody::unit_edge_hexagon));
    EXPECT_NEAR(r.value, std::log(1.5), 1e-3);
    EXPECT_GE(r.value, std::log(1.5) - 1e-9);
    EXPECT_TRUE(bm_replay_ok(make_named_body(NamedBody::unit_square), make_named_body(NamedBody::unit_edge_hexagon), r.witness));
}

TEST(BanachMazur, JohnRatiosForSimplexAndCube)
{
    // The John sandwich is tight for the triangle (ratio 2) and the square (ratio sqrt 2); the
    // 512-gon stands in for the disk.
    const ConvexBody disk = make_disk(512);
    const double slack = -std::log(std::cos(kPi / 512));
    const BmResult t = bm_distance(make_named_body(NamedBody::equilateral_triangle), disk);
    EXPECT_NEAR(t.value, std::log(2.0), 1e-3 + slack);
    const BmResult s = bm_distance(make_named_body(NamedBody::unit_square), disk);
    EXPECT_NEAR(s.value, 0.5 * std::log(2.0), 1e-3 + slack);
}

TEST(BanachMazur, AffineImagesAreAtZero)
{
    std::mt19937_64 rng(8);
    for (int t = 0; t < 20; ++t) {
        const ConvexBody k = random_polygon(rng, 9);
        const ConvexBody img = apply_affine(k, random_affine(rng, 0.6));
        BmOptions o;
        o.seed = t;
        const BmResult r = bm_distance(k, img, o);
        EXPECT_LT(r.value, 1e-5) << "trial " << t;
        EXPECT_TRUE(bm_replay_ok(k, img, r.witness));
    }
}

TEST(BanachMazur, SymmetricInArgumentsWithinSolverAccuracy)
{
    std::mt19937_64 rng(9);
    for (int t = 0; t < 10; ++t) {
        const ConvexBody a = random_symmetric_polygon(rng), b = random_polygon(rng, 8);
        const double ab = bm_distance(a, b).value, ba = bm_distance(b, a).value;
        EXPECT_NEAR(ab, ba, 2e-3);
    }
}

TEST(BanachMazur, WitnessesReplayAndBoundsAreOrdered)
{
    std::mt19937_64 rng(10);
    for (int t = 0; t < 30; ++t) {
        const ConvexBody a = random_polygon(rng, 10), b = random_polygon(rng, 10);
        BmOptions o;
        o.seed = t;
        const BmResult r = bm_distance(a, b, o);
        EXPECT_TRUE(bm_replay_ok(a, b, r.witness));
        EXPECT_NEAR(std::log(r.witness.r), r.value, 1e-12);
        EXPECT_LE(r.value, std::log(r.witness.identity_ratio) + 1e-9);
        EXPECT_EQ(r.status, DistanceStatus::upper_bound);
        // K1 <= sigma(K2) <= r K1 + x gives 1 <= |sigma K2| / |K1| <= r^2.
        const double ar = std::abs(r.witness.sigma.det()) * b.area() / a.area();
        EXPECT_GE(r.witness.r * r.witness.r, ar - 1e-9);
        EXPECT_GE(ar, 1.0 - 1e-9);
    }
}

TEST(BanachMazur, BoundedByTwiceHausdorffInNormalizedSpace)
{
    std::mt19937_64 rng(11);
    for (int t = 0; t < 30; ++t) {
        const ConvexBody k1 = john_normalize(random_polygon(rng)).body, k2 = john_normalize(random_polygon(rng)).body;
        const double h = hausdorff(k1, k2).value;
        const double seeded = bm_bound_from_hausdorff(k1, k2);
        EXPECT_LE(seeded, 2.0 * h + 1e-12);
        const double s = 1.0 + h;
        EXPECT_LE(bm_replay_violation(k1, k2, AffineMap2::scaling(s), {0.0, 0.0}, s * s), 1e-9);
        BmOptions o;
        o.seed = t;
        EXPECT_LE(bm_distance(k1, k2, o).value, seeded + 1e-9);
    }
    EXPECT_THROW(bm_bound_from_hausdorff(make_disk(32, 0.5), make_disk(32)), Error);
}

TEST(BanachMazur, ReplayRejectsAWrongWitness)
{
    const ConvexBody a = make_named_body(NamedBody::unit_square), b = make_named_body(NamedBody::unit_edge_hexagon);
    BmWitness w;
    w.r = 1.2;
    EXPECT_FALSE(bm_replay_ok(a, b, w));
}

}  // namespace
}  // namespace cvxspace
