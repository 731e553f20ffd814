#include <gtest/gtest.h>

#include <random>

#include "cvxspace/lattice.hpp"
#include "support.hpp"

namespace cvxspace {
namespace {

using testing::random_polygon;
using testing::random_symmetric_polygon;

Lattice2 random_lattice(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (;;) {
        const Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
        if (std::abs(cross(a, b)) > 0.3)
            return {a, b};
    }
}

// Shortest nonzero gauge norm over a generous coefficient box.
double brute_packing(const ConvexBody& c, const Lattice2& l, int box = 12)
{
    const Gauge g(c);
    double best = 1e300;
    for (int m = -box; m <= box; ++m)
        for (int n = -box; n <= box; ++n)
            if (m != 0 || n != 0)
                best = std::min(best, g.brute(l.point(m, n)));
    return 0.5 * best;
}

// max over a fine grid of the fundamental cell of min_z g(x - z): a lower bound on rho'.
double grid_covering(const ConvexBody& c, const Lattice2& l, int steps = 120, int box = 4)
{
    const Gauge g(c);
    double worst = 0.0;
    for (int i = 0; i < steps; ++i)
        for (int j = 0; j < steps; ++j) {
            const Vec2 x = l.b1 * ((i + 0.5) / steps) + l.b2 * ((j + 0.5) / steps);
            double best = 1e300;
            for (int m = -box; m <= box; ++m)
                for (int n = -box; n <= box; ++n)
                    best = std::min(best, g.brute(x - l.point(m, n)));
            worst = std::max(worst, best);
        }
    return worst;
}

TEST(Lattice, RejectsSingularBasis)
{
    EXPECT_THROW(Lattice2({1.0, 2.0}, {2.0, 4.0}), Error);
    EXPECT_THROW(Lattice2({0.0, 0.0}, {1.0, 0.0}), Error);
}

TEST(Lattice, ReductionKeepsTheLattice)
{
    std::mt19937_64 rng(1);
    for (int t = 0; t < 300; ++t) {
        const Lattice2 l = random_lattice(rng);
        const Lattice2 r = reduce(l);
        EXPECT_NEAR(r.det(), l.det(), 1e-9 * l.det());
        // Reduced vectors have integer coordinates in the old basis and vice versa.
        for (Vec2 v : {r.b1, r.b2}) {
            const Vec2 c = l.coordinates(v);
            EXPECT_NEAR(c.x, std::round(c.x), 1e-7);
            EXPECT_NEAR(c.y, std::round(c.y), 1e-7);
        }
        EXPECT_LE(norm(r.b1), norm(r.b2) + 1e-12);
        EXPECT_LE(std::abs(dot(r.b1, r.b2)), 0.5 * norm2(r.b1) + 1e-9);
    }
}

TEST(Lattice, ParameterRoundTrip)
{
    std::mt19937_64 rng(2);
    for (int t = 0; t < 100; ++t) {
        const Lattice2 l = reduce(random_lattice(rng));
        const Lattice2 back = detail::lattice_from_params(detail::params_from_lattice(l)).scaled(norm(l.b1));
        const Lattice2 rb = reduce(back);
        EXPECT_NEAR(rb.det(), l.det(), 1e-9);
        const Vec2 c1 = l.coordinates(rb.b1), c2 = l.coordinates(rb.b2);
        for (double x : {c1.x, c1.y, c2.x, c2.y})
            EXPECT_NEAR(x, std::round(x), 1e-7);
    }
}

TEST(Gauge, MatchesBruteFormAndHomogeneity)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int t = 0; t < 30; ++t) {
        const ConvexBody c = random_polygon(rng);
        const ConvexBody cc = c.translated(-c.centroid());
        const Gauge g(cc);
        for (int i = 0; i < 50; ++i) {
            const Vec2 x{u(rng), u(rng)};
            EXPECT_NEAR(g(x), g.brute(x), 1e-12 * (1.0 + g.brute(x)));
            EXPECT_NEAR(g(x * 2.5), 2.5 * g(x), 1e-12 * (1.0 + g(x)));
        }
        for (const Vec2& v : cc.vertices())
            EXPECT_NEAR(g(v), 1.0, 1e-12);
    }
    EXPECT_THROW(Gauge(make_disk(16).translated({5.0, 0.0})), Error);
}

TEST(Packing, KnownRadii)
{
    // The unit square tiles with Z^2.
    EXPECT_NEAR(packing_radius(make_named_body(NamedBody::unit_square), Lattice2::integer()), 1.0, 1e-12);
    EXPECT_NEAR(packing_radius(make_disk(512), Lattice2::hexagonal(2.0)), 1.0, 1e-12);
}

TEST(Packing, MatchesEnumeration)
{
    std::mt19937_64 rng(4);
    for (int t = 0; t < 100; ++t) {
        const ConvexBody c = random_symmetric_polygon(rng);
        const Lattice2 l = random_lattice(rng);
        EXPECT_NEAR(packing_radius(c, l), brute_packing(c, l), 1e-9);
    }
}

TEST(Covering, KnownRadii)
{
    const CoveringResult sq = covering_radius(make_named_body(NamedBody::unit_square), Lattice2::integer());
    EXPECT_NEAR(sq.value, 1.0, 1e-4);
    const CoveringResult hx = covering_radius(make_disk(1024), Lattice2::hexagonal(1.0));
    EXPECT_NEAR(hx.value, 1.0 / std::sqrt(3.0), 1e-4);
    EXPECT_LE(hx.value, hx.upper);
}

TEST(Covering, BracketsTheGridOracle)
{
    std::mt19937_64 rng(5);
    for (int t = 0; t < 12; ++t) {
        const ConvexBody raw = t % 2 ? random_polygon(rng, 8) : random_symmetric_polygon(rng);
        const ConvexBody c = raw.translated(-raw.centroid());
        const Lattice2 l = random_lattice(rng);
        const CoveringResult r = covering_radius(c, l);
        const double grid = grid_covering(c, l);
        // The grid value is attained somewhere, so it cannot exceed the certified upper bracket;
        // a 120 x 120 grid misses the true maximum by at most lip * cell diameter.
        EXPECT_LE(grid, r.upper + 1e-12);
        EXPECT_GE(r.value, grid - 1e-12);
        EXPECT_LE(r.upper - r.value, 1e-4 + 1e-12);
        const double cell = std::max(norm(l.b1 + l.b2), norm(l.b1 - l.b2)) / 120.0;
        EXPECT_LE(r.value, grid + cell * Gauge(c).lipschitz());
    }
}

TEST(Covering, IsCoveringAgreesWithRadius)
{
    const ConvexBody sq = make_named_body(NamedBody::unit_square);
    EXPECT_TRUE(is_covering(sq, Lattice2::integer()));
    EXPECT_FALSE(is_covering(sq, Lattice2::integer().scaled(1.01)));
    EXPECT_TRUE(is_packing(sq, Lattice2::integer()));
    EXPECT_FALSE(is_packing(sq, Lattice2::integer().scaled(0.99)));
}

TEST(Search, DensestPackingOfDiskAndSquare)
{
    LatticeSearchOptions o;
    o.starts = 12;
    const LatticeOptimum disk = optimize_lattice(make_disk(256), LatticeObjective::densest_packing, o);
    EXPECT_NEAR(disk.value, kPi / std::sqrt(12.0), 2e-3);
    const LatticeOptimum sq = optimize_lattice(make_named_body(NamedBody::unit_square), LatticeObjective::densest_packing, o);
    EXPECT_NEAR(sq.value, 1.0, 1e-6);
    EXPECT_NEAR(disk.packing, 1.0, 1e-9);
    EXPECT_TRUE(is_packing(make_disk(256), disk.lattice.scaled(1.0 + 1e-9)));
}

TEST(Search, CoveringWinnerCovers)
{
    LatticeSearchOptions o;
    o.starts = 8;
    const ConvexBody tri = make_named_body(NamedBody::equilateral_triangle);
    const LatticeOptimum r = optimize_lattice(tri, LatticeObjective::thinnest_covering, o);
    EXPECT_NEAR(r.value, 1.5, 1e-2);
    // Density at the upper bracket bounds the true density of the winner, which is >= 3/2.
    EXPECT_GE(r.value * r.covering_upper * r.covering_upper, 1.5 - 1e-9);
    EXPECT_TRUE(is_covering(tri, r.lattice.scaled(1.0 / r.covering_upper)));
}

TEST(Search, SeededRunsAreReproducible)
{
    LatticeSearchOptions o;
    o.starts = 4;
    o.seed = 17;
    const ConvexBody k = make_named_body(NamedBody::regular_octagon);
    const LatticeOptimum a = optimize_lattice(k, LatticeObjective::densest_packing, o);
    const LatticeOptimum b = optimize_lattice(k, LatticeObjective::densest_packing, o);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.lattice.b1.x, b.lattice.b1.x);
    EXPECT_EQ(a.lattice.b2.y, b.lattice.b2.y);
}

}  // namespace
}  // namespace cvxspace
