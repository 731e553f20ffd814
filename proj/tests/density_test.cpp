#include <gtest/gtest.h>

#include <random>

#include "cvxspace/analysis.hpp"
#include "cvxspace/density.hpp"
#include "support.hpp"

namespace cvxspace {
namespace {

using testing::random_affine;
using testing::random_polygon;
using testing::random_symmetric_polygon;
using testing::shoelace;

DensityOptions quick()
{
    DensityOptions d;
    d.cross_check = false;
    return d;
}

// Intersection of three symmetric supporting slabs, clipped from a large square.
double slab_area(const ConvexBody& c, double a1, double a2, double a3)
{
    std::vector<Vec2> poly{{-100, -100}, {100, -100}, {100, 100}, {-100, 100}};
    for (double a : {a1, a2, a3}) {
        const Vec2 u = unit(a);
        const double h = c.support(u);
        for (int side : {1, -1}) {
            const Vec2 n = u * side;
            std::vector<Vec2> out;
            for (std::size_t i = 0; i < poly.size(); ++i) {
                const Vec2 p = poly[i], q = poly[(i + 1) % poly.size()];
                const double fp = dot(n, p) - h, fq = dot(n, q) - h;
                if (fp <= 0)
                    out.push_back(p);
                if ((fp < 0) != (fq < 0))
                    out.push_back(p + (q - p) * (fp / (fp - fq)));
            }
            poly = out;
        }
    }
    return shoelace(poly);
}

// Hexagon on the boundary points at three polar angles and their antipodes.
double inscribed_area(const ConvexBody& c, double a1, double a2, double a3)
{
    const Gauge g(c);
    std::vector<Vec2> pts;
    for (double a : {a1, a2, a3}) {
        const Vec2 u = unit(a);
        pts.push_back(u / g(u));
        pts.push_back(-(u / g(u)));
    }
    return ConvexBody::hull_of(pts).area();
}

TEST(Delta, KnownValues)
{
    EXPECT_NEAR(delta_lattice(make_named_body(NamedBody::equilateral_triangle), quick()).value, 2.0 / 3.0, 1e-6);
    EXPECT_NEAR(delta_lattice(make_named_body(NamedBody::unit_square), quick()).value, 1.0, 1e-9);
    EXPECT_NEAR(delta_lattice(make_named_body(NamedBody::unit_edge_hexagon), quick()).value, 1.0, 1e-9);
    EXPECT_NEAR(delta_lattice(make_disk(256), quick()).value, kPi / std::sqrt(12.0), 2e-4);
}

TEST(Theta, KnownValues)
{
    EXPECT_NEAR(theta_lattice(make_named_body(NamedBody::unit_square), quick()).value, 1.0, 1e-9);
    EXPECT_NEAR(theta_lattice(make_named_body(NamedBody::unit_edge_hexagon), quick()).value, 1.0, 1e-9);
    EXPECT_NEAR(theta_lattice(make_disk(256), quick()).value, 2.0 * kPi / std::sqrt(27.0), 2e-4);
    const DensityReport t = theta_lattice(make_named_body(NamedBody::equilateral_triangle), quick());
    EXPECT_NEAR(t.value, 1.5, 3e-3);
    EXPECT_GE(t.value, 1.5 - 1e-6);
    EXPECT_TRUE(t.upper_bound);
}

TEST(Densities, CrossCheckAgreesOnTheOctagon)
{
    const ConvexBody oct = make_named_body(NamedBody::regular_octagon);
    DensityOptions d;
    d.search.starts = 6;
    const DensityReport dl = delta_lattice(oct, d);
    EXPECT_LE(dl.cross_check_gap, d.max_gap);
    const DensityReport th = theta_lattice(oct, d);
    EXPECT_LE(th.cross_check_gap, d.max_gap);
}

TEST(Densities, AffineInvariantAndOrdered)
{
    std::mt19937_64 rng(21);
    for (int t = 0; t < 15; ++t) {
        const ConvexBody k = random_symmetric_polygon(rng);
        const ConvexBody img = apply_affine(k, random_affine(rng, 0.5));
        const double d0 = delta_lattice(k, quick()).value, d1 = delta_lattice(img, quick()).value;
        const double t0 = theta_lattice(k, quick()).value, t1 = theta_lattice(img, quick()).value;
        EXPECT_NEAR(d0, d1, 2e-4);
        EXPECT_NEAR(t0, t1, 2e-4);
        EXPECT_LE(d0, 1.0);
        EXPECT_GE(t0, 1.0);
        // delta >= pi / sqrt(12) and theta <= 2 pi / sqrt(27) are attained by ellipses.
        EXPECT_GE(d0, kPi / std::sqrt(12.0) - 1e-6);
        EXPECT_LE(t0, 2.0 * kPi / std::sqrt(27.0) + 1e-6);
    }
}

TEST(Densities, ParallelogramsAndHexagonsTile)
{
    std::mt19937_64 rng(22);
    for (int t = 0; t < 10; ++t) {
        const ConvexBody base = make_named_body(t % 2 ? NamedBody::unit_edge_hexagon : NamedBody::unit_square);
        const ConvexBody k = apply_affine(base, random_affine(rng, 0.6));
        EXPECT_NEAR(delta_lattice(k, quick()).value, 1.0, 1e-6);
        EXPECT_NEAR(theta_lattice(k, quick()).value, 1.0, 1e-6);
    }
}

TEST(Hexagons, CircumscribedBeatsEverySlabTriple)
{
    std::mt19937_64 rng(23);
    for (int t = 0; t < 6; ++t) {
        const ConvexBody c = random_symmetric_polygon(rng).centered();
        const HexagonResult h = min_circumscribed_hexagon(c, quick());
        EXPECT_TRUE(h.hexagon.contains(c, 1e-9));
        EXPECT_NEAR(h.hexagon.area(), h.area, 1e-9);
        double brute = 1e300;
        const int n = 36;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                for (int k = j + 1; k < n; ++k)
                    brute = std::min(brute, slab_area(c, kPi * i / n, kPi * j / n, kPi * k / n));
        EXPECT_LE(h.area, brute + 1e-9);
    }
}

TEST(Hexagons, InscribedBeatsEveryBoundaryTriple)
{
    std::mt19937_64 rng(24);
    for (int t = 0; t < 6; ++t) {
        const ConvexBody c = random_symmetric_polygon(rng).centered();
        const HexagonResult h = max_inscribed_hexagon(c, quick());
        EXPECT_TRUE(c.contains(h.hexagon, 1e-9));
        double brute = 0.0;
        const int n = 36;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                for (int k = j + 1; k < n; ++k)
                    brute = std::max(brute, inscribed_area(c, kPi * i / n, kPi * j / n, kPi * k / n));
        EXPECT_GE(h.area, brute - 1e-9);
    }
}

TEST(Theta, LatticeSearchWinnerCoversGeneralBodies)
{
    std::mt19937_64 rng(25);
    DensityOptions d = quick();
    d.search = EvaluatorOptions::fast().theta.search;
    for (int t = 0; t < 3; ++t) {
        const ConvexBody k = random_polygon(rng, 7);
        const DensityReport r = theta_lattice(k, d);
        ASSERT_TRUE(r.lattice);
        EXPECT_TRUE(is_covering(k.translated(-k.centroid()), *r.lattice));
        EXPECT_NEAR(r.value, k.area() / r.lattice->det(), 1e-12);
        // Triangles are the worst case: theta <= 3/2.
        EXPECT_LE(r.value, 1.5 + 3e-3);
    }
}

TEST(Phi, SquareDiskAndSymmetryRequirement)
{
    DensityOptions d = quick();
    d.search = EvaluatorOptions::fast().phi.search;
    EXPECT_NEAR(phi_lattice(make_named_body(NamedBody::unit_square), d).value, 1.0, 1e-6);
    const DensityReport disk = phi_lattice(make_disk(128), d);
    EXPECT_NEAR(disk.value, 2.0 / std::sqrt(3.0), 3e-3);
    EXPECT_GE(disk.value, 1.0);
    EXPECT_THROW(phi_lattice(make_named_body(NamedBody::equilateral_triangle), d), Error);
}

TEST(Phi, WitnessLatticeIsInTheBodyFrame)
{
    DensityOptions d = quick();
    d.search = EvaluatorOptions::fast().phi.search;
    const ConvexBody k = apply_affine(make_named_body(NamedBody::regular_octagon), AffineMap2(Mat2{2.0, 0.3, 0.0, 0.5}, {}));
    const DensityReport r = phi_lattice(k, d);
    const Gauge g(k.centered());
    const double ratio = covering_radius(g, *r.lattice).value / packing_radius(g, *r.lattice);
    EXPECT_NEAR(ratio, r.value, 1e-3);
}

TEST(Inequalities, HoldOnNamedBodies)
{
    InequalityOptions io;
    io.density = quick();
    io.density.search = EvaluatorOptions::fast().phi.search;
    for (NamedBody b : {NamedBody::equilateral_triangle, NamedBody::regular_octagon, NamedBody::unit_square}) {
        const InequalityReport rep = inequality_suite(make_named_body(b), io);
        EXPECT_TRUE(rep.all_asserted_pass());
        for (const InequalityEntry& e : rep.entries) {
            if (e.name == "theta <= 1.25 sqrt(1 - delta)") {
                EXPECT_FALSE(e.asserted);
            }
        }
    }
    const InequalityReport sq = inequality_suite(make_named_body(NamedBody::unit_square), io);
    int equalities = 0;
    for (const InequalityEntry& e : sq.entries)
        equalities += e.name == "delta = 1" || e.name == "theta = 1";
    EXPECT_EQ(equalities, 2);
}

}  // namespace
}  // namespace cvxspace
