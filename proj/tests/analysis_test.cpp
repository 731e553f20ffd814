#include <gtest/gtest.h>

#include <random>

#include "cvxspace/analysis.hpp"
#include "support.hpp"

namespace cvxspace {
namespace {

using testing::random_affine;
using testing::random_polygon;
using testing::random_symmetric_polygon;

TEST(RatioEstimate, SkipsZeroDistancesAndTakesTheMax)
{
    EXPECT_DOUBLE_EQ(ratio_estimate(1.0, {1.5, 0.8, 7.0}, {0.5, 0.1, 0.0}), 2.0);
    EXPECT_EQ(ratio_estimate(1.0, {}, {}), 0.0);
}

TEST(RatioEstimate, ScalesLinearlyAndIgnoresOffsets)
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-2.0, 2.0), pos(0.01, 1.0);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> v(8), d(8);
        for (int i = 0; i < 8; ++i) {
            v[i] = u(rng);
            d[i] = pos(rng);
        }
        const double f0 = u(rng), s = pos(rng) * 5.0, off = u(rng);
        const double base = ratio_estimate(f0, v, d);
        std::vector<double> vs = v, vo = v, ds = d;
        for (int i = 0; i < 8; ++i) {
            vs[i] *= s;
            vo[i] += off;
            ds[i] *= s;
        }
        EXPECT_NEAR(ratio_estimate(f0 * s, vs, d), s * base, 1e-12 * (1.0 + s * base));
        EXPECT_NEAR(ratio_estimate(f0 + off, vo, d), base, 1e-9 * (1.0 + base));
        EXPECT_NEAR(ratio_estimate(f0, v, ds), base / s, 1e-12 * (1.0 + base / s));
        // Each sample ratio is a lower bound.
        for (int i = 0; i < 8; ++i)
            EXPECT_LE(std::abs(v[i] - f0) / d[i], base + 1e-12);
    }
}

TEST(Caps, TableValues)
{
    EXPECT_EQ(*supderivative_cap(FunctionalId::delta_l, MetricKind::hausdorff), 4.0);
    EXPECT_EQ(*supderivative_cap(FunctionalId::theta_l, MetricKind::hausdorff), 4.0);
    EXPECT_EQ(*supderivative_cap(FunctionalId::delta_l, MetricKind::bm), 2.0);
    EXPECT_EQ(*supderivative_cap(FunctionalId::theta_l, MetricKind::bm), 2.0);
    EXPECT_EQ(*supderivative_cap(FunctionalId::phi_l, MetricKind::bm), 1.0);
    EXPECT_FALSE(supderivative_cap(FunctionalId::phi_l, MetricKind::hausdorff));
    EXPECT_DOUBLE_EQ(radius_limit(FunctionalId::theta_l, MetricKind::hausdorff), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(radius_limit(FunctionalId::delta_l, MetricKind::bm), 0.25);
    EXPECT_DOUBLE_EQ(radius_limit(FunctionalId::phi_l, MetricKind::bm), 0.5);
}

TEST(LipschitzTable, Constants)
{
    auto check = [](FunctionalId f, MetricKind m, double c, double d) {
        const auto k = lipschitz_constants(f, m);
        ASSERT_TRUE(k);
        EXPECT_DOUBLE_EQ(k->c, c);
        EXPECT_DOUBLE_EQ(k->d, d);
    };
    check(FunctionalId::theta_l, MetricKind::hausdorff, 12.0, 1.0 / 3.0);
    check(FunctionalId::delta_l, MetricKind::hausdorff, 8.0, 1.0 / 3.0);
    check(FunctionalId::theta_l, MetricKind::bm, 6.0, 0.25);
    check(FunctionalId::delta_l, MetricKind::bm, 4.0, 0.25);
    check(FunctionalId::phi_l, MetricKind::bm, 2.5, 0.5);
    EXPECT_FALSE(lipschitz_constants(FunctionalId::phi_l, MetricKind::hausdorff));
}

TEST(Parsing, NamesRoundTripAndUnknownNamesThrow)
{
    for (FunctionalId f : {FunctionalId::delta_l, FunctionalId::theta_l, FunctionalId::phi_l})
        EXPECT_EQ(parse_functional_id(to_string(f)), f);
    EXPECT_EQ(parse_metric("hausdorff"), MetricKind::hausdorff);
    EXPECT_EQ(parse_growth_bound("T3"), GrowthBound::bm_exponential);
    EXPECT_THROW(parse_metric("cosine"), Error);
    EXPECT_THROW(parse_growth_bound("T9"), Error);
}

TEST(Perturbation, KeepsSymmetryAndStaysNearby)
{
    std::mt19937_64 rng(32);
    for (int t = 0; t < 60; ++t) {
        const bool sym = t % 2 == 0;
        const ConvexBody k0 = random_normalized_body(rng, sym);
        const double radius = 0.02 + 0.001 * t;
        ConvexBody k = k0;
        try {
            k = bump_perturbation(k0, radius, 16, rng);
        } catch (const Error&) {
            continue;
        }
        EXPECT_EQ(k.symmetric(), sym);
        const double h = hausdorff(k, k0).value;
        EXPECT_GT(h, 0.0);
        // Added points lie within the radius of K0 and cuts only shrink it.
        for (int i = 0; i < 64; ++i) {
            const Vec2 u = unit(2.0 * kPi * i / 64);
            EXPECT_LE(k.support(u), k0.support(u) + radius + 1e-12);
        }
        for (const Vec2& v : k.vertices())
            EXPECT_LE(distance_to(k0, v), radius + 1e-12);
    }
}

TEST(Containment, RatioOfScaledCopies)
{
    const ConvexBody sq = make_named_body(NamedBody::unit_square);
    // lambda / mu is scale invariant.
    EXPECT_NEAR(containment_ratio(sq.scaled(1.7), sq, {0.0, 0.0}), 1.0, 1e-12);
    EXPECT_NEAR(containment_ratio(make_disk(64, 1.0), make_disk(64, 1.0).translated({0.1, 0.0}), {0.0, 0.0}),
                (1.0 + 0.1) / (1.0 - 0.1), 2e-3);
    EXPECT_NEAR(containment_ratio(sq, sq, {0.0, 0.0}), 1.0, 1e-12);
    // Square inside the hexagon inside 1.5 times the square.
    const double r = containment_ratio(make_named_body(NamedBody::unit_edge_hexagon), sq, {0.0, 0.0});
    EXPECT_GE(r, 1.5 - 1e-12);
}

TEST(ConstructivePairs, ReplayAsBmWitnesses)
{
    std::mt19937_64 rng(33);
    for (int t = 0; t < 40; ++t) {
        const ConvexBody k1 = random_normalized_body(rng, t % 2 == 0);
        const double ratio = 1.0 + 0.3 * (t + 1) / 40.0;
        const ConstructivePair p = constructive_pair(k1, ratio, 6, true, rng);
        // K1 <= a^{-1}(K2) <= ratio K1, i.e. the witness (a^{-1}, 0, ratio).
        EXPECT_LE(bm_replay_violation(p.k1, p.k2, p.a.inverse(), {0.0, 0.0}, p.ratio), 1e-9);
        const ConvexBody back = apply_affine(p.k2, p.a.inverse());
        EXPECT_NEAR(containment_ratio(back, p.k1, {0.0, 0.0}), ratio, 1e-9);
        EXPECT_EQ(p.k2.symmetric(), k1.symmetric());
        EXPECT_LE(witnessed_bm(p.k1, p.k2, p.ratio, false, 0), std::log(ratio) + 1e-15);
    }
}

TEST(Evaluator, AffineInvariantAndChecksDomains)
{
    std::mt19937_64 rng(34);
    const ConvexBody k = random_symmetric_polygon(rng);
    const ConvexBody img = apply_affine(k, random_affine(rng, 0.5));
    for (FunctionalId f : {FunctionalId::delta_l, FunctionalId::theta_l}) {
        const double a = evaluate_functional(FunctionalSpec::of(f), k).value;
        const double b = evaluate_functional(FunctionalSpec::of(f), img).value;
        EXPECT_NEAR(a, b, 5e-4);
    }
    EXPECT_THROW(evaluate_functional(FunctionalSpec::of(FunctionalId::phi_l), random_polygon(rng, 5)), Error);
    FunctionalSpec bad;
    bad.id = FunctionalId::user_composite;
    EXPECT_THROW(evaluate_functional(bad, k), Error);
    const FunctionalSpec area = FunctionalSpec::composite("area", [](const ConvexBody& b) { return b.area(); });
    EXPECT_DOUBLE_EQ(evaluate_functional(area, k).value, k.area());
}

TEST(GrowthBounds, HoldForAffineImagesWithUnitWitness)
{
    std::mt19937_64 rng(35);
    BoundCheckOptions o;
    o.use_bm_solver = false;
    o.witness_ratio = 1.0;
    o.tolerance = 1e-3;
    const ConvexBody k0 = random_symmetric_polygon(rng);
    const ConvexBody k = apply_affine(k0, random_affine(rng, 0.5));
    const BoundCheck b = theorem_bound_check(GrowthBound::bm_exponential, k, k0, o);
    EXPECT_TRUE(b.pass);
    EXPECT_EQ(b.distance, 0.0);
    EXPECT_EQ(b.entries.size(), 4u);
}

TEST(GrowthBounds, AFalseUnitWitnessIsCaught)
{
    // Claiming BM distance 0 between the triangle and the square forces
    // delta(square) = 1 <= 1 * delta(triangle) = 2/3, which fails.
    BoundCheckOptions o;
    o.use_bm_solver = false;
    o.witness_ratio = 1.0;
    const BoundCheck b = theorem_bound_check(GrowthBound::bm_exponential, make_named_body(NamedBody::equilateral_triangle),
                                             make_named_body(NamedBody::unit_square), o);
    EXPECT_FALSE(b.pass);
}

TEST(GrowthBounds, HausdorffPowerBoundOnNearbyBodies)
{
    std::mt19937_64 rng(36);
    int checked = 0;
    while (checked < 5) {
        const ConvexBody k0 = random_normalized_body(rng, checked % 2 == 0);
        ConvexBody k = k0;
        try {
            k = bump_perturbation(k0, 0.05, 12, rng);
        } catch (const Error&) {
            continue;
        }
        if (!in_normalized_space(k))
            continue;
        const BoundCheck b = theorem_bound_check(GrowthBound::hausdorff_power, k, k0);
        EXPECT_TRUE(b.pass);
        EXPECT_NEAR(b.entries.front().factor, std::pow(1.0 + b.distance, 4.0), 1e-12);
        ++checked;
    }
}

TEST(GrowthBounds, DomainChecks)
{
    const ConvexBody big = make_named_body(NamedBody::unit_square).scaled(10.0);
    EXPECT_THROW(theorem_bound_check(GrowthBound::hausdorff_power, big, big), Error);
    const ConvexBody tri = make_named_body(NamedBody::equilateral_triangle);
    EXPECT_THROW(theorem_bound_check(GrowthBound::phi_exponential, tri, tri), Error);
}

TEST(Scans, SupderivativeOfDeltaStaysUnderTheCap)
{
    SupderivativeOptions o;
    o.samples = 3;
    o.seed = 5;
    const ConvexBody base = place_in_normalized_space(make_named_body(NamedBody::regular_octagon));
    const std::vector<ScanReport> reps =
        supderivative_estimates(FunctionalSpec::of(FunctionalId::delta_l), base, {MetricKind::hausdorff, MetricKind::bm}, o);
    ASSERT_EQ(reps.size(), 2u);
    for (const ScanReport& r : reps) {
        EXPECT_TRUE(r.pass);
        ASSERT_TRUE(r.cap);
        EXPECT_LE(r.max_ratio, *r.cap + o.slack);
        EXPECT_GT(r.sample_count, 0u);
    }
}

TEST(Scans, LipschitzScanForDelta)
{
    LipschitzOptions o;
    o.seed = 9;
    const ScanReport h = lipschitz_scan(FunctionalSpec::of(FunctionalId::delta_l), MetricKind::hausdorff, 6, 8.0, 1.0 / 3.0, o);
    EXPECT_TRUE(h.pass);
    EXPECT_EQ(h.sample_count, 6u);
    const ScanReport b = lipschitz_scan(FunctionalSpec::of(FunctionalId::delta_l), MetricKind::bm, 6, 4.0, 0.25, o);
    EXPECT_TRUE(b.pass);
    for (const ScanSample& s : b.samples)
        EXPECT_LE(s.distance, 0.25 + 1e-12);
    EXPECT_THROW(lipschitz_scan(FunctionalSpec::of(FunctionalId::delta_l), MetricKind::bm, 0, 4.0, 0.25, o), Error);
}

}  // namespace
}  // namespace cvxspace
