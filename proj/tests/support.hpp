#pragma once

// Shared generators and brute-force oracles for the test suites. Nothing here is used by the
// library itself.

#include <random>
#include <vector>

#include "cvxspace/body.hpp"

namespace cvxspace::testing {

inline ConvexBody random_polygon(std::mt19937_64& rng, int max_points = 12)
{
    std::uniform_int_distribution<int> count(3, max_points);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi), rad(0.4, 1.0), stretch(0.4, 2.5);
    for (;;) {
        const int n = count(rng);
        const double sx = stretch(rng), sy = stretch(rng);
        std::vector<Vec2> pts;
        for (int i = 0; i < n; ++i) {
            const double t = ang(rng), r = rad(rng);
            pts.push_back({sx * r * std::cos(t), sy * r * std::sin(t)});
        }
        try {
            return ConvexBody::hull_of(pts);
        } catch (const Error&) {
        }
    }
}

inline ConvexBody random_symmetric_polygon(std::mt19937_64& rng, int max_pairs = 6)
{
    std::uniform_int_distribution<int> count(2, max_pairs);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi), rad(0.4, 1.0), stretch(0.5, 2.0);
    for (;;) {
        const int n = count(rng);
        const double sx = stretch(rng), sy = stretch(rng);
        std::vector<Vec2> pts;
        for (int i = 0; i < n; ++i) {
            const double t = ang(rng), r = rad(rng);
            const Vec2 p{sx * r * std::cos(t), sy * r * std::sin(t)};
            pts.push_back(p);
            pts.push_back(-p);
        }
        try {
            ConvexBody k = ConvexBody::hull_of(pts);
            if (k.symmetric())
                return k;
        } catch (const Error&) {
        }
    }
}

inline AffineMap2 random_affine(std::mt19937_64& rng, double spread = 1.0)
{
    std::uniform_real_distribution<double> u(-spread, spread);
    for (;;) {
        const Mat2 m{1.0 + u(rng), u(rng), u(rng), 1.0 + u(rng)};
        if (std::abs(m.det()) > 0.2)
            return AffineMap2(m, {u(rng), u(rng)});
    }
}

/// Hull of all pairwise vertex sums.
inline ConvexBody brute_force_minkowski(const ConvexBody& a, const ConvexBody& b)
{
    std::vector<Vec2> pts;
    for (const Vec2& p : a.vertices())
        for (const Vec2& q : b.vertices())
            pts.push_back(p + q);
    return ConvexBody::hull_of(pts);
}

inline double shoelace(const std::vector<Vec2>& v)
{
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += v[i].x * v[(i + 1) % v.size()].y - v[(i + 1) % v.size()].x * v[i].y;
    return 0.5 * s;
}

}  // namespace cvxspace::testing
