#pragma once

#include <cmath>
#include <limits>

#include "cvxspace/body.hpp"

namespace cvxspace {

enum class DistanceStatus { exact, upper_bound };

inline const char* to_string(DistanceStatus s) { return s == DistanceStatus::exact ? "exact" : "upper_bound"; }

struct HausdorffWitness {
    /// true when the attaining vertex belongs to the first body
    bool from_first = true;
    std::size_t vertex_index = 0;
    Vec2 vertex;
    Vec2 nearest;
};

struct HausdorffResult {
    double value = 0.0;
    HausdorffWitness witness;
    DistanceStatus status = DistanceStatus::exact;
};

/// Nearest point of a convex polygon to p (p itself when inside).
inline Vec2 nearest_point(const ConvexBody& k, Vec2 p)
{
    if (k.contains(p))
        return p;
    const std::size_t n = k.size();
    Vec2 best = k.vertex(0);
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = k.vertex(i), b = k.vertex(i + 1);
        const Vec2 e = b - a;
        const double t = std::clamp(dot(p - a, e) / norm2(e), 0.0, 1.0);
        const Vec2 q = a + e * t;
        const double d = norm2(p - q);
        if (d < bd) {
            bd = d;
            best = q;
        }
    }
    return best;
}

inline double distance_to(const ConvexBody& k, Vec2 p) { return norm(p - nearest_point(k, p)); }

/// Exact Hausdorff distance. Distance to a convex set is convex, so each one-sided excess is
/// attained at a vertex.
inline HausdorffResult hausdorff(const ConvexBody& k1, const ConvexBody& k2)
{
    HausdorffResult out;
    out.value = -1.0;
    auto scan = [&](const ConvexBody& from, const ConvexBody& to, bool first) {
        for (std::size_t i = 0; i < from.size(); ++i) {
            const Vec2 v = from.vertex(i);
            const Vec2 q = nearest_point(to, v);
            const double d = norm(v - q);
            if (d > out.value) {
                out.value = d;
                out.witness = {first, i, v, q};
            }
        }
    };
    scan(k1, k2, true);
    scan(k2, k1, false);
    return out;
}

struct PlacementResult {
    double angle = 0.0;
    HausdorffResult distance;
};

/// Hausdorff distance minimized over rotations of `k2` about its centroid. Grid of `steps`
/// angles over a full turn, then golden-section refinement around the best cell.
inline PlacementResult hausdorff_best_rotation(const ConvexBody& k1, const ConvexBody& k2, int steps = 720)
{
    if (steps < 8)
        throw Error(ErrorKind::invalid_parameter, "metrics", "rotation search needs at least 8 steps");
    const Vec2 c = k2.centroid();
    auto eval = [&](double a) {
        const AffineMap2 rot(Mat2::rotation(a), c - Mat2::rotation(a) * c);
        return hausdorff(k1, apply_affine(k2, rot));
    };
    const double h = 2.0 * kPi / steps;
    double best_a = 0.0, best_v = std::numeric_limits<double>::infinity();
    for (int i = 0; i < steps; ++i) {
        const double v = eval(i * h).value;
        if (v < best_v) {
            best_v = v;
            best_a = i * h;
        }
    }
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = best_a - h, hi = best_a + h;
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = eval(x1).value, f2 = eval(x2).value;
    while (hi - lo > 1e-10) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = eval(x1).value;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = eval(x2).value;
        }
    }
    PlacementResult out{0.5 * (lo + hi), {}};
    out.distance = eval(out.angle);
    if (best_v < out.distance.value) {
        out.angle = best_a;
        out.distance = eval(best_a);
    }
    return out;
}

}  // namespace cvxspace
