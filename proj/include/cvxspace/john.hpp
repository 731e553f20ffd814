#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cvxspace/body.hpp"

namespace cvxspace {

struct JohnOptions {
    /// Duality-gap target on log det of the half-axis matrix.
    double gap_tolerance = 1e-10;
    int max_newton_steps = 10000;
    /// Slack allowed when checking unit disk <= K' <= n * disk afterwards.
    double containment_tolerance = 1e-6;
};

struct InscribedEllipse {
    Vec2 center;
    Mat2 half_axes;  // symmetric positive definite; ellipse = center + half_axes * (unit disk)
    int newton_steps = 0;

    Ellipse2 ellipse() const { return Ellipse2::from_half_axes(center, half_axes); }
};

/// Maximum-area ellipse inscribed in a polygon, by a log-barrier interior-point method on
/// (B, c) with constraints ||B a_i|| + a_i.c <= b_i.
inline InscribedEllipse max_inscribed_ellipse(const ConvexBody& body, const JohnOptions& opt = {})
{
    // Work in a frame centred at the centroid and scaled to unit extent.
    const Vec2 shift = body.centroid();
    const double scale = body.extent();
    std::vector<Facet> facets = body.facets();
    for (Facet& f : facets)
        f.offset = (f.offset - dot(f.normal, shift)) / scale;
    const std::size_t m = facets.size();

    using Vec5 = Eigen::Matrix<double, 5, 1>;
    using Mat5 = Eigen::Matrix<double, 5, 5>;

    double r0 = std::numeric_limits<double>::infinity();
    for (const Facet& f : facets)
        r0 = std::min(r0, f.offset);
    if (!(r0 > 0.0))
        throw Error(ErrorKind::non_convergence, "bodies", "centroid not interior; cannot start ellipse search");
    Vec5 p;
    p << 0.5 * r0, 0.0, 0.5 * r0, 0.0, 0.0;

    auto slacks = [&](const Vec5& q, std::vector<double>& s) {
        s.resize(m);
        const double det = q(0) * q(2) - q(1) * q(1);
        if (!(q(0) > 0.0) || !(det > 0.0))
            return false;
        for (std::size_t i = 0; i < m; ++i) {
            const Vec2 a = facets[i].normal;
            const Vec2 w{q(0) * a.x + q(1) * a.y, q(1) * a.x + q(2) * a.y};
            s[i] = facets[i].offset - (a.x * q(3) + a.y * q(4)) - norm(w);
            if (!(s[i] > 0.0))
                return false;
        }
        return true;
    };
    auto value = [&](const Vec5& q, double t, std::vector<double>& s) {
        if (!slacks(q, s))
            return std::numeric_limits<double>::infinity();
        double v = -t * std::log(q(0) * q(2) - q(1) * q(1));
        for (double si : s)
            v -= std::log(si);
        return v;
    };

    std::vector<double> s;
    int steps = 0;
    double t = 1.0;
    const double t_final = static_cast<double>(m) / opt.gap_tolerance;
    while (true) {
        for (;;) {
            if (++steps > opt.max_newton_steps)
                throw Error(ErrorKind::non_convergence, "bodies",
                            "inscribed-ellipse search exceeded " + std::to_string(opt.max_newton_steps) + " Newton steps");
            const double f0 = value(p, t, s);
            Vec5 g = Vec5::Zero();
            Mat5 h = Mat5::Zero();
            const double det = p(0) * p(2) - p(1) * p(1);
            Vec5 gd;
            gd << p(2), -2.0 * p(1), p(0), 0.0, 0.0;
            Mat5 hd = Mat5::Zero();
            hd(0, 2) = hd(2, 0) = 1.0;
            hd(1, 1) = -2.0;
            g -= t * gd / det;
            h += t * (gd * gd.transpose() / (det * det) - hd / det);
            for (std::size_t i = 0; i < m; ++i) {
                const Vec2 a = facets[i].normal;
                const Eigen::Vector2d w(p(0) * a.x + p(1) * a.y, p(1) * a.x + p(2) * a.y);
                const double wn = w.norm();
                Eigen::Matrix<double, 2, 5> jac = Eigen::Matrix<double, 2, 5>::Zero();
                jac(0, 0) = a.x;
                jac(0, 1) = a.y;
                jac(1, 1) = a.x;
                jac(1, 2) = a.y;
                const Eigen::Vector2d gw = w / wn;
                Vec5 gi = jac.transpose() * gw;
                gi(3) += a.x;
                gi(4) += a.y;
                const Mat5 hi = jac.transpose() * ((Eigen::Matrix2d::Identity() - gw * gw.transpose()) / wn) * jac;
                g += gi / s[i];
                h += gi * gi.transpose() / (s[i] * s[i]) + hi / s[i];
            }
            const Vec5 dir = -h.ldlt().solve(g);
            const double decrement = -g.dot(dir);
            if (!(decrement > 0.0) || decrement < 1e-14)
                break;
            double step = 1.0;
            double f1 = f0;
            std::vector<double> trial;
            while (step > 1e-20) {
                f1 = value(p + step * dir, t, trial);
                if (f1 <= f0 - 0.25 * step * decrement)
                    break;
                step *= 0.5;
            }
            if (step <= 1e-20)
                break;
            p += step * dir;
            // Stalled by rounding in the barrier value.
            if (decrement < 1e-10 || f0 - f1 <= 1e-15 * std::abs(f0))
                break;
        }
        if (t >= t_final)
            break;
        t = std::min(t * 8.0, t_final);
    }

    InscribedEllipse out;
    out.half_axes = Mat2{p(0), p(1), p(1), p(2)} * scale;
    out.center = Vec2{p(3), p(4)} * scale + shift;
    out.newton_steps = steps;
    return out;
}

struct JohnNormalization {
    ConvexBody body;
    AffineMap2 map;
    InscribedEllipse ellipse;
};

/// Maps the maximum-area inscribed ellipse of K onto the unit disk. The result satisfies
/// disk <= K' <= 2 disk (sqrt(2) disk for centrally symmetric K).
inline JohnNormalization john_normalize(const ConvexBody& k, const JohnOptions& opt = {})
{
    const InscribedEllipse e = max_inscribed_ellipse(k, opt);
    const Mat2 inv = e.half_axes.inverse();
    AffineMap2 sigma(inv, -(inv * e.center));
    ConvexBody out = apply_affine(k, sigma).with_provenance("john(" + k.provenance() + ")");
    const double inner = out.inradius_about({0.0, 0.0});
    const double outer = out.circumradius_about({0.0, 0.0});
    const double bound = k.symmetric() ? std::sqrt(2.0) : 2.0;
    if (inner < 1.0 - opt.containment_tolerance || outer > bound + opt.containment_tolerance)
        throw Error(ErrorKind::non_convergence, "bodies",
                    "normalized body violates disk sandwich (inradius " + std::to_string(inner) + ", circumradius " +
                        std::to_string(outer) + ")");
    return {std::move(out), sigma, e};
}

/// K in K^{2*}: unit disk <= K <= 2 disk, both about the origin.
inline bool in_normalized_space(const ConvexBody& k, double tol = 1e-6)
{
    return k.inradius_about({0.0, 0.0}) >= 1.0 - tol && k.circumradius_about({0.0, 0.0}) <= 2.0 + tol;
}

}  // namespace cvxspace
