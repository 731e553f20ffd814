#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cvxspace/hausdorff.hpp"
#include "cvxspace/john.hpp"
#include "cvxspace/lp.hpp"
#include "cvxspace/optimize.hpp"

namespace cvxspace {

struct BmOptions {
    /// Total objective evaluations across all starts.
    int budget = 12000;
    std::uint64_t seed = 0;
    int starts = 16;
    double tolerance = 1e-6;
    /// Extra linear map (in the raw coordinates, K2 -> K1) tried as a start; the identity
    /// map on the given bodies is always tried as well.
    std::optional<Mat2> extra_seed;
};

/// K1 <= sigma(K2) <= r K1 + x.
struct BmWitness {
    AffineMap2 sigma;
    Vec2 x;
    double r = 1.0;
    int evaluations = 0;
    std::uint64_t seed = 0;
    bool budget_exhausted = false;
    /// Largest containment violation seen on replay, relative to body extent.
    double replay_violation = 0.0;
    /// Ratio achieved by the identity map on the given placement, the Theorem 1 style seed.
    double identity_ratio = 0.0;
};

struct BmResult {
    double value = 0.0;
    BmWitness witness;
    DistanceStatus status = DistanceStatus::upper_bound;
};

namespace detail {

/// Support values of a ccw polygon along directions that rotate monotonically (ccw, or cw
/// when `reversed`). Linear time.
inline void sweep_support(std::span<const Vec2> v, const std::vector<Vec2>& dirs, bool reversed,
                          std::vector<double>& out)
{
    const std::size_t n = v.size(), m = dirs.size();
    out.resize(m);
    auto idx = [&](std::size_t i) { return reversed ? m - 1 - i : i; };
    std::size_t k = 0;
    {
        const Vec2 d = dirs[idx(0)];
        double best = dot(v[0], d);
        for (std::size_t i = 1; i < n; ++i)
            if (dot(v[i], d) > best) {
                best = dot(v[i], d);
                k = i;
            }
    }
    for (std::size_t ii = 0; ii < m; ++ii) {
        const Vec2 d = dirs[idx(ii)];
        double cur = dot(v[k], d);
        for (std::size_t guard = 0; guard < n; ++guard) {
            const std::size_t nk = (k + 1) % n;
            const double nxt = dot(v[nk], d);
            if (!(nxt > cur))
                break;
            k = nk;
            cur = nxt;
        }
        out[idx(ii)] = cur;
    }
}

/// Width-free sandwich ratio r(A) = min{r': A K2 <= r' K1 + x} / max{s: s K1 + y <= A K2},
/// with both translations solved exactly.
class BmEvaluator {
public:
    BmEvaluator(const ConvexBody& k1, const ConvexBody& k2, bool centered)
        : k1_(k1), k2_(k2), f1_(k1.facets()), f2_(k2.facets()), centered_(centered)
    {}

    struct Eval {
        double ratio = std::numeric_limits<double>::infinity();
        double s = 0.0, rp = 0.0;
        Vec2 x, y;
    };

    Eval operator()(const Mat2& a) const
    {
        Eval e;
        const double det = a.det();
        if (!(std::abs(det) > 1e-12) || !std::isfinite(det))
            return e;
        const bool rev = det < 0.0;
        const Mat2 it = a.inverse().transpose();
        const Mat2 at = a.transpose();

        // Inner: facets of A K2 have normals it * n_j and offsets b_j.
        dirs_.resize(f2_.size());
        for (std::size_t j = 0; j < f2_.size(); ++j)
            dirs_[j] = it * f2_[j].normal;
        sweep_support(k1_.vertices(), dirs_, rev, h_);
        if (centered_) {
            double s = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < f2_.size(); ++j)
                s = std::min(s, f2_[j].offset / h_[j]);
            e.s = s;
        } else {
            const std::size_t m = f2_.size();
            std::vector<double> A(3 * m), c(m);
            for (std::size_t j = 0; j < m; ++j) {
                A[j] = dirs_[j].x;
                A[m + j] = dirs_[j].y;
                A[2 * m + j] = h_[j];
                c[j] = -f2_[j].offset;
            }
            const LpResult lp = simplex_max(3, static_cast<int>(m), A, {0.0, 0.0, 1.0}, c);
            if (lp.status != LpStatus::optimal)
                return e;
            e.y = {-lp.duals[0], -lp.duals[1]};
            double s = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < m; ++j)
                s = std::min(s, (f2_[j].offset - dot(dirs_[j], e.y)) / h_[j]);
            e.s = s;
        }
        if (!(e.s > 0.0))
            return e;

        // Outer: h_{A K2}(a_i) = h_K2(A^T a_i) against facets (a_i, c_i) of K1.
        dirs_.resize(f1_.size());
        for (std::size_t i = 0; i < f1_.size(); ++i)
            dirs_[i] = at * f1_[i].normal;
        sweep_support(k2_.vertices(), dirs_, rev, h_);
        if (centered_) {
            double r = 0.0;
            for (std::size_t i = 0; i < f1_.size(); ++i)
                r = std::max(r, h_[i] / f1_[i].offset);
            e.rp = r;
        } else {
            const std::size_t m = f1_.size();
            std::vector<double> A(3 * m), c(m);
            for (std::size_t i = 0; i < m; ++i) {
                A[i] = f1_[i].normal.x;
                A[m + i] = f1_[i].normal.y;
                A[2 * m + i] = f1_[i].offset;
                c[i] = h_[i];
            }
            const LpResult lp = simplex_max(3, static_cast<int>(m), A, {0.0, 0.0, 1.0}, c);
            if (lp.status != LpStatus::optimal)
                return e;
            e.x = {lp.duals[0], lp.duals[1]};
            double r = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m; ++i)
                r = std::max(r, (h_[i] - dot(f1_[i].normal, e.x)) / f1_[i].offset);
            e.rp = r;
        }
        e.ratio = e.rp / e.s;
        return e;
    }

private:
    const ConvexBody& k1_;
    const ConvexBody& k2_;
    std::vector<Facet> f1_, f2_;
    bool centered_;
    mutable std::vector<Vec2> dirs_;
    mutable std::vector<double> h_;
};

/// R(t1) diag(e^l, e^-l) R(t2), times diag(1, -1) on the right when `flip`.
inline Mat2 bm_linear(double t1, double l, double t2, bool flip)
{
    Mat2 m = Mat2::rotation(t1) * Mat2::diagonal(std::exp(l), std::exp(-l)) * Mat2::rotation(t2);
    if (flip)
        m = m * Mat2::diagonal(1.0, -1.0);
    return m;
}

/// Inverse of bm_linear up to positive scale.
inline std::vector<double> bm_params(const Mat2& m, bool& flip)
{
    flip = m.det() < 0.0;
    Mat2 p = flip ? m * Mat2::diagonal(1.0, -1.0) : m;
    p = p * (1.0 / std::sqrt(std::abs(p.det())));
    Eigen::Matrix2d e;
    e << p.a, p.b, p.c, p.d;
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(e, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix2d u = svd.matrixU(), v = svd.matrixV();
    if (u.determinant() < 0.0) {
        u.col(1) *= -1.0;
        v.col(1) *= -1.0;
    }
    const double l = std::log(svd.singularValues()(0) / std::sqrt(svd.singularValues()(0) * svd.singularValues()(1)));
    return {std::atan2(u(1, 0), u(0, 0)), l, -std::atan2(v(1, 0), v(0, 0))};
}

}  // namespace detail

/// Does K1 <= sigma(K2) <= r K1 + x hold within tol * extent? Returns the largest violation
/// relative to extent (<= 0 means both containments hold exactly).
inline double bm_replay_violation(const ConvexBody& k1, const ConvexBody& k2, const AffineMap2& sigma, Vec2 x, double r)
{
    const AffineMap2 inv = sigma.inverse();
    double worst = -std::numeric_limits<double>::infinity();
    const std::vector<Facet> f2 = k2.facets();
    const double e2 = k2.extent();
    for (const Vec2& p : k1.vertices()) {
        const Vec2 q = inv(p);
        for (const Facet& f : f2)
            worst = std::max(worst, (dot(f.normal, q) - f.offset) / e2);
    }
    const std::vector<Facet> f1 = k1.facets();
    const double e1 = k1.extent();
    for (const Vec2& p : k2.vertices()) {
        const Vec2 q = (sigma(p) - x) / r;
        for (const Facet& f : f1)
            worst = std::max(worst, (dot(f.normal, q) - f.offset) / e1);
    }
    return worst;
}

inline bool bm_replay_ok(const ConvexBody& k1, const ConvexBody& k2, const BmWitness& w, double tol = 1e-7)
{
    return bm_replay_violation(k1, k2, w.sigma, w.x, w.r) <= tol;
}

/// Witnessed upper bound on the Banach-Mazur distance log r.
inline BmResult bm_distance(const ConvexBody& k1, const ConvexBody& k2, const BmOptions& opt = {})
{
    if (opt.budget < 1000)
        throw Error(ErrorKind::invalid_parameter, "metrics", "bm_distance budget must be at least 1000 evaluations");
    const JohnNormalization n1 = john_normalize(k1);
    const JohnNormalization n2 = john_normalize(k2);
    const bool centered = k1.symmetric() && k2.symmetric();
    const detail::BmEvaluator eval(n1.body, n2.body, centered);

    // In the normalized frame the identity on the raw bodies is sigma1 o sigma2^{-1}.
    const Mat2 l1 = n1.map.linear(), l2inv = n2.map.linear().inverse();
    const Mat2 raw_identity = l1 * l2inv;

    struct Start {
        std::vector<double> p;
        bool flip = false;
    };
    std::vector<Start> starts;
    starts.push_back({{0.0, 0.0, 0.0}, false});
    starts.push_back({{0.0, 0.0, 0.0}, true});
    {
        Start s;
        s.p = detail::bm_params(raw_identity, s.flip);
        starts.push_back(s);
    }
    if (opt.extra_seed) {
        Start s;
        s.p = detail::bm_params(l1 * *opt.extra_seed * l2inv, s.flip);
        starts.push_back(s);
    }
    const int total = std::max(16, opt.starts);
    for (int i = static_cast<int>(starts.size()); i < total; ++i) {
        std::mt19937_64 rng = task_rng(opt.seed, static_cast<std::uint64_t>(i));
        std::uniform_real_distribution<double> ang(0.0, kPi), lam(-0.4, 0.4);
        const double t1 = ang(rng), l = lam(rng), t2 = ang(rng);
        starts.push_back({{t1, l, t2}, (i % 2) == 1});
    }

    const int per_start = std::max(100, opt.budget / static_cast<int>(starts.size()));
    auto objective_for = [](const detail::BmEvaluator& ev, bool flip) {
        return Objective([&ev, flip](const std::vector<double>& p) {
            if (std::abs(p[1]) > 4.0)
                return 1e6 + std::abs(p[1]);
            const double r = ev(detail::bm_linear(p[0], p[1], p[2], flip)).ratio;
            return std::isfinite(r) ? std::log(r) : 1e6;
        });
    };

    struct Outcome {
        MinimizeResult m;
        bool flip = false;
    };
    const std::vector<Outcome> runs = parallel_map<Outcome>(starts.size(), [&](std::size_t i) {
        MinimizeOptions mo;
        mo.max_evaluations = per_start;
        mo.size_tolerance = opt.tolerance * 0.1;
        mo.restart_tolerance = opt.tolerance * 0.1;
        const detail::BmEvaluator local = eval;  // scratch buffers are per task
        return Outcome{nelder_mead(objective_for(local, starts[i].flip), starts[i].p, {0.3, 0.2, 0.3}, mo),
                       starts[i].flip};
    });

    int evals = 0;
    for (const Outcome& o : runs)
        evals += o.m.evaluations;

    auto compose = [&](const detail::BmEvaluator::Eval& e, const Mat2& a) {
        // tau(z) = (A z - y) / s maps N2 into N1 with N1 <= tau N2 <= r N1 + x'.
        const AffineMap2 tau(a * (1.0 / e.s), e.y * (-1.0 / e.s));
        const double r = e.rp / e.s;
        const Vec2 xp = (e.x - e.y) / e.s;
        BmWitness w;
        w.sigma = n1.map.inverse().compose(tau).compose(n2.map);
        w.r = r;
        w.x = l1.inverse() * (n1.map.translation() * (r - 1.0) + xp);
        return w;
    };

    std::optional<BmWitness> best;
    double best_value = std::numeric_limits<double>::infinity();
    bool best_converged = false;
    auto consider = [&](const Mat2& a, bool converged) {
        const auto e = eval(a);
        if (!std::isfinite(e.ratio))
            return;
        const double v = std::log(e.ratio);
        BmWitness w = compose(e, a);
        const bool better = v < best_value - 1e-12 ||
                            (std::abs(v - best_value) <= 1e-12 && best &&
                             w.sigma.distance_from_identity() < best->sigma.distance_from_identity());
        if (!best || better) {
            best = w;
            best_value = v;
            best_converged = converged;
        }
    };
    for (const Outcome& o : runs)
        consider(detail::bm_linear(o.m.x[0], o.m.x[1], o.m.x[2], o.flip), o.m.converged);
    const auto seed_eval = eval(raw_identity);
    consider(raw_identity, true);

    if (!best)
        throw Error(ErrorKind::non_convergence, "metrics", "no start produced a feasible sandwich");
    BmResult out;
    out.witness = *best;
    out.witness.evaluations = evals;
    out.witness.seed = opt.seed;
    out.witness.budget_exhausted = !best_converged;
    out.witness.identity_ratio = seed_eval.ratio;
    out.witness.replay_violation = bm_replay_violation(k1, k2, out.witness.sigma, out.witness.x, out.witness.r);
    out.value = std::log(out.witness.r);
    return out;
}

/// 2 log(1 + ||K1, K2||*) for bodies between the unit disk and the disk of radius 2.
inline double bm_bound_from_hausdorff(const ConvexBody& k1, const ConvexBody& k2, double tol = 1e-9)
{
    if (!in_normalized_space(k1, tol) || !in_normalized_space(k2, tol))
        throw Error(ErrorKind::domain, "metrics", "bodies must satisfy unit disk <= K <= 2 disk");
    return 2.0 * std::log1p(hausdorff(k1, k2).value);
}

}  // namespace cvxspace
