#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "cvxspace/body.hpp"
#include "cvxspace/optimize.hpp"

namespace cvxspace {

/// Lattice generated by b1, b2.
struct Lattice2 {
    Vec2 b1{1.0, 0.0};
    Vec2 b2{0.0, 1.0};

    Lattice2() = default;
    Lattice2(Vec2 a, Vec2 b) : b1(a), b2(b)
    {
        if (!(std::abs(cross(a, b)) > 1e-12) || !std::isfinite(cross(a, b)))
            throw Error(ErrorKind::invalid_parameter, "lattice", "singular lattice basis (|det| <= 1e-12)");
    }

    static Lattice2 integer() { return {}; }
    /// Hexagonal lattice whose shortest vectors have length `len`.
    static Lattice2 hexagonal(double len = 1.0) { return {{len, 0.0}, {0.5 * len, 0.5 * std::sqrt(3.0) * len}}; }

    double det() const { return std::abs(cross(b1, b2)); }
    Vec2 point(long m, long n) const { return b1 * static_cast<double>(m) + b2 * static_cast<double>(n); }
    Lattice2 scaled(double s) const { return {b1 * s, b2 * s}; }
    Lattice2 transformed(const Mat2& m) const { return {m * b1, m * b2}; }
    /// (u, v) with x = u b1 + v b2.
    Vec2 coordinates(Vec2 x) const
    {
        const double d = cross(b1, b2);
        return {cross(x, b2) / d, cross(b1, x) / d};
    }
};

/// Lagrange-Gauss reduction: |b1| <= |b2| <= |b2 +- b1|.
inline Lattice2 reduce(const Lattice2& in)
{
    Vec2 a = in.b1, b = in.b2;
    if (norm2(a) > norm2(b))
        std::swap(a, b);
    for (int guard = 0; guard < 1000; ++guard) {
        const double mu = std::round(dot(a, b) / norm2(a));
        b = b - a * mu;
        if (norm2(b) >= norm2(a))
            break;
        std::swap(a, b);
    }
    if (cross(a, b) < 0.0)
        b = -b;
    return Lattice2(a, b);
}

/// All (m, n) != (0, 0) with |m b1 + n b2| <= radius, by Cramer bounds on the coefficients.
template <class Fn>
void for_each_lattice_point(const Lattice2& l, double radius, Fn&& fn)
{
    const double d = l.det();
    const long mm = static_cast<long>(std::floor(radius * norm(l.b2) / d + 1e-9));
    const long nn = static_cast<long>(std::floor(radius * norm(l.b1) / d + 1e-9));
    const double r2 = radius * radius * (1.0 + 1e-12);
    for (long m = -mm; m <= mm; ++m)
        for (long n = -nn; n <= nn; ++n) {
            if (m == 0 && n == 0)
                continue;
            const Vec2 z = l.point(m, n);
            if (norm2(z) <= r2)
                fn(z);
        }
}

/// Minkowski functional of a convex polygon with the origin in its interior. Directional
/// (not necessarily symmetric): g(x) = min{t >= 0 : x in tC}.
class Gauge {
public:
    explicit Gauge(const ConvexBody& c)
    {
        inradius_ = c.inradius_about({0.0, 0.0});
        if (!(inradius_ > 1e-12 * c.extent()))
            throw Error(ErrorKind::domain, "lattice", "gauge needs the origin in the interior of the body");
        circumradius_ = c.circumradius_about({0.0, 0.0});
        const std::size_t n = c.size();
        std::size_t k0 = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (angle_of(c.vertex(i)) < angle_of(c.vertex(k0)))
                k0 = i;
        ang_.resize(n);
        facet_.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            const Vec2 p = c.vertex(k0 + j), q = c.vertex(k0 + j + 1);
            ang_[j] = angle_of(p);
            const Vec2 e = q - p;
            const Vec2 nrm = Vec2{e.y, -e.x} / norm(e);
            const double off = dot(nrm, p);
            facet_[j] = nrm / off;
        }
    }

    double operator()(Vec2 x) const
    {
        if (x.x == 0.0 && x.y == 0.0)
            return 0.0;
        const double a = angle_of(x);
        auto it = std::upper_bound(ang_.begin(), ang_.end(), a);
        const std::size_t j = it == ang_.begin() ? ang_.size() - 1 : static_cast<std::size_t>(it - ang_.begin()) - 1;
        return dot(facet_[j], x);
    }

    /// Exact linear-time form max_i <a_i, x> / c_i, kept as an oracle.
    double brute(Vec2 x) const
    {
        double g = 0.0;
        for (const Vec2& f : facet_)
            g = std::max(g, dot(f, x));
        return g;
    }

    double inradius() const { return inradius_; }
    double circumradius() const { return circumradius_; }
    /// Euclidean Lipschitz constant.
    double lipschitz() const { return 1.0 / inradius_; }

private:
    std::vector<double> ang_;
    std::vector<Vec2> facet_;
    double inradius_ = 0.0, circumradius_ = 0.0;
};

inline double gauge_norm(const ConvexBody& c, Vec2 x) { return Gauge(c)(x); }

/// Largest rho with rho C + L a packing: half the gauge-shortest nonzero lattice vector.
inline double packing_radius(const Gauge& g, const Lattice2& lattice)
{
    const Lattice2 l = reduce(lattice);
    // The minimizer is no longer than circumradius * g(b1) in Euclidean norm.
    const double bound = g.circumradius() * std::min(g(l.b1), g(-l.b1));
    double best = std::numeric_limits<double>::infinity();
    for_each_lattice_point(l, bound * (1.0 + 1e-9), [&](Vec2 z) { best = std::min(best, g(z)); });
    return 0.5 * best;
}

inline double packing_radius(const ConvexBody& c, const Lattice2& l) { return packing_radius(Gauge(c), l); }

struct CoveringOptions {
    int initial_grid = 64;
    /// Certified bound on (upper bracket - returned value).
    double tolerance = 1e-4;
    long max_cells = 4'000'000;
    /// Simplex evaluations spent climbing from the best point found; only raises the value.
    int polish = 2000;
};

struct CoveringResult {
    /// Attained lower bracket: some point of the plane is this far (in gauge) from the lattice.
    double value = 0.0;
    double upper = 0.0;
    Vec2 deep_hole;
    long evaluations = 0;
};

/// Smallest rho' with rho' C + L a covering: max over the torus of the gauge distance to the
/// lattice, by branch and bound with the Lipschitz bound of the gauge.
inline CoveringResult covering_radius(const Gauge& g, const Lattice2& lattice, const CoveringOptions& opt = {})
{
    if (opt.initial_grid < 1 || !(opt.tolerance > 0.0))
        throw Error(ErrorKind::invalid_parameter, "lattice", "covering radius needs a positive grid and tolerance");
    const Lattice2 l = reduce(lattice);
    const double lip = g.lipschitz();
    // Any cell point lies within `reach` of a corner, so its gauge distance is at most reach * lip.
    const double reach = 0.5 * std::max(norm(l.b1 + l.b2), norm(l.b1 - l.b2));
    const double far = norm(l.b1) + norm(l.b2) + g.circumradius() * reach * lip;
    std::vector<Vec2> cand{{0.0, 0.0}};
    for_each_lattice_point(l, far, [&](Vec2 z) { cand.push_back(z); });
    std::sort(cand.begin(), cand.end(), [](Vec2 a, Vec2 b) { return norm2(a) < norm2(b); });
    std::vector<double> cand_norm(cand.size());
    for (std::size_t i = 0; i < cand.size(); ++i)
        cand_norm[i] = norm(cand[i]);
    const double inv_circ = 1.0 / g.circumradius();

    long evals = 0;
    auto f = [&](double u, double v) {
        ++evals;
        const Vec2 x = l.b1 * u + l.b2 * v;
        const double nx = norm(x);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cand.size(); ++i) {
            // g(x - z) >= (|z| - |x|) / circumradius, increasing along the sorted list.
            if ((cand_norm[i] - nx) * inv_circ >= best)
                break;
            best = std::min(best, g(x - cand[i]));
        }
        return best;
    };

    struct Cell {
        double u, v, h, fc, ub;
        bool operator<(const Cell& o) const { return ub < o.ub; }
    };
    auto radius_of = [&](double h) { return 0.5 * h * std::max(norm(l.b1 + l.b2), norm(l.b1 - l.b2)); };

    std::priority_queue<Cell> pq;
    CoveringResult out;
    out.value = -1.0;
    const int n0 = opt.initial_grid;
    const double h0 = 1.0 / n0;
    const double r0 = radius_of(h0);
    for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n0; ++j) {
            const double u = (i + 0.5) * h0, v = (j + 0.5) * h0;
            const double fc = f(u, v);
            if (fc > out.value) {
                out.value = fc;
                out.deep_hole = l.b1 * u + l.b2 * v;
            }
            pq.push({u, v, h0, fc, fc + lip * r0});
        }
    long cells = static_cast<long>(n0) * n0;
    // Largest bound among pruned cells; part of the certified upper bracket.
    double pruned = -1.0;
    while (!pq.empty()) {
        const Cell c = pq.top();
        if (c.ub - out.value <= opt.tolerance)
            break;
        pq.pop();
        if (cells > opt.max_cells)
            throw Error(ErrorKind::budget_exhausted, "lattice",
                        "covering-radius refinement budget exhausted; bracket [" + std::to_string(out.value) + ", " +
                            std::to_string(c.ub) + "]");
        const double h = 0.5 * c.h;
        const double rr = radius_of(h);
        for (int di = 0; di < 2; ++di)
            for (int dj = 0; dj < 2; ++dj) {
                const double u = c.u + (di - 0.5) * h, v = c.v + (dj - 0.5) * h;
                const double fc = f(u, v);
                if (fc > out.value) {
                    out.value = fc;
                    out.deep_hole = l.b1 * u + l.b2 * v;
                }
                const double ub = fc + lip * rr;
                if (ub - out.value > opt.tolerance)
                    pq.push({u, v, h, fc, ub});
                else
                    pruned = std::max(pruned, ub);
                ++cells;
            }
    }
    out.upper = std::max({out.value, pruned, pq.empty() ? -1.0 : pq.top().ub});
    if (opt.polish > 0) {
        // Compass climb in 16 directions; handles the kinks of a piecewise-linear landscape.
        Vec2 w = l.coordinates(out.deep_hole);
        double fw = out.value;
        double h = radius_of(h0);
        const double hmin = 1e-13 * std::max(norm(l.b1), norm(l.b2));
        int used = 0;
        while (h > hmin && used + 16 <= opt.polish) {
            Vec2 bw = w;
            double bf = fw;
            for (int k = 0; k < 16; ++k) {
                const Vec2 dx = unit(kPi * k / 8.0) * h;
                const Vec2 q = w + l.coordinates(dx);
                const double fq = f(q.x, q.y);
                if (fq > bf) {
                    bf = fq;
                    bw = q;
                }
            }
            used += 16;
            if (bf > fw) {
                w = bw;
                fw = bf;
            } else {
                h *= 0.5;
            }
        }
        if (fw > out.value) {
            out.value = fw;
            out.deep_hole = l.b1 * w.x + l.b2 * w.y;
        }
    }
    out.upper = std::max(out.upper, out.value);
    out.evaluations = evals;
    return out;
}

inline CoveringResult covering_radius(const ConvexBody& c, const Lattice2& l, const CoveringOptions& opt = {})
{
    return covering_radius(Gauge(c), l, opt);
}

/// K + L is a packing, tested through the central symmetral.
inline bool is_packing(const ConvexBody& k, const Lattice2& l)
{
    return packing_radius(central_symmetral(k), l) >= 1.0 - 1e-9;
}

/// No point farther than 1 from L in the gauge of K was found; the covering radius is then
/// certified below 1 + opt.tolerance.
inline bool is_covering(const ConvexBody& k, const Lattice2& l, const CoveringOptions& opt = {})
{
    return covering_radius(k.translated(-k.centroid()), l, opt).value <= 1.0 + 1e-9;
}

enum class LatticeObjective { densest_packing, thinnest_covering, min_phi };

inline const char* to_string(LatticeObjective o)
{
    switch (o) {
    case LatticeObjective::densest_packing: return "densest_packing";
    case LatticeObjective::thinnest_covering: return "thinnest_covering";
    case LatticeObjective::min_phi: return "min_phi";
    }
    return "?";
}

struct LatticeSearchOptions {
    int starts = 32;
    /// Objective evaluations per start.
    int evaluations_per_start = 300;
    std::uint64_t seed = 0;
    /// Covering radius accuracy during the search; the winner is re-evaluated at `final_covering`.
    CoveringOptions search_covering{8, 3e-3, 4'000'000, 320};
    CoveringOptions final_covering{};
    /// Optional extra start, e.g. a lattice from another method.
    std::vector<Lattice2> seeds;
    /// Covering objectives: leading search results re-ranked at full accuracy.
    std::size_t finalists = 6;
    /// Simplex evaluations at full accuracy from the best finalist.
    int final_evaluations = 60;
};

struct LatticeOptimum {
    /// Reduced; scaled so that rho = 1 (packing, phi) or rho' = 1 (covering).
    Lattice2 lattice;
    /// Density, covering density, or rho'/rho.
    double value = 0.0;
    double packing = 0.0;
    double covering = 0.0;
    /// Upper bracket of the certified covering radius at the lattice scale above.
    double covering_upper = 0.0;
    int evaluations = 0;
    bool budget_exhausted = false;
};

namespace detail {

inline Lattice2 lattice_from_params(const std::vector<double>& p)
{
    const Mat2 rot = Mat2::rotation(p[0]);
    return Lattice2(rot * Vec2{1.0, 0.0}, rot * Vec2{p[1], std::exp(p[2])});
}

inline std::vector<double> params_from_lattice(const Lattice2& in)
{
    const Lattice2 l = reduce(in);
    const double s = norm(l.b1);
    const double th = angle_of(l.b1);
    const Vec2 q = Mat2::rotation(-th) * l.b2 / s;
    return {th, q.x, std::log(std::abs(q.y))};
}

}  // namespace detail

/// Multistart simplex search over lattices b1 = R(t)(1, 0), b2 = R(t)(b, e^l). Objectives are
/// scale-invariant, so no constraint handling is needed: packing density area * rho^2 / det
/// (through the central symmetral for non-symmetric bodies), covering density
/// area * rho'^2 / det, and rho' / rho.
inline LatticeOptimum optimize_lattice(const ConvexBody& body, LatticeObjective objective,
                                       const LatticeSearchOptions& opt = {})
{
    const ConvexBody k = body.translated(-body.centroid());
    if (objective == LatticeObjective::min_phi && !k.symmetric())
        throw Error(ErrorKind::invalid_parameter, "lattice", "min_phi requires a centrally symmetric body");
    const double area_k = k.area();
    const Gauge gk(k);
    const Gauge gs(k.symmetric() ? k : central_symmetral(k));

    auto score = [&](const Lattice2& l, const CoveringOptions& co, double* rho, double* rhop, double* rhop_up) {
        double v = 0.0;
        if (objective == LatticeObjective::densest_packing) {
            const double r = packing_radius(gs, l);
            if (rho)
                *rho = r;
            v = -area_k * r * r / l.det();
        } else if (objective == LatticeObjective::thinnest_covering) {
            const CoveringResult c = covering_radius(gk, l, co);
            if (rhop)
                *rhop = c.value;
            if (rhop_up)
                *rhop_up = c.upper;
            v = area_k * c.value * c.value / l.det();
        } else {
            const double r = packing_radius(gk, l);
            const CoveringResult c = covering_radius(gk, l, co);
            if (rho)
                *rho = r;
            if (rhop)
                *rhop = c.value;
            if (rhop_up)
                *rhop_up = c.upper;
            v = c.value / r;
        }
        return v;
    };

    std::vector<std::vector<double>> starts;
    starts.push_back(detail::params_from_lattice(Lattice2::integer()));
    starts.push_back(detail::params_from_lattice(Lattice2::hexagonal()));
    for (const Lattice2& s : opt.seeds)
        starts.push_back(detail::params_from_lattice(s));
    for (int i = static_cast<int>(starts.size()); i < opt.starts; ++i) {
        std::mt19937_64 rng = task_rng(opt.seed, static_cast<std::uint64_t>(i));
        std::uniform_real_distribution<double> th(0.0, kPi), b(0.0, 1.0), lc(std::log(0.4), std::log(2.5));
        const double t = th(rng), bb = b(rng), l = lc(rng);
        starts.push_back({t, bb, l});
    }

    auto fun = [&](const std::vector<double>& p) {
        if (std::abs(p[2]) > 6.0)
            return 1e6;
        try {
            return score(detail::lattice_from_params(p), opt.search_covering, nullptr, nullptr, nullptr);
        } catch (const Error&) {
            return 1e6;
        }
    };
    const std::vector<MinimizeResult> runs = parallel_map<MinimizeResult>(starts.size(), [&](std::size_t i) {
        MinimizeOptions mo;
        mo.max_evaluations = opt.evaluations_per_start;
        mo.size_tolerance = 1e-7;
        mo.restart_tolerance = 1e-9;
        mo.max_restarts = 2;
        return nelder_mead(fun, starts[i], {0.15, 0.15, 0.15}, mo);
    });

    int evals = 0;
    std::vector<std::size_t> order(runs.size());
    for (std::size_t i = 0; i < runs.size(); ++i) {
        evals += runs[i].evaluations;
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return runs[a].value < runs[b].value; });

    // The search objective is a slightly loose lower estimate for covering objectives, so the
    // leading candidates and the fixed seeds are re-ranked at full accuracy.
    const bool covers = objective != LatticeObjective::densest_packing;
    std::vector<std::vector<double>> finalists;
    const std::size_t nfinal = covers ? std::min<std::size_t>(opt.finalists, order.size()) : 1;
    for (std::size_t i = 0; i < nfinal; ++i)
        finalists.push_back(runs[order[i]].x);
    if (covers)
        for (std::size_t i = 0; i < 2 + opt.seeds.size(); ++i)
            finalists.push_back(starts[i]);
    auto accurate = [&](const std::vector<double>& p) {
        if (std::abs(p[2]) > 6.0)
            return 1e6;
        try {
            return score(detail::lattice_from_params(p), opt.final_covering, nullptr, nullptr, nullptr);
        } catch (const Error&) {
            return 1e6;
        }
    };
    const std::vector<double> fvals =
        parallel_map<double>(finalists.size(), [&](std::size_t i) { return accurate(finalists[i]); });
    evals += static_cast<int>(finalists.size());
    std::size_t fb = 0;
    for (std::size_t i = 1; i < finalists.size(); ++i)
        if (fvals[i] < fvals[fb])
            fb = i;
    std::vector<double> best_p = finalists[fb];
    if (covers && opt.final_evaluations > 0) {
        MinimizeOptions mo;
        mo.max_evaluations = opt.final_evaluations;
        mo.max_restarts = 1;
        const MinimizeResult m = nelder_mead(accurate, best_p, {0.01, 0.01, 0.01}, mo);
        evals += m.evaluations;
        if (m.value < fvals[fb])
            best_p = m.x;
    }
    const bool converged = fb < nfinal ? runs[order[fb]].converged : true;

    LatticeOptimum out;
    Lattice2 l = reduce(detail::lattice_from_params(best_p));
    double rho = 0.0, rhop = 0.0, rhop_up = 0.0;
    const double v = score(l, opt.final_covering, &rho, &rhop, &rhop_up);
    out.evaluations = evals;
    out.budget_exhausted = !converged;
    if (objective == LatticeObjective::densest_packing) {
        out.value = -v;
        l = l.scaled(1.0 / rho);
        out.packing = 1.0;
    } else if (objective == LatticeObjective::thinnest_covering) {
        out.value = v;
        l = l.scaled(1.0 / rhop);
        out.covering = 1.0;
        out.covering_upper = rhop_up / rhop;
        out.packing = packing_radius(gs, l);
    } else {
        out.value = v;
        l = l.scaled(1.0 / rho);
        out.packing = 1.0;
        out.covering = rhop / rho;
        out.covering_upper = rhop_up / rho;
    }
    out.lattice = reduce(l);
    return out;
}

}  // namespace cvxspace
