#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cvxspace/john.hpp"
#include "cvxspace/lattice.hpp"

namespace cvxspace {

enum class Functional { delta_l, theta_l, phi_l };
enum class DensityMethod { hexagon_reduction, lattice_search, difference_body_reduction };

inline const char* to_string(Functional f)
{
    switch (f) {
    case Functional::delta_l: return "delta_l";
    case Functional::theta_l: return "theta_l";
    case Functional::phi_l: return "phi_l";
    }
    return "?";
}

inline const char* to_string(DensityMethod m)
{
    switch (m) {
    case DensityMethod::hexagon_reduction: return "hexagon_reduction";
    case DensityMethod::lattice_search: return "lattice_search";
    case DensityMethod::difference_body_reduction: return "difference_body_reduction";
    }
    return "?";
}

struct DensityOptions {
    /// Angular grid: pi / grid_steps.
    int grid_steps = 180;
    int refine_evaluations = 600;
    /// Compare every structural value with the lattice search.
    bool cross_check = true;
    double max_gap = 3e-3;
    LatticeSearchOptions search{};
};

struct DensityReport {
    Functional functional = Functional::delta_l;
    double value = 0.0;
    DensityMethod method = DensityMethod::hexagon_reduction;
    std::optional<ConvexBody> hexagon;
    std::optional<Lattice2> lattice;
    double cross_check_value = std::numeric_limits<double>::quiet_NaN();
    double cross_check_gap = std::numeric_limits<double>::quiet_NaN();
    /// Value is only an upper bound (lattice search for a covering density).
    bool upper_bound = false;
    bool budget_exhausted = false;
};

struct HexagonResult {
    ConvexBody hexagon;
    double area = 0.0;
    /// Slab normal angles (circumscribed) or vertex polar angles (inscribed), in [0, pi).
    std::array<double, 3> angles{};
};

namespace detail {

inline void require_symmetric(const ConvexBody& c, const char* what)
{
    if (!c.symmetric())
        throw Error(ErrorKind::domain, "densities", std::string(what) + " requires a centrally symmetric body");
}

struct SmallPolygon {
    std::array<Vec2, 8> v{};
    int n = 0;

    double area() const
    {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            s += cross(v[i], v[(i + 1) % n]);
        return 0.5 * s;
    }
};

/// Intersection of the slabs |u_k . x| <= h_k, k = 1..3, with u_1 and u_3 independent.
inline SmallPolygon slab_hexagon(const std::array<Vec2, 3>& u, const std::array<double, 3>& h)
{
    auto meet = [](Vec2 a, double ha, Vec2 b, double hb) {
        const double d = cross(a, b);
        return Vec2{(ha * b.y - hb * a.y) / d, (a.x * hb - b.x * ha) / d};
    };
    SmallPolygon poly;
    const Vec2 p = meet(u[0], h[0], u[2], h[2]), q = meet(u[0], h[0], -u[2], h[2]);
    poly.v = {p, -q, -p, q};
    poly.n = 4;
    if (poly.area() < 0.0)
        std::swap(poly.v[1], poly.v[3]);
    for (double sgn : {1.0, -1.0}) {
        const Vec2 nrm = u[1] * sgn;
        SmallPolygon next;
        for (int i = 0; i < poly.n; ++i) {
            const Vec2 a = poly.v[i], b = poly.v[(i + 1) % poly.n];
            const double fa = dot(nrm, a) - h[1], fb = dot(nrm, b) - h[1];
            if (fa <= 0.0)
                next.v[next.n++] = a;
            if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0))
                next.v[next.n++] = a + (b - a) * (fa / (fa - fb));
        }
        poly = next;
    }
    return poly;
}

/// Best grid triple 0 <= i < j < k < n of a symmetric objective to minimize.
template <class Fn>
std::array<int, 3> grid_argmin(int n, Fn&& fn)
{
    std::array<int, 3> best{0, 1, 2};
    double bv = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                const double v = fn(i, j, k);
                if (v < bv) {
                    bv = v;
                    best = {i, j, k};
                }
            }
    return best;
}

/// Tiling lattice of a centrally symmetric hexagon or parallelogram about the origin.
inline Lattice2 tiling_lattice(const ConvexBody& h)
{
    const std::size_t n = h.size();
    if (n == 6)
        return reduce(Lattice2(h.vertex(0) + h.vertex(1), h.vertex(1) + h.vertex(2)));
    if (n == 4)
        return reduce(Lattice2(h.vertex(0) + h.vertex(1), h.vertex(1) - h.vertex(0)));
    throw Error(ErrorKind::invalid_parameter, "densities", "tiling lattice needs a symmetric hexagon or parallelogram");
}

}  // namespace detail

/// Minimum-area centrally symmetric hexagon containing C, from three support slabs; the
/// witness may degenerate to a parallelogram.
inline HexagonResult min_circumscribed_hexagon(const ConvexBody& body, const DensityOptions& opt = {})
{
    detail::require_symmetric(body, "min_circumscribed_hexagon");
    const Vec2 c0 = body.centroid();
    const ConvexBody c = body.translated(-c0);
    const int n = opt.grid_steps;
    if (n < 6)
        throw Error(ErrorKind::invalid_parameter, "densities", "hexagon grid needs at least 6 steps");
    std::vector<Vec2> dir(n);
    std::vector<double> hs(n);
    for (int i = 0; i < n; ++i) {
        dir[i] = unit(kPi * i / n);
        hs[i] = c.support_unchecked(dir[i]);
    }
    auto area_at = [&](const std::array<Vec2, 3>& u, const std::array<double, 3>& h) {
        return detail::slab_hexagon(u, h).area();
    };
    const std::array<int, 3> g = detail::grid_argmin(
        n, [&](int i, int j, int k) { return area_at({dir[i], dir[j], dir[k]}, {hs[i], hs[j], hs[k]}); });

    auto objective = [&](const std::vector<double>& t) {
        const std::array<Vec2, 3> u{unit(t[0]), unit(t[1]), unit(t[2])};
        if (std::abs(cross(u[0], u[2])) < 1e-9)
            return 1e6;
        return area_at(u, {c.support_unchecked(u[0]), c.support_unchecked(u[1]), c.support_unchecked(u[2])});
    };
    const double step = kPi / n;
    MinimizeOptions mo;
    mo.max_evaluations = opt.refine_evaluations;
    mo.size_tolerance = 1e-7;
    const MinimizeResult m = nelder_mead(objective, {g[0] * step, g[1] * step, g[2] * step}, {0.5 * step, 0.5 * step, 0.5 * step}, mo);
    const std::array<Vec2, 3> u{unit(m.x[0]), unit(m.x[1]), unit(m.x[2])};
    const detail::SmallPolygon sp =
        detail::slab_hexagon(u, {c.support_unchecked(u[0]), c.support_unchecked(u[1]), c.support_unchecked(u[2])});
    std::vector<Vec2> hex;
    for (int i = 0; i < sp.n; ++i)
        hex.push_back(sp.v[static_cast<std::size_t>(i)] + c0);
    ConvexBody hb = ConvexBody::hull_of(std::move(hex), std::nullopt, "circumscribed_hexagon");
    HexagonResult out{hb, hb.area(), {}};
    for (int i = 0; i < 3; ++i)
        out.angles[static_cast<std::size_t>(i)] = std::fmod(std::fmod(m.x[static_cast<std::size_t>(i)], kPi) + kPi, kPi);
    return out;
}

/// Maximum-area centrally symmetric hexagon with vertices +-p(t_k) on the boundary of C.
inline HexagonResult max_inscribed_hexagon(const ConvexBody& body, const DensityOptions& opt = {})
{
    detail::require_symmetric(body, "max_inscribed_hexagon");
    const Vec2 c0 = body.centroid();
    const ConvexBody c = body.translated(-c0);
    const Gauge g(c);
    auto boundary = [&](double t) {
        const Vec2 u = unit(t);
        return u / g(u);
    };
    const int n = opt.grid_steps;
    if (n < 6)
        throw Error(ErrorKind::invalid_parameter, "densities", "hexagon grid needs at least 6 steps");
    std::vector<Vec2> pts(n);
    for (int i = 0; i < n; ++i)
        pts[i] = boundary(kPi * i / n);
    auto area3 = [](Vec2 a, Vec2 b, Vec2 d) { return cross(a, b) + cross(b, d) + cross(a, d); };
    const std::array<int, 3> gi =
        detail::grid_argmin(n, [&](int i, int j, int k) { return -area3(pts[i], pts[j], pts[k]); });
    auto objective = [&](const std::vector<double>& t) {
        return -area3(boundary(t[0]), boundary(t[1]), boundary(t[2]));
    };
    const double step = kPi / n;
    MinimizeOptions mo;
    mo.max_evaluations = opt.refine_evaluations;
    mo.size_tolerance = 1e-7;
    const MinimizeResult m = nelder_mead(objective, {gi[0] * step, gi[1] * step, gi[2] * step}, {0.5 * step, 0.5 * step, 0.5 * step}, mo);
    std::vector<Vec2> hex;
    for (double t : m.x) {
        hex.push_back(boundary(t) + c0);
        hex.push_back(-boundary(t) + c0);
    }
    ConvexBody hb = ConvexBody::hull_of(std::move(hex), std::nullopt, "inscribed_hexagon");
    HexagonResult out{hb, -m.value, {}};
    for (int i = 0; i < 3; ++i)
        out.angles[static_cast<std::size_t>(i)] = std::fmod(std::fmod(m.x[static_cast<std::size_t>(i)], kPi) + kPi, kPi);
    return out;
}

namespace detail {

inline void finish_cross_check(DensityReport& r, double other, double max_gap)
{
    r.cross_check_value = other;
    r.cross_check_gap = std::abs(r.value - other);
    if (r.cross_check_gap > max_gap)
        throw Error(ErrorKind::inconsistent_oracles, "densities",
                    std::string(to_string(r.functional)) + ": hexagon reduction " + std::to_string(r.value) +
                        " vs lattice search " + std::to_string(other) + " (gap " + std::to_string(r.cross_check_gap) + ")");
}

}  // namespace detail

/// Lattice packing density. Symmetric bodies: area over the minimal circumscribed symmetric
/// hexagon. Others: the same for the central symmetral, scaled by the area ratio.
inline DensityReport delta_lattice(const ConvexBody& k, const DensityOptions& opt = {})
{
    DensityReport r;
    r.functional = Functional::delta_l;
    const bool sym = k.symmetric();
    const ConvexBody s = sym ? k.translated(-k.centroid()) : central_symmetral(k);
    const HexagonResult h = min_circumscribed_hexagon(s, opt);
    r.value = std::min(1.0, k.area() / h.area);
    r.method = sym ? DensityMethod::hexagon_reduction : DensityMethod::difference_body_reduction;
    r.hexagon = h.hexagon;
    r.lattice = detail::tiling_lattice(h.hexagon.translated(-h.hexagon.centroid()));
    if (opt.cross_check) {
        const LatticeOptimum lo = optimize_lattice(k, LatticeObjective::densest_packing, opt.search);
        r.budget_exhausted = lo.budget_exhausted;
        detail::finish_cross_check(r, lo.value, opt.max_gap);
    }
    return r;
}

/// Lattice covering density. Symmetric bodies: area over the maximal inscribed symmetric
/// hexagon. Others: certified lattice search, an upper bound.
inline DensityReport theta_lattice(const ConvexBody& k, const DensityOptions& opt = {})
{
    DensityReport r;
    r.functional = Functional::theta_l;
    if (k.symmetric()) {
        const HexagonResult h = max_inscribed_hexagon(k, opt);
        r.value = std::max(1.0, k.area() / h.area);
        r.method = DensityMethod::hexagon_reduction;
        r.hexagon = h.hexagon;
        r.lattice = detail::tiling_lattice(h.hexagon.translated(-h.hexagon.centroid()));
        if (opt.cross_check) {
            const LatticeOptimum lo = optimize_lattice(k, LatticeObjective::thinnest_covering, opt.search);
            r.budget_exhausted = lo.budget_exhausted;
            detail::finish_cross_check(r, lo.value, opt.max_gap);
        }
        return r;
    }
    const LatticeOptimum lo = optimize_lattice(k, LatticeObjective::thinnest_covering, opt.search);
    // Scale by the certified upper bracket so the witness provably covers.
    const Lattice2 l = lo.lattice.scaled(1.0 / lo.covering_upper);
    const ConvexBody kc = k.translated(-k.centroid());
    const CoveringResult check = covering_radius(kc, l, opt.search.final_covering);
    // The scaled lattice covers by the first bracket; an attained radius above 1 here would
    // contradict it.
    if (check.value > 1.0 + 1e-9)
        throw Error(ErrorKind::non_convergence, "densities",
                    "covering verification failed for the lattice-search winner (attained radius " +
                        std::to_string(check.value) + ")");
    r.value = k.area() / l.det();
    r.method = DensityMethod::lattice_search;
    r.lattice = l;
    r.upper_bound = true;
    r.budget_exhausted = lo.budget_exhausted;
    return r;
}

/// Lattice packing-covering constant min rho'/rho, with the witness re-evaluated.
inline DensityReport phi_lattice(const ConvexBody& c, const DensityOptions& opt = {})
{
    detail::require_symmetric(c, "phi_lattice");
    DensityReport r;
    r.functional = Functional::phi_l;
    r.method = DensityMethod::lattice_search;
    // Searched in John position, lattice mapped back.
    const JohnNormalization jn = john_normalize(c);
    LatticeSearchOptions so = opt.search;
    for (Lattice2& s : so.seeds)
        s = s.transformed(jn.map.linear());
    const LatticeOptimum lo = optimize_lattice(jn.body, LatticeObjective::min_phi, so);
    const ConvexBody cc = jn.body.translated(-jn.body.centroid());
    const Gauge g(cc);
    const double rho = packing_radius(g, lo.lattice);
    const CoveringResult rp = covering_radius(g, lo.lattice, opt.search.final_covering);
    r.value = std::max(1.0, rp.value / rho);
    r.lattice = lo.lattice.transformed(jn.map.linear().inverse());
    r.upper_bound = true;
    r.budget_exhausted = lo.budget_exhausted;
    return r;
}

struct InequalityEntry {
    std::string name;
    double lhs = 0.0, rhs = 0.0;
    /// rhs - lhs for inequalities, |lhs - rhs| for equalities.
    double slack = 0.0;
    bool pass = false;
    /// false for readings that are reported but not claimed to hold.
    bool asserted = true;
    std::string label;
};

struct InequalityReport {
    double delta = 0.0, theta = 0.0, phi = std::numeric_limits<double>::quiet_NaN();
    std::vector<InequalityEntry> entries;
    bool all_asserted_pass() const
    {
        for (const InequalityEntry& e : entries)
            if (e.asserted && !e.pass)
                return false;
        return true;
    }
};

struct InequalityOptions {
    DensityOptions density{};
    /// Slack allowed on inequalities that are tight for ellipses.
    double tolerance = 4e-3;
    double equality_tolerance = 2e-3;
};

/// Relations between delta, theta and phi on one body. The covering-vs-packing bound with
/// phi needs a symmetric body; the hexagon/parallelogram equalities are checked only when the
/// body is one.
inline InequalityReport inequality_suite(const ConvexBody& k, const InequalityOptions& opt = {})
{
    InequalityReport rep;
    rep.delta = delta_lattice(k, opt.density).value;
    rep.theta = theta_lattice(k, opt.density).value;
    auto ineq = [&](std::string name, double lhs, double rhs, bool asserted, std::string label, double tol) {
        InequalityEntry e{std::move(name), lhs, rhs, rhs - lhs, rhs - lhs >= -tol, asserted, std::move(label)};
        rep.entries.push_back(std::move(e));
    };
    if (k.symmetric()) {
        rep.phi = phi_lattice(k, opt.density).value;
        ineq("theta <= phi^2 * delta", rep.theta, rep.phi * rep.phi * rep.delta, true, "symmetric bodies", opt.tolerance);
        if (k.size() == 4 || k.size() == 6) {
            for (const auto& [nm, v] : {std::pair{"delta = 1", rep.delta}, std::pair{"theta = 1", rep.theta}}) {
                InequalityEntry e{nm, v, 1.0, std::abs(v - 1.0), std::abs(v - 1.0) <= opt.equality_tolerance, true,
                                  "symmetric hexagon or parallelogram"};
                rep.entries.push_back(std::move(e));
            }
        }
    }
    const double def = std::max(0.0, 1.0 - rep.delta);
    ineq("1 - delta <= theta", def, rep.theta, true, "as printed", 1e-12);
    ineq("theta <= 1.25 sqrt(1 - delta)", rep.theta, 1.25 * std::sqrt(def), false,
         "as printed; fails whenever delta > 0.36", 0.0);
    ineq("theta - 1 <= 1.25 sqrt(1 - delta)", rep.theta - 1.0, 1.25 * std::sqrt(def), true, "corrected reading", 1e-12);
    return rep;
}

}  // namespace cvxspace
