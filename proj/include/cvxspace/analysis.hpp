#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cvxspace/banach_mazur.hpp"
#include "cvxspace/density.hpp"
#include "cvxspace/hausdorff.hpp"
#include "cvxspace/john.hpp"

namespace cvxspace {

enum class FunctionalId { delta_l, theta_l, phi_l, delta_minus_theta_combo, user_composite };
enum class MetricKind { hausdorff, bm };

inline const char* to_string(FunctionalId f)
{
    switch (f) {
    case FunctionalId::delta_l: return "delta_l";
    case FunctionalId::theta_l: return "theta_l";
    case FunctionalId::phi_l: return "phi_l";
    case FunctionalId::delta_minus_theta_combo: return "delta_minus_theta";
    case FunctionalId::user_composite: return "user_composite";
    }
    return "?";
}

inline FunctionalId parse_functional_id(const std::string& s)
{
    if (s == "delta" || s == "delta_l")
        return FunctionalId::delta_l;
    if (s == "theta" || s == "theta_l")
        return FunctionalId::theta_l;
    if (s == "phi" || s == "phi_l")
        return FunctionalId::phi_l;
    if (s == "delta_minus_theta" || s == "combo")
        return FunctionalId::delta_minus_theta_combo;
    throw Error(ErrorKind::invalid_parameter, "analysis", "unknown functional '" + s + "'");
}

inline const char* to_string(MetricKind m) { return m == MetricKind::hausdorff ? "hausdorff" : "bm"; }

inline MetricKind parse_metric(const std::string& s)
{
    if (s == "hausdorff" || s == "hstar")
        return MetricKind::hausdorff;
    if (s == "bm")
        return MetricKind::bm;
    throw Error(ErrorKind::invalid_parameter, "analysis", "unknown metric '" + s + "'");
}

/// A functional on bodies. `user` is consulted only for user_composite.
struct FunctionalSpec {
    FunctionalId id = FunctionalId::delta_l;
    std::function<double(const ConvexBody&)> user;
    std::string label;

    static FunctionalSpec of(FunctionalId id) { return {id, {}, to_string(id)}; }
    static FunctionalSpec composite(std::string label, std::function<double(const ConvexBody&)> fn)
    {
        return {FunctionalId::user_composite, std::move(fn), std::move(label)};
    }
    bool needs_symmetric() const { return id == FunctionalId::phi_l; }
    bool uses_lattice_search(const ConvexBody& k) const
    {
        return id == FunctionalId::phi_l ||
               ((id == FunctionalId::theta_l || id == FunctionalId::delta_minus_theta_combo) && !k.symmetric());
    }
};

/// Density settings used inside scans. The hexagon reductions run without the lattice-search
/// cross check; lattice searches use few starts and are warm-started from a related body.
struct EvaluatorOptions {
    DensityOptions delta;
    DensityOptions theta;
    DensityOptions phi;
    /// Evaluate on the John-normalized image (all three functionals are affine invariant).
    bool normalize = true;

    static EvaluatorOptions fast()
    {
        EvaluatorOptions e;
        for (DensityOptions* d : {&e.delta, &e.theta, &e.phi}) {
            d->grid_steps = 72;
            d->refine_evaluations = 400;
            d->cross_check = false;
            d->search.starts = 6;
            d->search.evaluations_per_start = 150;
            d->search.finalists = 3;
            d->search.final_evaluations = 40;
        }
        e.phi.search.starts = 4;
        e.phi.search.evaluations_per_start = 100;
        e.phi.search.finalists = 2;
        e.phi.search.final_evaluations = 30;
        e.phi.search.search_covering = CoveringOptions{6, 5e-3, 4'000'000, 120};
        return e;
    }
};

struct FunctionalValue {
    double value = 0.0;
    /// Witness lattice in the frame of the evaluated body, when the functional has one.
    std::optional<Lattice2> lattice;
};

/// f(K). `seeds` are lattices in the frame of K used as extra search starts.
inline FunctionalValue evaluate_functional(const FunctionalSpec& f, const ConvexBody& k,
                                           const EvaluatorOptions& opt = EvaluatorOptions::fast(),
                                           const std::vector<Lattice2>& seeds = {})
{
    if (f.id == FunctionalId::user_composite) {
        if (!f.user)
            throw Error(ErrorKind::invalid_parameter, "analysis", "user_composite functional without an evaluator");
        return {f.user(k), std::nullopt};
    }
    if (f.needs_symmetric() && !k.symmetric())
        throw Error(ErrorKind::domain, "analysis", std::string(to_string(f.id)) + " needs a centrally symmetric body");
    ConvexBody body = k;
    Mat2 to_frame = Mat2::identity();
    if (opt.normalize) {
        const JohnNormalization jn = john_normalize(k);
        body = jn.body;
        to_frame = jn.map.linear();
    }
    const Mat2 back = to_frame.inverse();
    auto with_seeds = [&](DensityOptions d) {
        for (const Lattice2& s : seeds)
            d.search.seeds.push_back(s.transformed(to_frame));
        return d;
    };
    auto out = [&](const DensityReport& r) {
        FunctionalValue v{r.value, std::nullopt};
        if (r.lattice)
            v.lattice = r.lattice->transformed(back);
        return v;
    };
    switch (f.id) {
    case FunctionalId::delta_l: return out(delta_lattice(body, opt.delta));
    case FunctionalId::theta_l: return out(theta_lattice(body, with_seeds(opt.theta)));
    case FunctionalId::phi_l: return out(phi_lattice(body, with_seeds(opt.phi)));
    case FunctionalId::delta_minus_theta_combo: {
        const FunctionalValue t = out(theta_lattice(body, with_seeds(opt.theta)));
        return {delta_lattice(body, opt.delta).value - t.value, t.lattice};
    }
    case FunctionalId::user_composite: break;
    }
    return {};
}

/// Upper bound on theta_l or phi_l from one lattice: area(K) rho'^2 / det for theta, rho' / rho
/// for phi, with the certified covering bracket.
inline double value_at_lattice(FunctionalId f, const ConvexBody& k, const Lattice2& l,
                               const CoveringOptions& covering = {})
{
    const Gauge g(k.translated(-k.centroid()));
    const double rp = covering_radius(g, l, covering).upper;
    if (f == FunctionalId::theta_l)
        return k.area() * rp * rp / l.det();
    if (f == FunctionalId::phi_l)
        return rp / packing_radius(g, l);
    throw Error(ErrorKind::invalid_parameter, "analysis", "value_at_lattice supports theta_l and phi_l");
}

/// Random polygon with 3..max_points vertices (pairs when symmetric), centred at its centroid.
inline ConvexBody random_body(std::mt19937_64& rng, bool symmetric, int max_points = 12)
{
    std::uniform_int_distribution<int> count(symmetric ? 2 : 3, symmetric ? std::max(2, max_points / 2) : max_points);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi), rad(0.4, 1.0), stretch(0.5, 2.0);
    for (;;) {
        const int n = count(rng);
        const double sx = stretch(rng), sy = stretch(rng);
        std::vector<Vec2> pts;
        for (int i = 0; i < n; ++i) {
            const double t = ang(rng), r = rad(rng);
            const Vec2 p{sx * r * std::cos(t), sy * r * std::sin(t)};
            pts.push_back(p);
            if (symmetric)
                pts.push_back(-p);
        }
        try {
            ConvexBody k = ConvexBody::hull_of(pts, std::nullopt, symmetric ? "random_symmetric" : "random");
            if (symmetric && !k.symmetric())
                continue;
            if (k.area() < 0.05 * k.diameter() * k.diameter())
                continue;
            return k.centered();
        } catch (const Error&) {
        }
    }
}

/// John image scaled by min(1.2, 2 / circumradius) >= 1, so the body sits in K^{2*} with room
/// for small perturbations where its shape allows.
inline ConvexBody place_in_normalized_space(const ConvexBody& k)
{
    const ConvexBody j = john_normalize(k).body;
    const double s = std::max(1.0, std::min(1.2, 2.0 / j.circumradius_about({0.0, 0.0})));
    return j.scaled(s).with_provenance(k.provenance());
}

/// Random body placed in K^{2*}.
inline ConvexBody random_normalized_body(std::mt19937_64& rng, bool symmetric, int max_points = 12)
{
    for (;;) {
        try {
            return place_in_normalized_space(random_body(rng, symmetric, max_points));
        } catch (const Error&) {
        }
    }
}

/// Support-function bumps: each of `bumps` random directions u either gains the point
/// s(u) + m u, with s(u) a support vertex, or loses the cap beyond <x, u> = h(u) - m, with m
/// uniform in (0, radius].
/// Symmetric bases get mirrored bump pairs so the result stays symmetric. Throws invalid_body
/// if the result degenerates.
inline ConvexBody bump_perturbation(const ConvexBody& k0, double radius, int bumps, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi), unit01(0.0, 1.0);
    std::bernoulli_distribution outward(0.5);
    const bool sym = k0.symmetric();
    const Vec2 c = k0.centroid();
    std::vector<Vec2> pts(k0.vertices().begin(), k0.vertices().end());
    std::vector<std::pair<Vec2, double>> cuts;
    for (int b = 0; b < bumps; ++b) {
        const Vec2 u = unit(ang(rng));
        const double m = radius * (1.0 - unit01(rng));
        const double h = k0.support(u);
        if (outward(rng)) {
            Vec2 s = k0.vertex(0);
            for (const Vec2& v : k0.vertices())
                if (dot(v, u) > dot(s, u))
                    s = v;
            const Vec2 p = s + u * m;
            pts.push_back(p);
            if (sym)
                pts.push_back(c * 2.0 - p);
        } else {
            cuts.emplace_back(u, h - m);
            if (sym)
                cuts.emplace_back(-u, k0.support(-u) - m);
        }
    }
    ConvexBody k = ConvexBody::hull_of(std::move(pts));
    for (const auto& [u, h] : cuts)
        k = intersect_halfplane(k, u, h);
    if (sym && !k.symmetric())
        throw Error(ErrorKind::invalid_body, "analysis", "mirrored perturbation lost central symmetry");
    return k.with_provenance("bump(" + k0.provenance() + ")");
}

/// Ratio lambda / mu with mu K0 <= K <= lambda K0 about `center`, an explicit BM witness
/// (scaling about the centre).
inline double containment_ratio(const ConvexBody& k, const ConvexBody& k0, Vec2 center)
{
    const ConvexBody a = k.translated(-center), b = k0.translated(-center);
    const Gauge ga(a), gb(b);
    double lambda = 0.0, inv_mu = 0.0;
    for (const Vec2& v : a.vertices())
        lambda = std::max(lambda, gb(v));
    for (const Vec2& v : b.vertices())
        inv_mu = std::max(inv_mu, ga(v));
    return lambda * inv_mu;
}

/// Witnessed BM distance: the better of the solver and an optional constructive ratio.
inline double witnessed_bm(const ConvexBody& k1, const ConvexBody& k2, std::optional<double> constructive_ratio,
                           bool use_solver, std::uint64_t seed)
{
    double d = constructive_ratio ? std::log(*constructive_ratio) : std::numeric_limits<double>::infinity();
    if (use_solver) {
        BmOptions bo;
        bo.seed = seed;
        d = std::min(d, bm_distance(k1, k2, bo).value);
    }
    return std::max(d, 0.0);
}

struct ScanSample {
    std::size_t index = 0;
    /// Perturbation radius, or the requested distance bound for pair scans.
    double radius = 0.0;
    double distance = 0.0;
    double f_base = 0.0, f_sample = 0.0;
    double ratio = 0.0;
    /// Bound the sample was checked against (NaN when only estimating).
    double bound = std::nan("");
    bool pass = true;
};

struct ScanReport {
    std::string functional;
    std::string base;
    MetricKind metric = MetricKind::bm;
    std::string model;
    std::size_t sample_count = 0;
    std::size_t discarded = 0;
    double max_ratio = 0.0;
    /// Upper cap asserted on max_ratio, if any.
    std::optional<double> cap;
    bool pass = true;
    /// "estimate (lower)": finite samples bound a limsup from below only.
    std::string kind = "estimate (lower)";
    std::vector<ScanSample> samples;
    std::vector<std::string> log;
};

/// Largest |f_i - f0| / d_i over samples with d_i > 0.
inline double ratio_estimate(double f0, const std::vector<double>& values, const std::vector<double>& distances)
{
    double best = 0.0;
    for (std::size_t i = 0; i < values.size() && i < distances.size(); ++i)
        if (distances[i] > 0.0)
            best = std::max(best, std::abs(values[i] - f0) / distances[i]);
    return best;
}

/// Caps on the supderivative: f* <= 2n (Hausdorff, in K^{2*}) and f' <= n (BM) for the
/// densities, and f' <= 1 for phi, with n = 2.
inline std::optional<double> supderivative_cap(FunctionalId f, MetricKind m)
{
    if (f == FunctionalId::delta_l || f == FunctionalId::theta_l)
        return m == MetricKind::hausdorff ? 4.0 : 2.0;
    if (f == FunctionalId::phi_l && m == MetricKind::bm)
        return 1.0;
    return std::nullopt;
}

/// Largest admissible radius: the d-constant of the matching Lipschitz statement.
inline double radius_limit(FunctionalId f, MetricKind m)
{
    if (m == MetricKind::hausdorff)
        return 1.0 / 3.0;
    return f == FunctionalId::phi_l ? 0.5 : 0.25;
}

struct SupderivativeOptions {
    double radius = 0.05;
    /// Samples at each of the radii r, r/2, r/4.
    int samples = 16;
    int bumps = 16;
    std::uint64_t seed = 0;
    /// Numerical slack added to the cap.
    double slack = 1e-2;
    bool use_bm_solver = true;
    EvaluatorOptions evaluator = EvaluatorOptions::fast();
};

/// max |f(K) - f(K0)| / dist(K, K0) over bump perturbations of K0 at three shrinking radii,
/// one report per metric over a shared sample set. Hausdorff samples leaving K^{2*} are
/// discarded; BM distances are witnessed upper bounds, so ratios are lower estimates.
inline std::vector<ScanReport> supderivative_estimates(const FunctionalSpec& f, const ConvexBody& k0,
                                                       const std::vector<MetricKind>& metrics,
                                                       const SupderivativeOptions& opt = {})
{
    if (metrics.empty())
        throw Error(ErrorKind::invalid_parameter, "analysis", "no metric requested");
    if (!(opt.radius > 0.0) || opt.samples < 1)
        throw Error(ErrorKind::invalid_parameter, "analysis", "radius and sample count must be positive");
    bool want_h = false;
    for (MetricKind m : metrics) {
        if (f.id != FunctionalId::user_composite && opt.radius > radius_limit(f.id, m) + 1e-12)
            throw Error(ErrorKind::invalid_parameter, "analysis",
                        "radius " + std::to_string(opt.radius) + " exceeds " + std::to_string(radius_limit(f.id, m)) +
                            " for metric " + to_string(m));
        want_h = want_h || m == MetricKind::hausdorff;
    }
    if (want_h && !in_normalized_space(k0))
        throw Error(ErrorKind::domain, "analysis", "hausdorff supderivative needs K0 in K^{2*}");
    if (f.needs_symmetric() && !k0.symmetric())
        throw Error(ErrorKind::domain, "analysis", "functional needs a centrally symmetric base body");

    const FunctionalValue base = evaluate_functional(f, k0, opt.evaluator);
    std::vector<Lattice2> seeds;
    if (base.lattice)
        seeds.push_back(*base.lattice);

    struct Row {
        bool ok = false;
        std::string why;
        double radius = 0.0, value = 0.0, dh = -1.0, dbm = -1.0;
    };
    const std::size_t per = static_cast<std::size_t>(opt.samples);
    const std::size_t total = 3 * per;
    const Vec2 c0 = k0.centroid();
    const std::vector<Row> rows = parallel_map<Row>(total, [&](std::size_t i) {
        Row r;
        r.radius = opt.radius / static_cast<double>(1u << (i / per));
        std::mt19937_64 rng = task_rng(opt.seed, i);
        try {
            const ConvexBody k = bump_perturbation(k0, r.radius, opt.bumps, rng);
            const bool inside = in_normalized_space(k);
            for (MetricKind m : metrics) {
                if (m == MetricKind::hausdorff) {
                    if (inside)
                        r.dh = hausdorff(k, k0).value;
                } else {
                    r.dbm = witnessed_bm(k, k0, containment_ratio(k, k0, c0), opt.use_bm_solver,
                                         opt.seed + i);
                }
            }
            r.value = evaluate_functional(f, k, opt.evaluator, seeds).value;
            r.ok = true;
        } catch (const Error& e) {
            r.why = e.what();
        }
        return r;
    });

    std::vector<ScanReport> out;
    for (MetricKind m : metrics) {
        ScanReport rep;
        rep.functional = f.label;
        rep.base = k0.provenance();
        rep.metric = m;
        rep.model = std::to_string(opt.bumps) + " support-function bumps (" +
                    (k0.symmetric() ? std::string("mirrored pairs") : std::string("unpaired")) +
                    "), radii r, r/2, r/4 with r = " + std::to_string(opt.radius);
        rep.cap = supderivative_cap(f.id, m);
        for (std::size_t i = 0; i < total; ++i) {
            const Row& r = rows[i];
            const double d = m == MetricKind::hausdorff ? r.dh : r.dbm;
            if (!r.ok || !(d > 0.0)) {
                ++rep.discarded;
                rep.log.push_back("sample " + std::to_string(i) + " discarded: " +
                                  (!r.ok ? r.why : (d < 0.0 ? "outside K^{2*}" : "zero distance")));
                continue;
            }
            ScanSample s;
            s.index = i;
            s.radius = r.radius;
            s.distance = d;
            s.f_base = base.value;
            s.f_sample = r.value;
            s.ratio = std::abs(r.value - base.value) / d;
            if (rep.cap) {
                s.bound = *rep.cap + opt.slack;
                s.pass = s.ratio <= s.bound;
            }
            rep.max_ratio = std::max(rep.max_ratio, s.ratio);
            rep.pass = rep.pass && s.pass;
            rep.samples.push_back(s);
        }
        rep.sample_count = rep.samples.size();
        if (rep.samples.empty())
            throw Error(ErrorKind::domain, "analysis", "every perturbation sample was discarded");
        out.push_back(std::move(rep));
    }
    return out;
}

inline ScanReport supderivative_estimate(const FunctionalSpec& f, const ConvexBody& k0, MetricKind metric,
                                         const SupderivativeOptions& opt = {})
{
    return supderivative_estimates(f, k0, {metric}, opt).front();
}

enum class GrowthBound { hausdorff_power, bm_exponential, phi_exponential };

inline const char* to_string(GrowthBound g)
{
    switch (g) {
    case GrowthBound::hausdorff_power: return "f(K) <= (1 + d*)^4 f(K0)";
    case GrowthBound::bm_exponential: return "f(K) <= e^(2 d) f(K0)";
    case GrowthBound::phi_exponential: return "phi(C) <= e^d phi(C0)";
    }
    return "?";
}

inline GrowthBound parse_growth_bound(const std::string& s)
{
    if (s == "hausdorff" || s == "T2")
        return GrowthBound::hausdorff_power;
    if (s == "bm" || s == "T3")
        return GrowthBound::bm_exponential;
    if (s == "phi" || s == "T4")
        return GrowthBound::phi_exponential;
    throw Error(ErrorKind::invalid_parameter, "analysis", "unknown growth bound '" + s + "'");
}

struct BoundEntry {
    std::string functional;
    /// "K vs K0" or "K0 vs K": the distance is symmetric, so both directions are checked.
    std::string direction;
    double lhs = 0.0, factor = 1.0, rhs = 0.0;
    double slack = 0.0;
    bool pass = true;
};

struct BoundCheck {
    GrowthBound kind = GrowthBound::hausdorff_power;
    double distance = 0.0;
    DistanceStatus distance_status = DistanceStatus::exact;
    std::vector<BoundEntry> entries;
    bool pass = true;
};

struct BoundCheckOptions {
    EvaluatorOptions evaluator = EvaluatorOptions::fast();
    /// Relative numerical slack on the right-hand side.
    double tolerance = 1e-6;
    /// Explicit witness ratio r with K0 <= sigma(K) <= r K0 + x, verified by the caller.
    std::optional<double> witness_ratio;
    bool use_bm_solver = true;
    std::uint64_t seed = 0;
    /// Seeds for lattice searches, in the frames of K and K0 respectively.
    std::vector<Lattice2> seeds_k, seeds_k0;
    /// Linear map with K close to frame(K0). When set, lattice-search winners are exchanged
    /// between the two bodies and each value is re-searched from the other's winner.
    std::optional<Mat2> frame;
};

/// Evaluates both sides of a growth bound for every applicable functional: the Hausdorff power
/// bound for delta and theta in K^{2*}, the BM exponential bound for delta and theta, and the
/// BM bound for phi on symmetric bodies. BM distances are witnessed upper bounds; the bounds
/// increase with the distance, so the check stays sound.
inline BoundCheck theorem_bound_check(GrowthBound kind, const ConvexBody& k, const ConvexBody& k0,
                                      const BoundCheckOptions& opt = {})
{
    BoundCheck out;
    out.kind = kind;
    std::vector<FunctionalId> fs;
    double exponent = 0.0;
    switch (kind) {
    case GrowthBound::hausdorff_power:
        if (!in_normalized_space(k) || !in_normalized_space(k0))
            throw Error(ErrorKind::domain, "analysis", "Hausdorff growth bound needs both bodies in K^{2*}");
        out.distance = hausdorff(k, k0).value;
        out.distance_status = DistanceStatus::exact;
        fs = {FunctionalId::delta_l, FunctionalId::theta_l};
        break;
    case GrowthBound::bm_exponential:
        fs = {FunctionalId::delta_l, FunctionalId::theta_l};
        exponent = 2.0;
        break;
    case GrowthBound::phi_exponential:
        if (!k.symmetric() || !k0.symmetric())
            throw Error(ErrorKind::domain, "analysis", "phi growth bound needs centrally symmetric bodies");
        fs = {FunctionalId::phi_l};
        exponent = 1.0;
        break;
    }
    if (kind != GrowthBound::hausdorff_power) {
        out.distance = witnessed_bm(k, k0, opt.witness_ratio, opt.use_bm_solver, opt.seed);
        out.distance_status = DistanceStatus::upper_bound;
    }
    const double factor = kind == GrowthBound::hausdorff_power ? std::pow(1.0 + out.distance, 4.0)
                                                               : std::exp(exponent * out.distance);
    for (FunctionalId id : fs) {
        const FunctionalSpec f = FunctionalSpec::of(id);
        const FunctionalValue vk = evaluate_functional(f, k, opt.evaluator, opt.seeds_k);
        const FunctionalValue vk0 = evaluate_functional(f, k0, opt.evaluator, opt.seeds_k0);
        double fk = vk.value, fk0 = vk0.value;
        if (opt.frame && vk.lattice && vk0.lattice && f.uses_lattice_search(k) && f.uses_lattice_search(k0)) {
            // Both values are upper bounds, so the smaller one is kept.
            fk = std::min(fk, value_at_lattice(id, k, vk0.lattice->transformed(*opt.frame)));
            fk0 = std::min(fk0, value_at_lattice(id, k0, vk.lattice->transformed(opt.frame->inverse())));
        }
        for (int dir = 0; dir < 2; ++dir) {
            BoundEntry e;
            e.functional = to_string(id);
            e.direction = dir == 0 ? "K vs K0" : "K0 vs K";
            e.lhs = dir == 0 ? fk : fk0;
            e.factor = factor;
            e.rhs = factor * (dir == 0 ? fk0 : fk);
            e.slack = e.rhs - e.lhs;
            e.pass = e.lhs <= e.rhs * (1.0 + opt.tolerance);
            out.pass = out.pass && e.pass;
            out.entries.push_back(e);
        }
    }
    return out;
}

struct LipschitzConstants {
    double c = 0.0, d = 0.0;
};

/// Explicit planar constants: (12, 1/3) covering and (8, 1/3) packing in K^{2*} under the
/// Hausdorff metric; (6, 1/4) covering and (4, 1/4) packing under BM; (5/2, 1/2) for phi.
inline std::optional<LipschitzConstants> lipschitz_constants(FunctionalId f, MetricKind m)
{
    if (m == MetricKind::hausdorff) {
        if (f == FunctionalId::theta_l)
            return LipschitzConstants{12.0, 1.0 / 3.0};
        if (f == FunctionalId::delta_l)
            return LipschitzConstants{8.0, 1.0 / 3.0};
        return std::nullopt;
    }
    if (f == FunctionalId::theta_l)
        return LipschitzConstants{6.0, 0.25};
    if (f == FunctionalId::delta_l)
        return LipschitzConstants{4.0, 0.25};
    if (f == FunctionalId::phi_l)
        return LipschitzConstants{2.5, 0.5};
    return std::nullopt;
}

/// Pair K1 <= K2 <= r K1 (about the origin) from K1 plus points of r K1, then mapped by `a`.
struct ConstructivePair {
    ConvexBody k1, k2;
    /// K1 <= a^{-1}(K2) <= ratio K1.
    double ratio = 1.0;
    AffineMap2 a;
};

inline ConstructivePair constructive_pair(const ConvexBody& k1, double ratio, int extra_points, bool map_affinely,
                                          std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi), lam(1.0, ratio), u(-0.4, 0.4);
    const ConvexBody k = k1;
    const Gauge g(k);
    const bool sym = k.symmetric();
    std::vector<Vec2> pts(k.vertices().begin(), k.vertices().end());
    for (int i = 0; i < extra_points; ++i) {
        const Vec2 dir = unit(ang(rng));
        const Vec2 p = dir * (lam(rng) / g(dir));
        pts.push_back(p);
        if (sym)
            pts.push_back(-p);
    }
    // One point on the outer boundary pins the containment ratio.
    const Vec2 dir = unit(ang(rng));
    pts.push_back(dir * (ratio / g(dir)));
    if (sym)
        pts.push_back(-(dir * (ratio / g(dir))));
    ConvexBody k2 = ConvexBody::hull_of(std::move(pts), std::nullopt, "constructive(" + k.provenance() + ")");
    AffineMap2 a;
    if (map_affinely) {
        for (;;) {
            const Mat2 m{1.0 + u(rng), u(rng), u(rng), 1.0 + u(rng)};
            if (std::abs(m.det()) > 0.3) {
                a = AffineMap2(m, {u(rng), u(rng)});
                break;
            }
        }
        k2 = apply_affine(k2, a);
    }
    return {k, std::move(k2), ratio, a};
}

struct LipschitzOptions {
    std::uint64_t seed = 0;
    EvaluatorOptions evaluator = EvaluatorOptions::fast();
    /// Share of symmetric pairs for the densities (phi always uses symmetric pairs).
    double symmetric_share = 0.5;
    bool use_bm_solver = true;
    double tolerance = 1e-6;
};

/// Checks |f(K1) - f(K2)| <= c dist(K1, K2) on random pairs with dist <= d. Hausdorff pairs
/// are bump perturbations inside K^{2*}; BM pairs are constructive, with a known containment
/// ratio r <= e^d, so every asserted inequality uses a witnessed distance.
inline ScanReport lipschitz_scan(const FunctionalSpec& f, MetricKind metric, int pairs, double c, double d,
                                 const LipschitzOptions& opt = {})
{
    if (pairs < 1 || !(c > 0.0) || !(d > 0.0))
        throw Error(ErrorKind::invalid_parameter, "analysis", "pairs, c and d must be positive");
    struct Row {
        double dist = 0.0, f1 = 0.0, f2 = 0.0, req = 0.0;
        int attempts = 0;
    };
    const std::vector<Row> rows = parallel_map<Row>(static_cast<std::size_t>(pairs), [&](std::size_t i) {
        std::mt19937_64 rng = task_rng(opt.seed, i);
        std::uniform_real_distribution<double> unit01(0.0, 1.0);
        const bool sym = f.needs_symmetric() || unit01(rng) < opt.symmetric_share;
        Row r;
        for (;;) {
            ++r.attempts;
            try {
                const ConvexBody k1 = random_normalized_body(rng, sym);
                if (metric == MetricKind::hausdorff) {
                    const double rad = d * (0.05 + 0.95 * unit01(rng)) / 2.0;
                    const ConvexBody k2 = bump_perturbation(k1, rad, 16, rng);
                    if (!in_normalized_space(k2))
                        continue;
                    r.dist = hausdorff(k1, k2).value;
                    if (!(r.dist > 0.0) || r.dist > d)
                        continue;
                    r.req = rad;
                    const FunctionalValue v1 = evaluate_functional(f, k1, opt.evaluator);
                    std::vector<Lattice2> seeds;
                    if (v1.lattice)
                        seeds.push_back(*v1.lattice);
                    r.f1 = v1.value;
                    r.f2 = evaluate_functional(f, k2, opt.evaluator, seeds).value;
                } else {
                    const double t = d * (0.05 + 0.95 * unit01(rng));
                    const ConstructivePair p = constructive_pair(k1, std::exp(t), 6, true, rng);
                    r.req = t;
                    r.dist = witnessed_bm(p.k1, p.k2, p.ratio, opt.use_bm_solver, opt.seed + i);
                    if (!(r.dist > 0.0))
                        continue;
                    const FunctionalValue v1 = evaluate_functional(f, p.k1, opt.evaluator);
                    std::vector<Lattice2> seeds;
                    if (v1.lattice)
                        seeds.push_back(v1.lattice->transformed(p.a.linear()));
                    r.f1 = v1.value;
                    r.f2 = evaluate_functional(f, p.k2, opt.evaluator, seeds).value;
                }
                return r;
            } catch (const Error&) {
                if (r.attempts > 50)
                    throw;
            }
        }
    });
    ScanReport rep;
    rep.functional = f.label;
    rep.base = "random pairs";
    rep.metric = metric;
    rep.model = metric == MetricKind::hausdorff ? "K^{2*} bump pairs, distance <= " + std::to_string(d)
                                                : "constructive containment pairs, ratio <= e^" + std::to_string(d);
    rep.kind = "Lipschitz check";
    rep.cap = c;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& r = rows[i];
        ScanSample s;
        s.index = i;
        s.radius = r.req;
        s.distance = r.dist;
        s.f_base = r.f1;
        s.f_sample = r.f2;
        s.ratio = std::abs(r.f1 - r.f2) / r.dist;
        s.bound = c;
        s.pass = std::abs(r.f1 - r.f2) <= c * r.dist + opt.tolerance;
        rep.max_ratio = std::max(rep.max_ratio, s.ratio);
        rep.pass = rep.pass && s.pass;
        rep.discarded += static_cast<std::size_t>(r.attempts - 1);
        rep.samples.push_back(s);
    }
    rep.sample_count = rep.samples.size();
    return rep;
}

struct SmaxReport {
    std::string functional;
    MetricKind metric = MetricKind::bm;
    double estimate = 0.0;
    std::optional<double> cap;
    bool pass = true;
    std::vector<ScanReport> per_body;
    /// Pairwise replay of |f(K1) - f(K2)| <= estimate * dist; exploratory, never asserted.
    std::size_t replay_pairs = 0;
    std::size_t replay_exceed = 0;
    double replay_max_ratio = 0.0;
};

/// Max of the supderivative estimates over a finite family, with the pairwise replay of the
/// conjectured global Lipschitz bound at that estimate.
inline SmaxReport sup_derivative_max_scan(const FunctionalSpec& f, const std::vector<ConvexBody>& family,
                                          MetricKind metric, const SupderivativeOptions& opt = {},
                                          bool replay = true)
{
    SmaxReport out;
    out.functional = f.label;
    out.metric = metric;
    out.cap = supderivative_cap(f.id, metric);
    std::vector<double> values;
    for (std::size_t i = 0; i < family.size(); ++i) {
        SupderivativeOptions o = opt;
        o.seed = opt.seed + 7919 * i;
        ScanReport r = supderivative_estimate(f, family[i], metric, o);
        out.estimate = std::max(out.estimate, r.max_ratio);
        out.pass = out.pass && r.pass;
        values.push_back(r.samples.front().f_base);
        out.per_body.push_back(std::move(r));
    }
    if (replay) {
        for (std::size_t i = 0; i < family.size(); ++i)
            for (std::size_t j = i + 1; j < family.size(); ++j) {
                const double dist = metric == MetricKind::hausdorff
                                        ? hausdorff(family[i], family[j]).value
                                        : witnessed_bm(family[i], family[j], std::nullopt, true, opt.seed + i * 131 + j);
                ++out.replay_pairs;
                if (!(dist > 0.0))
                    continue;
                const double rat = std::abs(values[i] - values[j]) / dist;
                out.replay_max_ratio = std::max(out.replay_max_ratio, rat);
                if (rat > out.estimate)
                    ++out.replay_exceed;
            }
    }
    return out;
}

}  // namespace cvxspace
