#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <tbb/global_control.h>

#include "cvxspace/analysis.hpp"
#include "cvxspace/nets.hpp"

namespace cvxspace {

struct GoldenCase {
    std::string label;
    /// "density" or "dist".
    std::string command;
    /// Functional for density, metric for dist.
    std::string what;
    std::string body, body_b;
    int resolution = 256;
    double expected = 0.0, tolerance = 0.0;
    /// Per-call limit; cases sharing a `group` share `group_limit` instead.
    double time_limit = 0.0;
    std::string group;
    double group_limit = 0.0;
};

struct GoldenOutcome {
    double value = std::nan("");
    double seconds = 0.0;
    std::string error;
};

using GoldenRunner = std::function<GoldenOutcome(const GoldenCase&)>;

inline std::vector<GoldenCase> golden_cases()
{
    return {
        {"delta(triangle) = 2/3", "density", "delta", "equilateral_triangle", "", 256, 2.0 / 3.0, 2e-3, 5.0, "", 0.0},
        {"theta(triangle) = 3/2", "density", "theta", "equilateral_triangle", "", 256, 1.5, 1e-2, 60.0, "", 0.0},
        {"delta(256-gon) = pi/sqrt(12)", "density", "delta", "disk", "", 256, kPi / std::sqrt(12.0), 2e-3, 30.0, "", 0.0},
        {"theta(256-gon) = 2 pi/sqrt(27)", "density", "theta", "disk", "", 256, 2.0 * kPi / std::sqrt(27.0), 2e-3, 30.0, "", 0.0},
        {"delta(smoothed octagon) = (8 - 4 sqrt2 - ln2)/(2 sqrt2 - 1)", "density", "delta", "smoothed_octagon", "", 512,
         (8.0 - 4.0 * std::sqrt(2.0) - std::log(2.0)) / (2.0 * std::sqrt(2.0) - 1.0), 2e-3, 60.0, "", 0.0},
        {"phi(square) = 1", "density", "phi", "unit_square", "", 256, 1.0, 1e-6, 0.0, "phi", 120.0},
        {"phi(disk) = 2/sqrt3", "density", "phi", "disk", "", 256, 2.0 / std::sqrt(3.0), 2e-3, 0.0, "phi", 120.0},
        {"phi(regular octagon) = 2 (2 - sqrt2)", "density", "phi", "regular_octagon", "", 256, 2.0 * (2.0 - std::sqrt(2.0)),
         5e-3, 0.0, "phi", 120.0},
        {"bm(square, hexagon) = log(3/2)", "dist", "bm", "unit_square", "unit_edge_hexagon", 256, std::log(1.5), 1e-3, 60.0,
         "", 0.0},
    };
}

inline double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// The library calls behind `density` and `dist`, with their default settings.
inline GoldenOutcome run_golden_in_process(const GoldenCase& c)
{
    GoldenOutcome out;
    try {
        const ConvexBody a = body_by_name(c.body, c.resolution);
        const auto t0 = std::chrono::steady_clock::now();
        if (c.command == "dist") {
            const ConvexBody b = body_by_name(c.body_b, c.resolution);
            out.value = c.what == "bm" ? bm_distance(a, b).value : hausdorff(a, b).value;
        } else if (c.what == "delta") {
            out.value = delta_lattice(a).value;
        } else if (c.what == "theta") {
            out.value = theta_lattice(a).value;
        } else {
            out.value = phi_lattice(a).value;
        }
        out.seconds = seconds_since(t0);
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    double seconds = 0.0;
    std::vector<std::string> details;
};

struct SuiteOptions {
    std::uint64_t seed = 20240601;
    GoldenRunner golden = run_golden_in_process;
    /// Criteria to run; empty runs all.
    std::set<int> only;
    /// Called after each criterion.
    std::function<void(const CriterionResult&)> on_result;
    /// Scratch directory for net caches.
    std::string scratch = (std::filesystem::temp_directory_path() / "cvxspace-verify").string();
};

namespace detail {

inline std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

inline CriterionResult golden_values(const SuiteOptions& opt)
{
    CriterionResult r{1, "golden values", true, 0.0, {}};
    std::map<std::string, double> group_time, group_limit;
    for (const GoldenCase& c : golden_cases()) {
        const GoldenOutcome o = opt.golden(c);
        const bool ok_value = o.error.empty() && std::abs(o.value - c.expected) <= c.tolerance;
        bool ok_time = true;
        if (c.group.empty())
            ok_time = o.seconds < c.time_limit;
        else {
            group_time[c.group] += o.seconds;
            group_limit[c.group] = c.group_limit;
        }
        r.pass = r.pass && ok_value && ok_time;
        if (!o.error.empty())
            r.details.push_back(c.label + ": error: " + o.error);
        else
            r.details.push_back(fmt("%s: %.9f (expected %.6f +- %.0e) in %.2f s%s%s", c.label.c_str(), o.value, c.expected,
                                    c.tolerance, o.seconds, ok_value ? "" : " VALUE OUT OF TOLERANCE",
                                    ok_time ? "" : " TOO SLOW"));
    }
    for (const auto& [g, t] : group_time) {
        const bool ok = t < group_limit[g];
        r.pass = r.pass && ok;
        r.details.push_back(fmt("%s group total %.2f s (limit %.0f s)%s", g.c_str(), t, group_limit[g], ok ? "" : " TOO SLOW"));
    }
    return r;
}

inline CriterionResult stromquist_bound(const SuiteOptions& opt)
{
    CriterionResult r{2, "symmetric bodies within (log 3 - log 2)/2 of Stromquist's body", true, 0.0, {}};
    const ConvexBody d = make_named_body(NamedBody::stromquist_D, 128);
    const double bound = 0.5 * (std::log(3.0) - std::log(2.0));
    struct Row {
        double value = 0.0;
        bool replay = false;
    };
    const std::vector<Row> rows = parallel_map<Row>(50, [&](std::size_t i) {
        std::mt19937_64 rng = task_rng(opt.seed + 2, i);
        const ConvexBody c = random_body(rng, true, 16);
        BmOptions bo;
        bo.seed = opt.seed + i;
        const BmResult b = bm_distance(c, d, bo);
        return Row{b.value, bm_replay_ok(c, d, b.witness)};
    });
    double worst = 0.0;
    std::size_t bad = 0, bad_replay = 0;
    for (const Row& row : rows) {
        worst = std::max(worst, row.value);
        bad += row.value > bound + 2e-3;
        bad_replay += !row.replay;
    }
    r.pass = bad == 0 && bad_replay == 0;
    r.details.push_back(fmt("50 bodies: max witnessed bm(C, D) = %.6f, bound %.6f + 2e-3; %zu above, %zu witnesses failing replay",
                            worst, bound, bad, bad_replay));
    return r;
}

inline CriterionResult bm_vs_hausdorff(const SuiteOptions& opt)
{
    CriterionResult r{3, "BM <= 2 Hausdorff in K^{2*}", true, 0.0, {}};
    struct Row {
        double h = 0.0, seeded = 0.0, solver = 0.0, violation = 0.0;
    };
    const std::vector<Row> rows = parallel_map<Row>(200, [&](std::size_t i) {
        std::mt19937_64 rng = task_rng(opt.seed + 3, i);
        const bool sym = i % 2 == 0;
        const ConvexBody k1 = random_normalized_body(rng, sym, 16);
        const ConvexBody k2 = random_normalized_body(rng, sym, 16);
        Row row;
        row.h = hausdorff(k1, k2).value;
        // K1 <= (1 + d) K2 <= (1 + d)^2 K1 when both contain the unit disk.
        const double s = 1.0 + row.h;
        row.seeded = std::log(s * s);
        row.violation = bm_replay_violation(k1, k2, AffineMap2::scaling(s), {0.0, 0.0}, s * s);
        BmOptions bo;
        bo.seed = opt.seed + i;
        bo.budget = 4000;
        bo.starts = 4;
        row.solver = bm_distance(k1, k2, bo).value;
        return row;
    });
    std::size_t bad = 0;
    double worst = -1e300, worst_solver = -1e300, worst_violation = 0.0;
    for (const Row& row : rows) {
        const bool ok = row.seeded <= 2.0 * row.h + 1e-6 && row.violation <= 1e-7 && row.solver <= 2.0 * row.h + 1e-6;
        bad += !ok;
        worst = std::max(worst, row.seeded - 2.0 * row.h);
        worst_solver = std::max(worst_solver, row.solver - 2.0 * row.h);
        worst_violation = std::max(worst_violation, row.violation);
    }
    r.pass = bad == 0;
    r.details.push_back(fmt("200 pairs: max(seeded witness - 2 d_H) = %.3e, max(solver - 2 d_H) = %.3e, "
                            "max replay violation %.1e; %zu failures",
                            worst, worst_solver, worst_violation, bad));
    return r;
}

inline CriterionResult growth_bounds(const SuiteOptions& opt)
{
    CriterionResult r{4, "growth bounds (1 + d*)^4, e^(2d), e^d", true, 0.0, {}};
    for (GrowthBound kind : {GrowthBound::hausdorff_power, GrowthBound::bm_exponential, GrowthBound::phi_exponential}) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::uint64_t base = opt.seed + 40 + static_cast<std::uint64_t>(kind);
        const std::vector<BoundCheck> checks = parallel_map<BoundCheck>(200, [&](std::size_t i) {
            std::mt19937_64 rng = task_rng(base, i);
            std::uniform_real_distribution<double> u(0.0, 1.0);
            const bool sym = kind == GrowthBound::phi_exponential || i % 2 == 0;
            BoundCheckOptions bo;
            bo.seed = base + i;
            if (kind == GrowthBound::hausdorff_power) {
                for (;;) {
                    const ConvexBody k0 = random_normalized_body(rng, sym, 16);
                    const ConvexBody k = bump_perturbation(k0, 0.02 + 0.2 * u(rng), 16, rng);
                    if (in_normalized_space(k))
                        return theorem_bound_check(kind, k, k0, bo);
                }
            }
            const ConvexBody k0 = random_normalized_body(rng, sym, 16);
            const ConstructivePair p = constructive_pair(k0, std::exp(0.02 + 0.48 * u(rng)), 6, true, rng);
            bo.witness_ratio = p.ratio;
            bo.frame = p.a.linear();
            return theorem_bound_check(kind, p.k2, p.k1, bo);
        });
        std::size_t bad = 0;
        double min_slack = 1e300;
        for (const BoundCheck& c : checks) {
            bad += !c.pass;
            for (const BoundEntry& e : c.entries)
                min_slack = std::min(min_slack, e.slack / e.rhs);
        }
        r.pass = r.pass && bad == 0;
        r.details.push_back(fmt("%s: 200 pairs, %zu failures, min relative slack %.4f (%.1f s)", to_string(kind), bad,
                                min_slack, seconds_since(t0)));
    }
    return r;
}

inline std::vector<ConvexBody> supderivative_bases(std::uint64_t seed)
{
    std::mt19937_64 rng = task_rng(seed, 0);
    std::vector<ConvexBody> raw = {
        make_disk(64),
        make_named_body(NamedBody::unit_square),
        make_named_body(NamedBody::unit_edge_hexagon),
        make_named_body(NamedBody::equilateral_triangle),
        make_regular_polygon(5, 1.0).with_provenance("regular_pentagon"),
        make_named_body(NamedBody::regular_octagon),
        make_named_body(NamedBody::smoothed_octagon, 32),
        make_named_body(NamedBody::stromquist_D, 32),
        random_body(rng, true, 10).with_provenance("random_symmetric"),
        random_body(rng, false, 10).with_provenance("random_general"),
    };
    std::vector<ConvexBody> out;
    for (const ConvexBody& k : raw)
        out.push_back(place_in_normalized_space(k).with_provenance(k.provenance()));
    return out;
}

inline CriterionResult supderivative_caps(const SuiteOptions& opt)
{
    CriterionResult r{5, "supderivative caps at 10 base bodies", true, 0.0, {}};
    const std::vector<ConvexBody> bases = supderivative_bases(opt.seed + 5);
    for (std::size_t b = 0; b < bases.size(); ++b) {
        std::vector<std::string> parts;
        for (FunctionalId id : {FunctionalId::delta_l, FunctionalId::theta_l, FunctionalId::phi_l}) {
            if (id == FunctionalId::phi_l && !bases[b].symmetric())
                continue;
            std::vector<MetricKind> ms = {MetricKind::bm};
            if (id != FunctionalId::phi_l)
                ms.push_back(MetricKind::hausdorff);
            SupderivativeOptions so;
            so.samples = 8;
            so.seed = opt.seed + 50 + b;
            for (const ScanReport& s : supderivative_estimates(FunctionalSpec::of(id), bases[b], ms, so)) {
                r.pass = r.pass && s.pass;
                parts.push_back(fmt("%s/%s %.3f <= %.2f%s", s.functional.c_str(), to_string(s.metric), s.max_ratio,
                                    s.cap.value_or(0.0) + so.slack, s.pass ? "" : " FAIL"));
            }
        }
        std::string line = bases[b].provenance() + ":";
        for (const std::string& p : parts)
            line += " " + p;
        r.details.push_back(line);
    }
    return r;
}

inline CriterionResult lipschitz_constants_check(const SuiteOptions& opt)
{
    CriterionResult r{6, "explicit Lipschitz constants, 100 pairs each", true, 0.0, {}};
    const std::vector<std::pair<FunctionalId, MetricKind>> cases = {
        {FunctionalId::theta_l, MetricKind::hausdorff}, {FunctionalId::delta_l, MetricKind::hausdorff},
        {FunctionalId::theta_l, MetricKind::bm},        {FunctionalId::delta_l, MetricKind::bm},
        {FunctionalId::phi_l, MetricKind::bm},
    };
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto [id, m] = cases[i];
        const LipschitzConstants lc = *lipschitz_constants(id, m);
        const auto t0 = std::chrono::steady_clock::now();
        LipschitzOptions lo;
        lo.seed = opt.seed + 60 + i;
        const ScanReport s = lipschitz_scan(FunctionalSpec::of(id), m, 100, lc.c, lc.d, lo);
        std::size_t bad = 0;
        for (const ScanSample& x : s.samples)
            bad += !x.pass;
        r.pass = r.pass && bad == 0;
        r.details.push_back(fmt("%s, %s, (c, d) = (%.4g, %.4g): %zu violations, max |df|/dist %.3f (%.1f s)", to_string(id),
                                to_string(m), lc.c, lc.d, bad, s.max_ratio, seconds_since(t0)));
    }
    return r;
}

inline CriterionResult oracle_equivalence(const SuiteOptions& opt)
{
    CriterionResult r{7, "hexagon reduction vs lattice search on 20 symmetric polygons", true, 0.0, {}};
    struct Row {
        double gd = 0.0, gt = 0.0;
    };
    const std::vector<Row> rows = parallel_map<Row>(20, [&](std::size_t i) {
        std::mt19937_64 rng = task_rng(opt.seed + 7, i);
        const ConvexBody c = random_body(rng, true, 14);
        DensityOptions d;
        d.cross_check = false;
        d.search.seed = opt.seed + i;
        d.search.starts = 16;
        d.search.evaluations_per_start = 200;
        d.search.finalists = 3;
        d.search.final_evaluations = 40;
        d.search.final_covering = CoveringOptions{32, 2e-4, 4'000'000, 400};
        Row row;
        row.gd = std::abs(delta_lattice(c, d).value - optimize_lattice(c, LatticeObjective::densest_packing, d.search).value);
        row.gt = std::abs(theta_lattice(c, d).value - optimize_lattice(c, LatticeObjective::thinnest_covering, d.search).value);
        return row;
    });
    double wd = 0.0, wt = 0.0;
    for (const Row& row : rows) {
        wd = std::max(wd, row.gd);
        wt = std::max(wt, row.gt);
    }
    r.pass = wd <= 3e-3 && wt <= 3e-3;
    r.details.push_back(fmt("max |delta gap| = %.2e, max |theta gap| = %.2e (limit 3e-3)", wd, wt));
    return r;
}

inline CriterionResult inequalities(const SuiteOptions& opt)
{
    CriterionResult r{8, "density inequalities", true, 0.0, {}};
    InequalityOptions io;
    io.density.cross_check = false;
    io.density.search = EvaluatorOptions::fast().phi.search;
    auto run = [&](std::size_t n, std::uint64_t seed, const std::function<ConvexBody(std::mt19937_64&, std::size_t)>& make) {
        return parallel_map<InequalityReport>(n, [&](std::size_t i) {
            std::mt19937_64 rng = task_rng(seed, i);
            InequalityOptions o = io;
            o.density.search.seed = seed + i;
            return inequality_suite(make(rng, i), o);
        });
    };
    struct Tally {
        std::size_t seen = 0, failed = 0;
        bool equality = false;
        /// Smallest rhs - lhs, or largest |lhs - rhs| for equalities.
        double worst = 0.0;
    };
    std::map<std::string, Tally> tally;
    auto count = [&](const std::vector<InequalityReport>& reps, const std::set<std::string>& names) {
        for (const InequalityReport& rep : reps)
            for (const InequalityEntry& e : rep.entries) {
                if (!names.count(e.name))
                    continue;
                Tally& t = tally[e.name + " [" + e.label + (e.asserted ? "" : ", reported only") + "]"];
                t.equality = e.name.find("<=") == std::string::npos;
                t.worst = t.seen == 0 ? e.slack : t.equality ? std::max(t.worst, e.slack) : std::min(t.worst, e.slack);
                ++t.seen;
                t.failed += !e.pass;
                if (e.asserted && !e.pass)
                    r.pass = false;
            }
    };
    const auto sym = run(20, opt.seed + 80, [](std::mt19937_64& rng, std::size_t i) {
        if (i == 0)
            return make_disk(128);
        if (i == 1)
            return make_named_body(NamedBody::regular_octagon);
        return random_body(rng, true, 12);
    });
    count(sym, {"theta <= phi^2 * delta"});
    const auto tiles = run(5, opt.seed + 81, [](std::mt19937_64& rng, std::size_t i) {
        std::uniform_real_distribution<double> u(-0.5, 0.5), a(0.0, kPi);
        const Mat2 m = Mat2::rotation(a(rng)) * Mat2::diagonal(1.0, 1.5 + u(rng)) * Mat2{1.0, u(rng), 0.0, 1.0};
        if (i % 2 == 0)
            return apply_affine(make_named_body(NamedBody::unit_square), AffineMap2(m));
        if (i == 1)
            return apply_affine(make_named_body(NamedBody::unit_edge_hexagon), AffineMap2(m));
        std::vector<Vec2> half;
        for (int k = 0; k < 3; ++k)
            half.push_back(unit(kPi * k / 3.0 + 0.3 * u(rng)) * (1.0 + 0.5 * u(rng)));
        std::vector<Vec2> all = half;
        for (const Vec2& p : half)
            all.push_back(-p);
        return ConvexBody::hull_of(all, true, "random_symmetric_hexagon");
    });
    count(tiles, {"delta = 1", "theta = 1"});
    const auto general = run(20, opt.seed + 82, [](std::mt19937_64& rng, std::size_t i) {
        return random_body(rng, i % 2 == 0, 12);
    });
    count(general, {"1 - delta <= theta", "theta - 1 <= 1.25 sqrt(1 - delta)", "theta <= 1.25 sqrt(1 - delta)"});
    for (const auto& [name, t] : tally)
        r.details.push_back(fmt("%s: %zu bodies, %zu not holding, %s %.4g", name.c_str(), t.seen, t.failed,
                                t.equality ? "max deviation" : "min slack", t.worst));
    return r;
}

inline CriterionResult net_suite(const SuiteOptions& opt)
{
    CriterionResult r{9, "nets: certification, packing/covering chain, reproducible sums", true, 0.0, {}};
    std::filesystem::create_directories(opt.scratch);
    const std::string cache = (std::filesystem::path(opt.scratch) / "net_cache.csv").string();
    std::filesystem::remove(cache);
    const FunctionalSpec f = FunctionalSpec::of(FunctionalId::delta_l);
    const std::size_t max_members = 5000;
    for (double beta : {0.5, 0.35, 0.25}) {
        const auto t0 = std::chrono::steady_clock::now();
        const Net net = build_net(beta, NetMetric::hausdorff_star, opt.seed);
        const Net again = build_net(beta, NetMetric::hausdorff_star, opt.seed);
        bool same = net.size() == again.size() && net.cell_member == again.cell_member;
        for (std::size_t i = 0; same && i < net.size(); ++i)
            same = detail::same_vertices(net.bodies[i].vertices(), again.bodies[i].vertices());
        const NetCertification cert = certify_net(net, 500, opt.seed + 90);
        const PackingCoveringReport pc = packing_covering_check(net.bodies, beta, 3000, opt.seed + 91);
        const NetConstruction& c = net.construction;
        r.pass = r.pass && cert.pass && pc.pass && same;
        r.details.push_back(fmt("beta %.2f: m = %d, levels = %d, %zu members; design bound %.4f, proven bound %.4f", beta,
                                c.directions, c.levels, net.size(), c.design_bound, c.proven_bound));
        r.details.push_back(fmt("  certification: %zu/%zu probes farther than beta from every member (max %.4f, cell member max %.4f)%s",
                                cert.failures, cert.probes, cert.max_distance, cert.cell_max_distance,
                                cert.pass ? "" : " FAIL"));
        r.details.push_back(fmt("  chain %zu <= %zu <= %zu at omega = %.2f%s%s", pc.packing, pc.covering, pc.packing_half, beta,
                                pc.note.empty() ? "" : (" on a " + pc.note).c_str(), pc.pass ? "" : " FAIL"));
        r.details.push_back(std::string("  rebuild with the same seed: ") + (same ? "identical" : "DIFFERENT"));
        if (net.size() <= max_members) {
            IntegralSumOptions so;
            so.cache_path = cache;
            const IntegralSumResult a = integral_sum(net, f, so);
            IntegralSumResult b;
            {
                tbb::global_control one(tbb::global_control::max_allowed_parallelism, 1);
                b = integral_sum(net, f, {});
            }
            const bool bits = std::memcmp(&a.value, &b.value, sizeof(double)) == 0;
            r.pass = r.pass && bits;
            r.details.push_back(fmt("  delta integral sum %.17g; single-thread rerun %s", a.value,
                                    bits ? "bit-identical" : "DIFFERS"));
        }
        r.details.push_back(fmt("  %.1f s", seconds_since(t0)));
    }
    ConvergenceOptions co;
    co.max_members = max_members;
    co.sum.cache_path = cache;
    const ConvergenceTable t = convergence_study(f, {0.5, 0.35, 0.25}, opt.seed, co);
    r.details.push_back("convergence table (" + t.label + ", not asserted): functional " + t.functional);
    for (const ConvergenceRow& row : t.rows)
        r.details.push_back(fmt("  beta %.2f  members %zu  mean %.6f  min %.6f  max %.6f", row.beta, row.members, row.mean,
                                row.min, row.max));
    if (!t.truncated.empty())
        r.details.push_back("  truncated: " + t.truncated);
    return r;
}

}  // namespace detail

inline std::vector<CriterionResult> run_paper_suite(const SuiteOptions& opt = {})
{
    using Fn = CriterionResult (*)(const SuiteOptions&);
    const std::vector<Fn> all = {detail::golden_values,  detail::stromquist_bound,          detail::bm_vs_hausdorff,
                                 detail::growth_bounds,  detail::supderivative_caps,        detail::lipschitz_constants_check,
                                 detail::oracle_equivalence, detail::inequalities,          detail::net_suite};
    std::vector<CriterionResult> out;
    for (std::size_t i = 0; i < all.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!opt.only.empty() && !opt.only.count(id))
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult r;
        try {
            r = all[i](opt);
        } catch (const std::exception& e) {
            r.id = id;
            r.title = "criterion " + std::to_string(id);
            r.pass = false;
            r.details.push_back(std::string("error: ") + e.what());
        }
        r.seconds = seconds_since(t0);
        if (opt.on_result)
            opt.on_result(r);
        out.push_back(std::move(r));
    }
    return out;
}

inline std::string format_criterion(const CriterionResult& r, bool with_details = true)
{
    std::ostringstream os;
    os << (r.pass ? "PASS" : "FAIL") << "  criterion " << r.id << ": " << r.title << " ("
       << detail::fmt("%.1f", r.seconds) << " s)\n";
    if (with_details)
        for (const std::string& d : r.details)
            os << "      " << d << "\n";
    return os.str();
}

}  // namespace cvxspace
