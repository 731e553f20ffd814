#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "cvxspace/analysis.hpp"

namespace cvxspace {

enum class NetMetric { hausdorff_star, bm };

inline const char* to_string(NetMetric m) { return m == NetMetric::hausdorff_star ? "hstar" : "bm"; }

inline NetMetric parse_net_metric(const std::string& s)
{
    if (s == "hstar" || s == "hausdorff" || s == "hausdorff_star")
        return NetMetric::hausdorff_star;
    if (s == "bm")
        return NetMetric::bm;
    throw Error(ErrorKind::invalid_parameter, "nets", "unknown net metric '" + s + "'");
}

struct NetConstruction {
    /// Support directions u_i = (cos 2 pi i/m, sin 2 pi i/m).
    int directions = 0;
    /// Support values quantized to `levels` cells of [1, 2]; representatives use cell midpoints.
    int levels = 0;
    double step = 0.0;
    /// 2 (sec(pi/m) - 1): m-direction outer approximation error inside the 2-disk.
    double outer_error = 0.0;
    /// step / 2.
    double quantization_error = 0.0;
    /// Vertex count of the inscribed polygon standing in for the 2-disk during repair.
    int repair_polygon = 0;
    /// 2 (1 - cos(pi / repair_polygon)).
    double repair_error = 0.0;
    /// outer + quantization + repair: the design rule that picks (m, levels).
    double design_bound = 0.0;
    /// Worst case over K^{2*} that the construction provably meets:
    /// max(2 eps + repair, 2 tan(pi/m) + eps sec(pi/m)) with eps = step / 2. Sharp corners
    /// make the outer approximation error first order in pi/m, so this exceeds design_bound.
    double proven_bound = 0.0;
    /// Bound required of the Hausdorff construction: beta, or beta / 2 for BM nets.
    double target = 0.0;
    std::size_t cells = 0;
    /// Cells whose half-plane intersection left the 2-disk and was clipped.
    std::size_t repaired = 0;
    /// Cells dropped because the unit disk was lost (cannot happen with levels >= 1).
    std::size_t dropped = 0;
    /// Cells whose representative coincides with an earlier member.
    std::size_t merged = 0;
    std::string key() const
    {
        std::ostringstream s;
        s << "m" << directions << "_l" << levels << "_r" << repair_polygon;
        return s.str();
    }
};

struct Net {
    NetMetric metric = NetMetric::hausdorff_star;
    double beta = 0.0;
    std::uint64_t seed = 0;
    NetConstruction construction;
    std::vector<ConvexBody> bodies;
    /// Member index of every quantization cell; empty for nets read from disk.
    std::vector<std::int32_t> cell_member;

    std::size_t size() const { return bodies.size(); }
};

struct NetOptions {
    std::size_t cap = 1'000'000;
    int max_directions = 64;
};

namespace detail {

inline double outer_error(int m) { return 2.0 * (1.0 / std::cos(kPi / m) - 1.0); }

struct NetPlan {
    int m = 0, levels = 0;
    double count = 0.0;
    double bound = 0.0;
};

/// Cheapest (m, levels) with 2 (sec(pi/m) - 1) + 1 / (2 levels) <= target.
inline std::optional<NetPlan> plan_net(double target, int max_directions)
{
    std::optional<NetPlan> best;
    for (int levels = 1; levels <= 64; ++levels) {
        const double q = 0.5 / levels;
        if (q >= target)
            continue;
        for (int m = 3; m <= max_directions; ++m) {
            const double b = outer_error(m) + q;
            if (b <= target) {
                const double count = std::pow(static_cast<double>(levels), m);
                if (!best || count < best->count || (count == best->count && b < best->bound))
                    best = NetPlan{m, levels, count, b};
                break;
            }
        }
    }
    return best;
}

/// Clips a ccw polygon to <x, u> <= h in place.
inline void clip(std::vector<Vec2>& poly, std::vector<Vec2>& scratch, Vec2 u, double h)
{
    scratch.clear();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 p = poly[i], q = poly[(i + 1) % n];
        const double sp = dot(p, u) - h, sq = dot(q, u) - h;
        if (sp <= 0.0)
            scratch.push_back(p);
        if ((sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0))
            scratch.push_back(p + (q - p) * (sp / (sp - sq)));
    }
    poly.swap(scratch);
}

inline std::uint64_t hash_vertices(std::span<const Vec2> v)
{
    std::uint64_t h = 1469598103934665603ull;
    for (const Vec2& p : v)
        for (double c : {p.x, p.y}) {
            const auto q = static_cast<std::int64_t>(std::llround(c * 1e9));
            h = (h ^ static_cast<std::uint64_t>(q)) * 1099511628211ull;
        }
    return h;
}

inline bool same_vertices(std::span<const Vec2> a, std::span<const Vec2> b)
{
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::llround(a[i].x * 1e9) != std::llround(b[i].x * 1e9) ||
            std::llround(a[i].y * 1e9) != std::llround(b[i].y * 1e9))
            return false;
    return true;
}

}  // namespace detail

/// Support values of K at the net directions mapped to a quantization cell.
inline std::size_t net_cell_of(const NetConstruction& c, const ConvexBody& k)
{
    std::size_t code = 0;
    for (int i = c.directions - 1; i >= 0; --i) {
        const double h = k.support(unit(2.0 * kPi * i / c.directions));
        const int idx = std::clamp(static_cast<int>(std::floor((h - 1.0) / c.step)), 0, c.levels - 1);
        code = code * static_cast<std::size_t>(c.levels) + static_cast<std::size_t>(idx);
    }
    return code;
}

/// Candidate beta-net of K^{2*} (or, through d_BM <= 2 d_H, of the BM space). Support values
/// at m directions are quantized on [1, 2], with (m, levels) the cheapest choice meeting the
/// design bound; each cell's representative is the intersection of its half-planes with the
/// inscribed 2-disk polygon, so it always lies in K^{2*}. Members are deduplicated. Whether
/// the family really is a beta-net is what `proven_bound` and `certify_net` report.
inline Net build_net(double beta, NetMetric metric, std::uint64_t seed = 0, const NetOptions& opt = {})
{
    if (!(beta > 0.0) || beta > 1.0)
        throw Error(ErrorKind::invalid_parameter, "nets", "beta must lie in (0, 1]");
    const double target = metric == NetMetric::bm ? beta / 2.0 : beta;
    const std::optional<detail::NetPlan> plan = detail::plan_net(target, opt.max_directions);
    if (!plan)
        throw Error(ErrorKind::capacity, "nets", "no construction reaches beta = " + std::to_string(beta));
    if (plan->count > static_cast<double>(opt.cap)) {
        std::ostringstream s;
        s << "beta = " << beta << " needs " << std::llround(plan->count) << " cells (m = " << plan->m
          << ", levels = " << plan->levels << "), above the cap of " << opt.cap;
        throw Error(ErrorKind::capacity, "nets", s.str());
    }
    Net net;
    net.metric = metric;
    net.beta = beta;
    net.seed = seed;
    NetConstruction& c = net.construction;
    c.directions = plan->m;
    c.levels = plan->levels;
    c.step = 1.0 / plan->levels;
    c.outer_error = detail::outer_error(plan->m);
    c.quantization_error = 0.5 * c.step;
    c.target = target;
    c.repair_polygon = 16;
    auto repair_err = [](int r) { return 2.0 * (1.0 - std::cos(kPi / r)); };
    while (c.outer_error + c.quantization_error + repair_err(c.repair_polygon) > target && c.repair_polygon < 4096)
        c.repair_polygon *= 2;
    c.repair_error = repair_err(c.repair_polygon);
    c.design_bound = c.outer_error + c.quantization_error + c.repair_error;
    {
        const double eps = c.quantization_error, t = kPi / c.directions;
        c.proven_bound = std::max(2.0 * eps + c.repair_error, 2.0 * std::tan(t) + eps / std::cos(t));
    }
    c.cells = static_cast<std::size_t>(std::llround(plan->count));

    const int m = c.directions;
    std::vector<Vec2> dirs(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        dirs[static_cast<std::size_t>(i)] = unit(2.0 * kPi * i / m);
    std::vector<Vec2> outer;
    for (int i = 0; i < c.repair_polygon; ++i)
        outer.push_back(unit(2.0 * kPi * (i + 0.5) / c.repair_polygon) * 2.0);

    struct Rep {
        std::vector<Vec2> v;
        bool repaired = false;
    };
    const std::vector<Rep> reps = parallel_map<Rep>(c.cells, [&](std::size_t code) {
        std::vector<Vec2> poly = outer, scratch;
        std::size_t rest = code;
        std::vector<double> hs(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            const int idx = static_cast<int>(rest % static_cast<std::size_t>(c.levels));
            rest /= static_cast<std::size_t>(c.levels);
            hs[static_cast<std::size_t>(i)] = 1.0 + (idx + 0.5) * c.step;
        }
        for (int i = 0; i < m; ++i)
            detail::clip(poly, scratch, dirs[static_cast<std::size_t>(i)], hs[static_cast<std::size_t>(i)]);
        Rep r;
        // Repair happened when an edge of the 2-disk polygon survives the clipping.
        const double inner = 2.0 * std::cos(kPi / c.repair_polygon) - 1e-9;
        for (const Vec2& p : poly) {
            const double a = std::atan2(p.y, p.x) * c.repair_polygon / (2.0 * kPi);
            const double k = std::round(a);
            if (dot(p, unit(2.0 * kPi * k / c.repair_polygon)) >= inner) {
                r.repaired = true;
                break;
            }
        }
        r.v = ConvexBody::convex_hull(std::move(poly));
        return r;
    });

    std::unordered_multimap<std::uint64_t, std::int32_t> seen;
    net.cell_member.assign(c.cells, -1);
    for (std::size_t code = 0; code < c.cells; ++code) {
        const Rep& r = reps[code];
        if (r.repaired)
            ++c.repaired;
        const std::uint64_t h = detail::hash_vertices(r.v);
        std::int32_t found = -1;
        auto range = seen.equal_range(h);
        for (auto it = range.first; it != range.second; ++it)
            if (detail::same_vertices(net.bodies[static_cast<std::size_t>(it->second)].vertices(), r.v)) {
                found = it->second;
                break;
            }
        if (found >= 0) {
            ++c.merged;
            net.cell_member[code] = found;
            continue;
        }
        ConvexBody k = ConvexBody::from_vertices(r.v, std::nullopt, "net");
        if (!in_normalized_space(k, 1e-9)) {
            ++c.dropped;
            continue;
        }
        const auto idx = static_cast<std::int32_t>(net.bodies.size());
        net.bodies.push_back(std::move(k));
        seen.emplace(h, idx);
        net.cell_member[code] = idx;
    }
    return net;
}

struct NetCertification {
    std::size_t probes = 0;
    std::size_t failures = 0;
    double max_distance = 0.0;
    double beta = 0.0;
    /// Every probe has a member closer than beta.
    bool pass = true;
    /// Largest distance to the cell member alone.
    double cell_max_distance = 0.0;
    /// Probes whose nearest member was found by the full search.
    std::size_t searched = 0;
    /// The construction's proven worst case is below beta.
    bool proven = false;
};

/// Random K^{2*} probes (symmetric and general polygons of varied complexity, plus smooth
/// bodies). Each probe is compared with the member of its quantization cell; when that one
/// is not within beta, every member is searched, pruned by a support-function lower bound on
/// the Hausdorff distance. For BM nets the distance is the witnessed bound
/// min(2 log(1 + d_H), solver) over the cell member and the Hausdorff-nearest members.
inline NetCertification certify_net(const Net& net, std::size_t probes = 500, std::uint64_t seed = 0)
{
    if (net.cell_member.empty())
        throw Error(ErrorKind::invalid_parameter, "nets", "net has no cell index (rebuild it to certify)");
    NetCertification out;
    out.probes = probes;
    out.beta = net.beta;
    constexpr int kDirs = 32;
    using Support = std::array<double, kDirs>;
    auto support_of = [](const ConvexBody& b) {
        Support s;
        for (int j = 0; j < kDirs; ++j)
            s[static_cast<std::size_t>(j)] = b.support(unit(2.0 * kPi * j / kDirs));
        return s;
    };
    std::vector<Support> sup;
    auto nearest = [&](const ConvexBody& k, std::size_t keep) {
        const Support sk = support_of(k);
        std::vector<std::pair<double, std::size_t>> best;
        for (std::size_t j = 0; j < net.bodies.size(); ++j) {
            double lb = 0.0;
            for (std::size_t d = 0; d < kDirs; ++d)
                lb = std::max(lb, std::abs(sk[d] - sup[j][d]));
            if (best.size() == keep && lb >= best.back().first)
                continue;
            const double dist = hausdorff(k, net.bodies[j]).value;
            if (best.size() < keep || dist < best.back().first) {
                if (best.size() == keep)
                    best.pop_back();
                best.insert(std::upper_bound(best.begin(), best.end(), std::pair{dist, j}), {dist, j});
            }
        }
        return best;
    };
    struct Probe {
        std::optional<ConvexBody> k;
        double cell = 0.0;
    };
    std::vector<Probe> ps = parallel_map<Probe>(probes, [&](std::size_t i) {
        std::mt19937_64 rng = task_rng(seed, i);
        std::uniform_int_distribution<int> kind(0, 3);
        ConvexBody k = [&] {
            switch (kind(rng)) {
            case 0: return random_normalized_body(rng, true, 24);
            case 1: return random_normalized_body(rng, false, 24);
            case 2: return random_normalized_body(rng, false, 6);
            default: {
                std::uniform_real_distribution<double> s(1.0, 2.0);
                const ConvexBody disk = make_disk(128, 1.0);
                return place_in_normalized_space(apply_affine(disk, AffineMap2(Mat2::diagonal(1.0, s(rng)))));
            }
            }
        }();
        const std::int32_t mi = net.cell_member[net_cell_of(net.construction, k)];
        double v = std::numeric_limits<double>::infinity();
        if (mi >= 0) {
            const ConvexBody& member = net.bodies[static_cast<std::size_t>(mi)];
            const double dh = hausdorff(k, member).value;
            v = net.metric == NetMetric::hausdorff_star ? dh : witnessed_bm(k, member, std::pow(1.0 + dh, 2.0), true, seed + i);
        }
        return Probe{std::move(k), v};
    });
    bool need_search = false;
    for (const Probe& p : ps) {
        out.cell_max_distance = std::max(out.cell_max_distance, p.cell);
        need_search = need_search || !(p.cell < net.beta);
    }
    if (need_search) {
        sup.resize(net.bodies.size());
        tbb::parallel_for(std::size_t{0}, net.bodies.size(), [&](std::size_t j) { sup[j] = support_of(net.bodies[j]); });
    }
    const std::vector<double> d = parallel_map<double>(probes, [&](std::size_t i) {
        const Probe& p = ps[i];
        if (p.cell < net.beta)
            return p.cell;
        double v = p.cell;
        if (net.metric == NetMetric::hausdorff_star)
            return std::min(v, nearest(*p.k, 1).front().first);
        for (const auto& [dh, j] : nearest(*p.k, 4))
            v = std::min(v, witnessed_bm(*p.k, net.bodies[j], std::pow(1.0 + dh, 2.0), true, seed + i));
        return v;
    });
    for (std::size_t i = 0; i < d.size(); ++i) {
        out.max_distance = std::max(out.max_distance, d[i]);
        if (!(d[i] < net.beta))
            ++out.failures;
        if (d[i] < ps[i].cell)
            ++out.searched;
    }
    out.pass = out.failures == 0;
    out.proven = net.construction.proven_bound < net.beta;
    return out;
}

inline double family_distance(const ConvexBody& a, const ConvexBody& b, MetricKind metric, std::uint64_t seed = 0)
{
    if (metric == MetricKind::hausdorff)
        return hausdorff(a, b).value;
    return witnessed_bm(a, b, std::nullopt, true, seed);
}

/// Greedy subset, in input order, whose open rho-balls are pairwise disjoint (distance >= 2 rho).
inline std::vector<std::size_t> greedy_ball_packing(const std::vector<ConvexBody>& family, double rho,
                                                    MetricKind metric = MetricKind::hausdorff)
{
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < family.size(); ++i) {
        bool ok = true;
        for (std::size_t j : kept)
            if (family_distance(family[i], family[j], metric, i * 7919 + j) < 2.0 * rho) {
                ok = false;
                break;
            }
        if (ok)
            kept.push_back(i);
    }
    return kept;
}

struct PackingCoveringReport {
    double omega = 0.0;
    std::size_t family_size = 0;
    /// Greedy packing counts with radius omega and omega / 2.
    std::size_t packing = 0, packing_half = 0;
    /// Smallest omega-cover found: the maximal omega-separated set or a greedy set cover.
    std::size_t covering = 0;
    bool half_packing_covers = true;
    bool chain_holds = true;
    bool pass = true;
    std::vector<std::size_t> packing_witness, covering_witness;
    /// Set when the check ran on a seeded subfamily.
    std::string note;
};

/// Finite shadow of m(omega) <= l(omega) <= m(omega / 2): a maximal omega/2-packing is an
/// omega-cover, and no omega-cover can be smaller than an omega-packing. Families above
/// `max_family` are replaced by a seeded subfamily of that size.
inline PackingCoveringReport packing_covering_check(const std::vector<ConvexBody>& input, double omega,
                                                    std::size_t max_family = 4000, std::uint64_t seed = 0)
{
    PackingCoveringReport out;
    out.omega = omega;
    std::vector<std::size_t> pick(input.size());
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    if (input.size() > max_family) {
        std::mt19937_64 rng = task_rng(seed, 0);
        std::shuffle(pick.begin(), pick.end(), rng);
        pick.resize(max_family);
        std::sort(pick.begin(), pick.end());
        out.note = "seeded subfamily of " + std::to_string(max_family) + " out of " + std::to_string(input.size());
    }
    const std::size_t n = pick.size();
    out.family_size = n;
    // Cheap lower bound on the Hausdorff distance from 32 support values.
    constexpr int kDirs = 32;
    std::vector<std::array<double, kDirs>> sup(n);
    for (std::size_t i = 0; i < n; ++i)
        for (int j = 0; j < kDirs; ++j)
            sup[i][static_cast<std::size_t>(j)] = input[pick[i]].support(unit(2.0 * kPi * j / kDirs));
    // Neighbour lists at distance < omega (covering relation) and flags for < 2 omega.
    std::vector<std::vector<std::uint32_t>> near(n), near2(n);
    const std::vector<std::vector<std::pair<std::uint32_t, bool>>> rows =
        parallel_map<std::vector<std::pair<std::uint32_t, bool>>>(n, [&](std::size_t i) {
            std::vector<std::pair<std::uint32_t, bool>> r;
            for (std::size_t j = i + 1; j < n; ++j) {
                double lb = 0.0;
                for (int d = 0; d < kDirs; ++d)
                    lb = std::max(lb, std::abs(sup[i][static_cast<std::size_t>(d)] - sup[j][static_cast<std::size_t>(d)]));
                if (lb >= 2.0 * omega)
                    continue;
                const double dist = hausdorff(input[pick[i]], input[pick[j]]).value;
                if (dist < 2.0 * omega)
                    r.emplace_back(static_cast<std::uint32_t>(j), dist < omega);
            }
            return r;
        });
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& [j, close] : rows[i]) {
            near2[i].push_back(j);
            near2[j].push_back(static_cast<std::uint32_t>(i));
            if (close) {
                near[i].push_back(j);
                near[j].push_back(static_cast<std::uint32_t>(i));
            }
        }
    auto greedy = [&](const std::vector<std::vector<std::uint32_t>>& conflict) {
        std::vector<char> blocked(n, 0);
        std::vector<std::size_t> kept;
        for (std::size_t i = 0; i < n; ++i) {
            if (blocked[i])
                continue;
            kept.push_back(i);
            for (std::uint32_t j : conflict[i])
                blocked[j] = 1;
        }
        return kept;
    };
    // Pairwise distance >= 2 rho is the packing relation; rho = omega uses near2, omega/2 near.
    const std::vector<std::size_t> pack = greedy(near2);
    const std::vector<std::size_t> half = greedy(near);
    out.packing = pack.size();
    out.packing_half = half.size();
    // (a): every member lies within omega of the omega/2-packing (maximality).
    {
        std::vector<char> covered(n, 0);
        for (std::size_t i : half) {
            covered[i] = 1;
            for (std::uint32_t j : near[i])
                covered[j] = 1;
        }
        out.half_packing_covers = std::all_of(covered.begin(), covered.end(), [](char c) { return c != 0; });
    }
    // Greedy set cover by open omega-balls centred at members.
    std::vector<std::size_t> cover;
    {
        std::vector<char> covered(n, 0);
        std::size_t left = n;
        std::vector<std::size_t> gain(n);
        for (std::size_t i = 0; i < n; ++i)
            gain[i] = near[i].size() + 1;
        while (left > 0) {
            std::size_t best = 0, bg = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (gain[i] > bg) {
                    bg = gain[i];
                    best = i;
                }
            cover.push_back(best);
            auto mark = [&](std::size_t v) {
                if (covered[v])
                    return;
                covered[v] = 1;
                --left;
                --gain[v];
                for (std::uint32_t w : near[v])
                    --gain[w];
            };
            mark(best);
            for (std::uint32_t j : near[best])
                mark(j);
        }
    }
    out.covering_witness = cover.size() <= half.size() ? cover : half;
    out.covering = out.covering_witness.size();
    out.packing_witness = pack;
    for (auto* w : {&out.packing_witness, &out.covering_witness})
        for (std::size_t& i : *w)
            i = pick[i];
    out.chain_holds = out.packing <= out.covering && out.covering <= out.packing_half;
    out.pass = out.chain_holds && out.half_packing_covers;
    return out;
}

struct IntegralSumResult {
    double value = 0.0;
    std::size_t members = 0;
    std::size_t evaluated = 0;
    std::size_t cached = 0;
    std::size_t excluded = 0;
    double min = 0.0, max = 0.0, variance = 0.0;
    std::vector<std::string> log;
};

struct IntegralSumOptions {
    EvaluatorOptions evaluator = EvaluatorOptions::fast();
    /// CSV cache of per-member values; empty disables it.
    std::string cache_path;
};

namespace detail {

inline std::string cache_key(const Net& net)
{
    return std::string(to_string(net.metric)) + "_" + net.construction.key();
}

inline std::map<std::size_t, double> read_cache(const std::string& path, const std::string& key, const std::string& f)
{
    std::map<std::size_t, double> out;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream s(line);
        std::string k, idx, fn, val;
        if (!std::getline(s, k, ',') || !std::getline(s, idx, ',') || !std::getline(s, fn, ',') ||
            !std::getline(s, val))
            continue;
        if (k != key || fn != f)
            continue;
        try {
            out[static_cast<std::size_t>(std::stoull(idx))] = std::stod(val);
        } catch (const std::exception&) {
        }
    }
    return out;
}

}  // namespace detail

/// Mean of f over the members, with per-member values cached by (construction, index, f).
inline IntegralSumResult integral_sum(const Net& net, const FunctionalSpec& f, const IntegralSumOptions& opt = {})
{
    IntegralSumResult out;
    out.members = net.size();
    const std::string key = detail::cache_key(net);
    std::map<std::size_t, double> cache;
    if (!opt.cache_path.empty())
        cache = detail::read_cache(opt.cache_path, key, f.label);
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < net.size(); ++i)
        if (!cache.count(i))
            todo.push_back(i);
    struct Eval {
        bool ok = false;
        double v = 0.0;
        std::string why;
    };
    const std::vector<Eval> ev = parallel_map<Eval>(todo.size(), [&](std::size_t t) {
        Eval e;
        const ConvexBody& k = net.bodies[todo[t]];
        if (f.needs_symmetric() && !k.symmetric()) {
            e.why = "not centrally symmetric";
            return e;
        }
        try {
            e.v = evaluate_functional(f, k, opt.evaluator).value;
            e.ok = true;
        } catch (const Error& err) {
            e.why = err.what();
        }
        return e;
    });
    std::ofstream append;
    if (!opt.cache_path.empty() && !todo.empty())
        append.open(opt.cache_path, std::ios::app);
    char buf[64];
    for (std::size_t t = 0; t < todo.size(); ++t) {
        if (!ev[t].ok) {
            out.log.push_back("member " + std::to_string(todo[t]) + " excluded: " + ev[t].why);
            continue;
        }
        cache[todo[t]] = ev[t].v;
        if (append) {
            std::snprintf(buf, sizeof buf, "%.17g", ev[t].v);
            append << key << ',' << todo[t] << ',' << f.label << ',' << buf << '\n';
        }
    }
    out.evaluated = todo.size();
    out.cached = net.size() - todo.size();
    // Index-ordered summation keeps the result independent of scheduling.
    double sum = 0.0, sq = 0.0;
    std::size_t n = 0;
    out.min = std::numeric_limits<double>::infinity();
    out.max = -std::numeric_limits<double>::infinity();
    for (const auto& [i, v] : cache) {
        if (i >= net.size())
            continue;
        sum += v;
        sq += v * v;
        out.min = std::min(out.min, v);
        out.max = std::max(out.max, v);
        ++n;
    }
    out.excluded = net.size() - n;
    if (n == 0)
        throw Error(ErrorKind::domain, "nets", "no member could be evaluated");
    out.value = sum / static_cast<double>(n);
    out.variance = n > 1 ? std::max(0.0, (sq - sum * sum / static_cast<double>(n)) / static_cast<double>(n - 1)) : 0.0;
    return out;
}

/// sum of alpha_j over members satisfying the predicate.
inline double weighted_dirac_sum(const std::vector<ConvexBody>& family, const std::vector<double>& alphas,
                                 const std::function<bool(const ConvexBody&)>& predicate)
{
    if (alphas.size() != family.size())
        throw Error(ErrorKind::invalid_parameter, "nets", "one weight per member required");
    double s = 0.0;
    for (std::size_t j = 0; j < family.size(); ++j) {
        if (!(alphas[j] > 0.0) || !std::isfinite(alphas[j]))
            throw Error(ErrorKind::invalid_parameter, "nets", "weights must be positive and finite");
        if (predicate(family[j]))
            s += alphas[j];
    }
    return s;
}

struct ConvergenceRow {
    double beta = 0.0;
    std::size_t members = 0;
    double mean = 0.0, min = 0.0, max = 0.0, variance = 0.0;
    std::size_t excluded = 0;
};

struct ConvergenceTable {
    std::string functional;
    std::vector<ConvergenceRow> rows;
    /// Why the table stops early, if it does.
    std::string truncated;
    /// The existence of the limit is open; nothing here is asserted.
    std::string label = "exploratory";
};

struct ConvergenceOptions {
    NetMetric metric = NetMetric::hausdorff_star;
    NetOptions net;
    IntegralSumOptions sum;
    /// Nets with more members than this are not evaluated (0: no limit).
    std::size_t max_members = 0;
};

/// Integral sums over nets of decreasing beta.
inline ConvergenceTable convergence_study(const FunctionalSpec& f, const std::vector<double>& betas,
                                          std::uint64_t seed = 0, const ConvergenceOptions& opt = {})
{
    ConvergenceTable t;
    t.functional = f.label;
    for (std::size_t i = 1; i < betas.size(); ++i)
        if (!(betas[i] < betas[i - 1]))
            throw Error(ErrorKind::invalid_parameter, "nets", "betas must be strictly decreasing");
    for (double b : betas) {
        Net net;
        try {
            net = build_net(b, opt.metric, seed, opt.net);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::capacity)
                throw;
            t.truncated = e.what();
            break;
        }
        if (opt.max_members > 0 && net.size() > opt.max_members) {
            t.truncated = "beta = " + std::to_string(b) + ": " + std::to_string(net.size()) +
                          " members exceed the evaluation limit of " + std::to_string(opt.max_members);
            break;
        }
        const IntegralSumResult s = integral_sum(net, f, opt.sum);
        t.rows.push_back({b, net.size(), s.value, s.min, s.max, s.variance, s.excluded});
    }
    return t;
}

}  // namespace cvxspace
