#pragma once

#include <cmath>
#include <ostream>
#include <string>

#include "cvxspace/io.hpp"
#include "cvxspace/verify.hpp"

namespace cvxspace {

/// NaN and infinities become null.
inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json vec_to_json(Vec2 v) { return json::array({v.x, v.y}); }

inline json mat_to_json(const Mat2& m) { return json::array({json::array({m.a, m.b}), json::array({m.c, m.d})}); }

inline json affine_to_json(const AffineMap2& a)
{
    return {{"linear", mat_to_json(a.linear())}, {"translation", vec_to_json(a.translation())}};
}

inline json to_json(const HausdorffResult& h)
{
    return {{"value", h.value},
            {"status", to_string(h.status)},
            {"witness",
             {{"from_first", h.witness.from_first},
              {"vertex_index", h.witness.vertex_index},
              {"vertex", vec_to_json(h.witness.vertex)},
              {"nearest", vec_to_json(h.witness.nearest)}}}};
}

inline json to_json(const BmResult& b)
{
    const BmWitness& w = b.witness;
    return {{"value", b.value},
            {"status", to_string(b.status)},
            {"witness",
             {{"relation", "K1 <= sigma(K2) <= r K1 + x"},
              {"sigma", affine_to_json(w.sigma)},
              {"x", vec_to_json(w.x)},
              {"r", w.r},
              {"evaluations", w.evaluations},
              {"seed", w.seed},
              {"budget_exhausted", w.budget_exhausted},
              {"replay_violation", w.replay_violation},
              {"identity_ratio", w.identity_ratio}}}};
}

inline json to_json(const LatticeOptimum& o, LatticeObjective objective)
{
    return {{"objective", to_string(objective)},
            {"basis", lattice_to_json(o.lattice)},
            {"value", o.value},
            {"certificate",
             {{"packing_radius", o.packing},
              {"covering_radius", o.covering},
              {"covering_radius_upper", o.covering_upper},
              {"note", objective == LatticeObjective::densest_packing
                           ? "packing radius is exact (finite enumeration)"
                           : "covering radius bracketed by Lipschitz branch and bound"}}},
            {"evaluations", o.evaluations},
            {"budget_exhausted", o.budget_exhausted}};
}

inline json to_json(const DensityReport& r)
{
    json j = {{"functional", to_string(r.functional)},
              {"value", r.value},
              {"method", to_string(r.method)},
              {"upper_bound", r.upper_bound},
              {"budget_exhausted", r.budget_exhausted},
              {"cross_check_value", number(r.cross_check_value)},
              {"cross_check_gap", number(r.cross_check_gap)}};
    if (r.hexagon)
        j["hexagon"] = body_to_json(*r.hexagon);
    if (r.lattice)
        j["lattice"] = lattice_to_json(*r.lattice);
    return j;
}

inline json to_json(const InequalityReport& r)
{
    json entries = json::array();
    for (const InequalityEntry& e : r.entries)
        entries.push_back({{"name", e.name},
                           {"lhs", e.lhs},
                           {"rhs", e.rhs},
                           {"slack", e.slack},
                           {"pass", e.pass},
                           {"asserted", e.asserted},
                           {"label", e.label}});
    return {{"delta", r.delta}, {"theta", r.theta}, {"phi", number(r.phi)}, {"entries", entries},
            {"all_asserted_pass", r.all_asserted_pass()}};
}

inline json to_json(const ScanReport& r, bool with_samples = false)
{
    json j = {{"functional", r.functional},
              {"base", r.base},
              {"metric", to_string(r.metric)},
              {"model", r.model},
              {"sample_count", r.sample_count},
              {"discarded", r.discarded},
              {"max_ratio", r.max_ratio},
              {"cap", r.cap ? json(*r.cap) : json(nullptr)},
              {"pass", r.pass},
              {"kind", r.kind},
              {"log", r.log}};
    if (with_samples) {
        json s = json::array();
        for (const ScanSample& x : r.samples)
            s.push_back({{"index", x.index},
                         {"radius", x.radius},
                         {"distance", x.distance},
                         {"f_base", x.f_base},
                         {"f_sample", x.f_sample},
                         {"ratio", x.ratio},
                         {"bound", number(x.bound)},
                         {"pass", x.pass}});
        j["samples"] = s;
    }
    return j;
}

inline void write_scan_csv(std::ostream& os, const ScanReport& r, bool header = true)
{
    if (header)
        os << "functional,base,metric,index,radius,distance,f_base,f_sample,ratio,bound,pass\n";
    for (const ScanSample& x : r.samples)
        os << r.functional << ',' << r.base << ',' << to_string(r.metric) << ',' << x.index << ',' << format_double(x.radius)
           << ',' << format_double(x.distance) << ',' << format_double(x.f_base) << ',' << format_double(x.f_sample) << ','
           << format_double(x.ratio) << ',' << format_double(x.bound) << ',' << (x.pass ? 1 : 0) << '\n';
}

inline json to_json(const BoundCheck& b)
{
    json entries = json::array();
    for (const BoundEntry& e : b.entries)
        entries.push_back({{"functional", e.functional},
                           {"direction", e.direction},
                           {"lhs", e.lhs},
                           {"factor", e.factor},
                           {"rhs", e.rhs},
                           {"slack", e.slack},
                           {"pass", e.pass}});
    return {{"bound", to_string(b.kind)},
            {"distance", b.distance},
            {"distance_status", to_string(b.distance_status)},
            {"entries", entries},
            {"pass", b.pass}};
}

inline json to_json(const SmaxReport& s)
{
    json per = json::array();
    for (const ScanReport& r : s.per_body)
        per.push_back(to_json(r));
    return {{"functional", s.functional},
            {"metric", to_string(s.metric)},
            {"estimate", s.estimate},
            {"cap", s.cap ? json(*s.cap) : json(nullptr)},
            {"pass", s.pass},
            {"per_body", per},
            {"replay", {{"pairs", s.replay_pairs}, {"exceeding", s.replay_exceed}, {"max_ratio", s.replay_max_ratio},
                        {"label", "exploratory"}}}};
}

inline json to_json(const NetCertification& c)
{
    return {{"probes", c.probes},           {"failures", c.failures},
            {"max_distance", c.max_distance}, {"cell_max_distance", c.cell_max_distance},
            {"searched", c.searched},       {"beta", c.beta},
            {"pass", c.pass},               {"proven", c.proven}};
}

inline json to_json(const PackingCoveringReport& p)
{
    return {{"omega", p.omega},
            {"family_size", p.family_size},
            {"packing", p.packing},
            {"covering", p.covering},
            {"packing_half", p.packing_half},
            {"half_packing_covers", p.half_packing_covers},
            {"chain_holds", p.chain_holds},
            {"pass", p.pass},
            {"note", p.note}};
}

inline json to_json(const IntegralSumResult& s)
{
    return {{"value", s.value},   {"value_17g", format_double(s.value)}, {"members", s.members},
            {"evaluated", s.evaluated}, {"cached", s.cached}, {"excluded", s.excluded},
            {"min", number(s.min)}, {"max", number(s.max)}, {"variance", s.variance},
            {"log", s.log}};
}

inline json to_json(const ConvergenceTable& t)
{
    json rows = json::array();
    for (const ConvergenceRow& r : t.rows)
        rows.push_back({{"beta", r.beta},
                        {"members", r.members},
                        {"mean", r.mean},
                        {"min", r.min},
                        {"max", r.max},
                        {"variance", r.variance},
                        {"excluded", r.excluded}});
    return {{"functional", t.functional}, {"label", t.label}, {"rows", rows}, {"truncated", t.truncated}};
}

inline json to_json(const CriterionResult& r)
{
    return {{"criterion", r.id}, {"title", r.title}, {"pass", r.pass}, {"seconds", r.seconds}, {"details", r.details}};
}

}  // namespace cvxspace
