#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "body.hpp"
#include "nets.hpp"

namespace cvxspace {

using json = nlohmann::json;

/// %.17g: enough digits for every double to survive a write/read cycle.
inline std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline std::string json_string(const std::string& s) { return json(s).dump(); }

inline void write_vertices(std::ostream& os, std::span<const Vec2> v)
{
    os << "[";
    for (std::size_t i = 0; i < v.size(); ++i)
        os << (i ? ", " : "") << "[" << format_double(v[i].x) << ", " << format_double(v[i].y) << "]";
    os << "]";
}

[[noreturn]] inline void schema_error(const std::string& where, const std::string& what)
{
    throw Error(ErrorKind::schema, "io", where + ": " + what);
}

inline std::vector<Vec2> read_vertices(const json& j, const std::string& where)
{
    if (!j.contains("vertices"))
        schema_error(where, "missing \"vertices\"");
    const json& v = j["vertices"];
    if (!v.is_array())
        schema_error(where, "\"vertices\" must be an array of [x, y] pairs");
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const json& p = v[i];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            schema_error(where, "vertex " + std::to_string(i) + " is not a pair of numbers");
        out.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    if (out.size() < 3)
        schema_error(where, "at least 3 vertices required, found " + std::to_string(out.size()));
    return out;
}

}  // namespace detail

/// Body file text: {"vertices": [[x, y], ...], "symmetric": bool, "provenance": string}.
inline std::string body_to_json_text(const ConvexBody& k)
{
    std::ostringstream os;
    os << "{\"vertices\": ";
    detail::write_vertices(os, k.vertices());
    os << ", \"symmetric\": " << (k.symmetric() ? "true" : "false");
    if (!k.provenance().empty())
        os << ", \"provenance\": " << detail::json_string(k.provenance());
    os << "}";
    return os.str();
}

inline json body_to_json(const ConvexBody& k) { return json::parse(body_to_json_text(k)); }

struct ParsedBody {
    ConvexBody body;
    std::vector<std::string> warnings;
};

/// Validates a parsed body object. Clockwise vertex lists are reversed with a warning; any
/// other violated invariant is a schema error naming it.
inline ParsedBody body_from_json(const json& j, const std::string& where = "body")
{
    if (!j.is_object())
        detail::schema_error(where, "expected a JSON object");
    std::vector<Vec2> v = detail::read_vertices(j, where);
    std::optional<bool> sym;
    if (j.contains("symmetric")) {
        if (!j["symmetric"].is_boolean())
            detail::schema_error(where, "\"symmetric\" must be a boolean");
        sym = j["symmetric"].get<bool>();
    }
    std::string prov;
    if (j.contains("provenance")) {
        if (!j["provenance"].is_string())
            detail::schema_error(where, "\"provenance\" must be a string");
        prov = j["provenance"].get<std::string>();
    }
    bool flipped = false;
    try {
        ParsedBody out{ConvexBody::from_vertices(std::move(v), sym, prov, &flipped), {}};
        if (flipped)
            out.warnings.push_back(where + ": vertices were clockwise; reoriented counter-clockwise");
        return out;
    } catch (const Error& e) {
        detail::schema_error(where, e.what());
    }
}

inline json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::schema, "io", path + ": cannot open file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::schema, "io", path + ": malformed JSON: " + e.what());
    }
}

inline ParsedBody parse_body_file_checked(const std::string& path)
{
    return body_from_json(read_json_file(path), path);
}

inline ConvexBody parse_body_file(const std::string& path) { return parse_body_file_checked(path).body; }

inline void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorKind::schema, "io", path + ": cannot write file");
    out << text;
    if (text.empty() || text.back() != '\n')
        out << '\n';
}

inline void write_body_file(const std::string& path, const ConvexBody& k) { write_text_file(path, body_to_json_text(k)); }

inline json lattice_to_json(const Lattice2& l)
{
    return json::array({json::array({l.b1.x, l.b1.y}), json::array({l.b2.x, l.b2.y})});
}

inline json construction_to_json(const NetConstruction& c)
{
    return {{"directions", c.directions},
            {"levels", c.levels},
            {"step", c.step},
            {"outer_error", c.outer_error},
            {"quantization_error", c.quantization_error},
            {"repair_polygon", c.repair_polygon},
            {"repair_error", c.repair_error},
            {"design_bound", c.design_bound},
            {"proven_bound", c.proven_bound},
            {"target", c.target},
            {"cells", c.cells},
            {"repaired", c.repaired},
            {"dropped", c.dropped},
            {"merged", c.merged}};
}

/// Net file: construction record plus member bodies. `header` is spliced in as extra top-level
/// fields (config echo, version).
inline std::string net_to_json_text(const Net& net, const json& header = json::object())
{
    std::ostringstream os;
    os << "{";
    for (auto it = header.begin(); it != header.end(); ++it)
        os << detail::json_string(it.key()) << ": " << it.value().dump() << ",\n";
    os << "\"metric\": \"" << to_string(net.metric) << "\",\n\"beta\": " << format_double(net.beta)
       << ",\n\"seed\": " << net.seed << ",\n\"construction\": " << construction_to_json(net.construction).dump()
       << ",\n\"members\": [\n";
    for (std::size_t i = 0; i < net.bodies.size(); ++i)
        os << (i ? ",\n" : "") << body_to_json_text(net.bodies[i]);
    os << "\n]}\n";
    return os.str();
}

inline Net net_from_json(const json& j, const std::string& where = "net")
{
    try {
        Net net;
        net.metric = parse_net_metric(j.at("metric").get<std::string>());
        net.beta = j.at("beta").get<double>();
        net.seed = j.at("seed").get<std::uint64_t>();
        const json& c = j.at("construction");
        NetConstruction& k = net.construction;
        k.directions = c.at("directions").get<int>();
        k.levels = c.at("levels").get<int>();
        k.step = c.at("step").get<double>();
        k.outer_error = c.at("outer_error").get<double>();
        k.quantization_error = c.at("quantization_error").get<double>();
        k.repair_polygon = c.at("repair_polygon").get<int>();
        k.repair_error = c.at("repair_error").get<double>();
        k.design_bound = c.at("design_bound").get<double>();
        k.proven_bound = c.at("proven_bound").get<double>();
        k.target = c.at("target").get<double>();
        k.cells = c.at("cells").get<std::size_t>();
        k.repaired = c.at("repaired").get<std::size_t>();
        k.dropped = c.at("dropped").get<std::size_t>();
        k.merged = c.at("merged").get<std::size_t>();
        const json& m = j.at("members");
        net.bodies.reserve(m.size());
        for (std::size_t i = 0; i < m.size(); ++i)
            net.bodies.push_back(body_from_json(m[i], where + " member " + std::to_string(i)).body);
        return net;
    } catch (const json::exception& e) {
        detail::schema_error(where, e.what());
    }
}

inline Net read_net_file(const std::string& path) { return net_from_json(read_json_file(path), path); }

inline void write_net_file(const std::string& path, const Net& net, const json& header = json::object())
{
    write_text_file(path, net_to_json_text(net, header));
}

}  // namespace cvxspace
