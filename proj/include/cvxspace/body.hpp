#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cvxspace/geometry.hpp"

namespace cvxspace {

/// Supporting half-plane {y : normal . y <= offset} with a unit outward normal.
struct Facet {
    Vec2 normal;
    double offset = 0.0;
};

/// A convex polygon with counterclockwise vertices. Smooth bodies are carried as inscribed
/// polygonal approximations.
class ConvexBody {
public:
    /// Validates without repair. Clockwise input is reoriented; `reoriented` reports it.
    static ConvexBody from_vertices(std::vector<Vec2> vertices,
                                    std::optional<bool> symmetric_hint = std::nullopt,
                                    std::string provenance = {}, bool* reoriented = nullptr)
    {
        if (vertices.size() < 3)
            throw Error(ErrorKind::invalid_body, "bodies", "at least 3 vertices required");
        for (const Vec2& v : vertices)
            if (!std::isfinite(v.x) || !std::isfinite(v.y))
                throw Error(ErrorKind::invalid_body, "bodies", "non-finite vertex coordinate");
        bool flipped = false;
        if (signed_area(vertices) < 0.0) {
            std::reverse(vertices.begin(), vertices.end());
            flipped = true;
        }
        if (reoriented)
            *reoriented = flipped;
        ConvexBody body(std::move(vertices), std::move(provenance));
        body.validate();
        body.resolve_symmetry(symmetric_hint);
        return body;
    }

    /// Convex hull of arbitrary points with collinear and coincident vertices removed.
    static ConvexBody hull_of(std::vector<Vec2> points, std::optional<bool> symmetric_hint = std::nullopt,
                              std::string provenance = {})
    {
        std::vector<Vec2> hull = convex_hull(std::move(points));
        ConvexBody body(std::move(hull), std::move(provenance));
        body.validate();
        body.resolve_symmetry(symmetric_hint);
        return body;
    }

    std::span<const Vec2> vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    Vec2 vertex(std::size_t i) const { return vertices_[i % vertices_.size()]; }
    bool symmetric() const { return symmetric_; }
    const std::string& provenance() const { return provenance_; }

    double area() const { return signed_area(vertices_); }

    Vec2 centroid() const
    {
        double a = 0.0;
        Vec2 c{};
        const std::size_t n = vertices_.size();
        const Vec2 o = vertices_[0];
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 p = vertices_[i] - o, q = vertices_[(i + 1) % n] - o;
            const double w = cross(p, q);
            a += w;
            c += (p + q) * w;
        }
        return o + c / (3.0 * a);
    }

    /// Rotating calipers over antipodal vertex pairs.
    double diameter() const
    {
        const std::size_t n = vertices_.size();
        double d = 0.0;
        std::size_t j = 1;
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 e = vertices_[(i + 1) % n] - vertices_[i];
            std::size_t steps = 0;
            while (steps++ < n && cross(e, vertices_[(j + 1) % n] - vertices_[j]) > 0.0)
                j = (j + 1) % n;
            d = std::max({d, norm2(vertices_[i] - vertices_[j]), norm2(vertices_[(i + 1) % n] - vertices_[j])});
        }
        return std::sqrt(d);
    }

    /// Diagonal of the axis-aligned bounding box.
    double extent() const
    {
        Vec2 lo = vertices_[0], hi = vertices_[0];
        for (const Vec2& v : vertices_) {
            lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
            hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
        }
        return norm(hi - lo);
    }

    double circumradius_about(Vec2 c) const
    {
        double r = 0.0;
        for (const Vec2& v : vertices_)
            r = std::max(r, norm2(v - c));
        return std::sqrt(r);
    }

    /// Largest disk about `c` inside the body; negative when `c` is outside.
    double inradius_about(Vec2 c) const
    {
        double r = std::numeric_limits<double>::infinity();
        for (const Facet& f : facets())
            r = std::min(r, f.offset - dot(f.normal, c));
        return r;
    }

    /// h_K(u) = max <x, u>; u must be a unit vector.
    double support(Vec2 u) const
    {
        if (std::abs(norm(u) - 1.0) > 1e-12)
            throw Error(ErrorKind::invalid_parameter, "bodies", "support direction is not a unit vector");
        return support_unchecked(u);
    }

    double support_unchecked(Vec2 u) const { return dot(vertices_[support_index(u)], u); }

    std::size_t support_index(Vec2 u) const
    {
        std::size_t best = 0;
        double bv = dot(vertices_[0], u);
        for (std::size_t i = 1; i < vertices_.size(); ++i) {
            const double v = dot(vertices_[i], u);
            if (v > bv) {
                bv = v;
                best = i;
            }
        }
        return best;
    }

    /// Outward unit facet normals, facet i spanning vertex i to vertex i+1.
    std::vector<Facet> facets() const
    {
        std::vector<Facet> out;
        const std::size_t n = vertices_.size();
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 e = vertices_[(i + 1) % n] - vertices_[i];
            const Vec2 nrm = Vec2{e.y, -e.x} / norm(e);
            out.push_back({nrm, dot(nrm, vertices_[i])});
        }
        return out;
    }

    /// Point membership with absolute slack `tol`.
    bool contains(Vec2 p, double tol = 0.0) const
    {
        const std::size_t n = vertices_.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 e = vertices_[(i + 1) % n] - vertices_[i];
            if (cross(e, p - vertices_[i]) < -tol * norm(e))
                return false;
        }
        return true;
    }

    bool contains(const ConvexBody& other, double tol = 0.0) const
    {
        for (const Vec2& v : other.vertices_)
            if (!contains(v, tol))
                return false;
        return true;
    }

    ConvexBody translated(Vec2 t) const
    {
        ConvexBody out = *this;
        for (Vec2& v : out.vertices_)
            v += t;
        return out;
    }

    ConvexBody scaled(double s) const
    {
        if (!(s > 0.0))
            throw Error(ErrorKind::invalid_parameter, "bodies", "scale factor must be positive");
        ConvexBody out = *this;
        for (Vec2& v : out.vertices_)
            v *= s;
        return out;
    }

    ConvexBody reflected() const
    {
        ConvexBody out = *this;
        for (Vec2& v : out.vertices_)
            v = -v;
        return out;
    }

    ConvexBody centered() const { return translated(-centroid()); }

    ConvexBody with_provenance(std::string p) const
    {
        ConvexBody out = *this;
        out.provenance_ = std::move(p);
        return out;
    }

    /// Is the vertex set its own reflection through the centroid, within tol * diameter?
    bool check_central_symmetry(double rel_tol = 1e-7) const
    {
        const std::size_t n = vertices_.size();
        if (n % 2 != 0)
            return false;
        const Vec2 c = centroid();
        const double tol = rel_tol * diameter();
        const std::size_t h = n / 2;
        for (std::size_t i = 0; i < n; ++i)
            if (norm(vertices_[(i + h) % n] - (2.0 * c - vertices_[i])) > tol)
                return false;
        return true;
    }

    static double signed_area(std::span<const Vec2> pts)
    {
        double a = 0.0;
        const std::size_t n = pts.size();
        const Vec2 o = pts[0];
        for (std::size_t i = 1; i + 1 < n; ++i)
            a += cross(pts[i] - o, pts[i + 1] - o);
        return 0.5 * a;
    }

    /// Andrew's monotone chain; drops points within 1e-9 * extent of a neighbour and
    /// vertices whose turn is below 1e-9 radians.
    static std::vector<Vec2> convex_hull(std::vector<Vec2> pts)
    {
        std::sort(pts.begin(), pts.end(), [](Vec2 p, Vec2 q) { return p.x < q.x || (p.x == q.x && p.y < q.y); });
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        if (pts.size() < 3)
            throw Error(ErrorKind::invalid_body, "bodies", "hull has fewer than 3 distinct points");
        double extent = 0.0;
        for (const Vec2& p : pts)
            extent = std::max({extent, std::abs(p.x - pts[0].x), std::abs(p.y - pts[0].y)});
        // Turn test relative to both segment lengths, so near-coincident points cannot
        // swallow a genuine corner.
        auto not_left = [](Vec2 a, Vec2 b) { return cross(a, b) <= 1e-12 * norm(a) * norm(b); };
        std::vector<Vec2> h(2 * pts.size());
        std::size_t k = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            while (k >= 2 && not_left(h[k - 1] - h[k - 2], pts[i] - h[k - 2]))
                --k;
            h[k++] = pts[i];
        }
        for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
            while (k >= t && not_left(h[k - 1] - h[k - 2], pts[i] - h[k - 2]))
                --k;
            h[k++] = pts[i];
        }
        h.resize(k - 1);
        return prune(std::move(h), extent);
    }

private:
    ConvexBody(std::vector<Vec2> v, std::string provenance)
        : vertices_(std::move(v)), provenance_(std::move(provenance))
    {}

    static bool sharp_enough(Vec2 e0, Vec2 e1)
    {
        return cross(e0, e1) > 1e-9 * norm(e0) * norm(e1);
    }

    static std::vector<Vec2> prune(std::vector<Vec2> h, double extent)
    {
        bool changed = true;
        while (changed && h.size() >= 3) {
            changed = false;
            const std::size_t n = h.size();
            for (std::size_t i = 0; i < n; ++i) {
                const Vec2 prev = h[(i + n - 1) % n], cur = h[i], next = h[(i + 1) % n];
                if (norm(next - cur) <= 1e-9 * extent || !sharp_enough(cur - prev, next - cur)) {
                    h.erase(h.begin() + static_cast<std::ptrdiff_t>(i));
                    changed = true;
                    break;
                }
            }
        }
        if (h.size() < 3)
            throw Error(ErrorKind::invalid_body, "bodies", "hull degenerates to fewer than 3 vertices");
        return h;
    }

    void validate() const
    {
        const std::size_t n = vertices_.size();
        if (n < 3)
            throw Error(ErrorKind::invalid_body, "bodies", "at least 3 vertices required");
        const double diam = extent();
        if (!(diam > 0.0))
            throw Error(ErrorKind::invalid_body, "bodies", "zero diameter");
        for (std::size_t i = 0; i < n; ++i)
            if (norm(vertices_[(i + 1) % n] - vertices_[i]) < 1e-9 * diam)
                throw Error(ErrorKind::invalid_body, "bodies",
                            "duplicate vertices (closer than 1e-9 x diameter) at index " + std::to_string((i + 1) % n));
        double turning = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 p = vertices_[i], q = vertices_[(i + 1) % n], r = vertices_[(i + 2) % n];
            if (!sharp_enough(q - p, r - q))
                throw Error(ErrorKind::invalid_body, "bodies",
                            "convexity violated at vertex " + std::to_string((i + 1) % n));
            turning += std::atan2(cross(q - p, r - q), dot(q - p, r - q));
        }
        if (std::abs(turning - 2.0 * kPi) > 1e-6)
            throw Error(ErrorKind::invalid_body, "bodies", "vertex sequence winds more than once");
    }

    void resolve_symmetry(std::optional<bool> hint)
    {
        const bool measured = check_central_symmetry(1e-7);
        if (hint.has_value() && *hint && !measured)
            throw Error(ErrorKind::invalid_body, "bodies",
                        "symmetric flag set but vertices are not centrally symmetric within 1e-7 x diameter");
        symmetric_ = measured;
    }

    std::vector<Vec2> vertices_;
    std::string provenance_;
    bool symmetric_ = false;
};

inline double area(const ConvexBody& k) { return k.area(); }

inline ConvexBody apply_affine(const ConvexBody& k, const AffineMap2& sigma)
{
    std::vector<Vec2> v;
    v.reserve(k.size());
    for (const Vec2& p : k.vertices())
        v.push_back(sigma(p));
    if (sigma.det() < 0.0)
        std::reverse(v.begin(), v.end());
    return ConvexBody::hull_of(std::move(v), std::nullopt, k.provenance());
}

/// Merges the two counterclockwise edge sequences by slope.
inline ConvexBody minkowski_sum(const ConvexBody& a, const ConvexBody& b)
{
    auto lowest = [](const ConvexBody& k) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < k.size(); ++i) {
            const Vec2 p = k.vertex(i), q = k.vertex(best);
            if (p.y < q.y || (p.y == q.y && p.x < q.x))
                best = i;
        }
        return best;
    };
    const std::size_t na = a.size(), nb = b.size();
    const std::size_t ia = lowest(a), ib = lowest(b);
    std::vector<Vec2> out;
    out.reserve(na + nb);
    std::size_t i = 0, j = 0;
    while (i < na || j < nb) {
        out.push_back(a.vertex(ia + i) + b.vertex(ib + j));
        const Vec2 ea = a.vertex(ia + i + 1) - a.vertex(ia + i);
        const Vec2 eb = b.vertex(ib + j + 1) - b.vertex(ib + j);
        const double c = cross(ea, eb);
        if (j == nb || (i < na && c > 0.0)) {
            ++i;
        } else if (i == na || c < 0.0) {
            ++j;
        } else {
            ++i;
            ++j;
        }
    }
    return ConvexBody::hull_of(std::move(out));
}

/// (1/2)(K - K), centred at the origin.
inline ConvexBody central_symmetral(const ConvexBody& k)
{
    const ConvexBody d = minkowski_sum(k, k.reflected());
    std::vector<Vec2> v(d.vertices().begin(), d.vertices().end());
    for (Vec2& p : v)
        p *= 0.5;
    return ConvexBody::hull_of(std::move(v), std::nullopt, "symmetral(" + k.provenance() + ")");
}

inline double support(const ConvexBody& k, Vec2 u) { return k.support(u); }

/// K intersected with the half-plane {x : <x, u> <= h}.
inline ConvexBody intersect_halfplane(const ConvexBody& k, Vec2 u, double h)
{
    std::vector<Vec2> out;
    const std::size_t n = k.size();
    out.reserve(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 p = k.vertex(i), q = k.vertex(i + 1);
        const double sp = dot(p, u) - h, sq = dot(q, u) - h;
        if (sp <= 0.0)
            out.push_back(p);
        if ((sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0))
            out.push_back(p + (q - p) * (sp / (sp - sq)));
    }
    return ConvexBody::hull_of(std::move(out), std::nullopt, k.provenance());
}

/// Regular k-gon on the circle of radius `circumradius` about the origin, first vertex on +x.
inline ConvexBody make_regular_polygon(int k, double circumradius)
{
    if (k < 3)
        throw Error(ErrorKind::invalid_parameter, "bodies", "regular polygon needs k >= 3");
    if (!(circumradius > 0.0))
        throw Error(ErrorKind::invalid_parameter, "bodies", "circumradius must be positive");
    std::vector<Vec2> v;
    v.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        v.push_back(unit(2.0 * kPi * i / k) * circumradius);
    return ConvexBody::from_vertices(std::move(v), std::nullopt,
                                     "regular_polygon(k=" + std::to_string(k) + ",r=" + std::to_string(circumradius) + ")");
}

enum class NamedBody {
    unit_square,
    unit_edge_hexagon,
    unit_right_triangle,
    equilateral_triangle,
    stromquist_D,
    smoothed_octagon,
    regular_octagon,
};

inline const char* to_string(NamedBody n)
{
    switch (n) {
    case NamedBody::unit_square: return "unit_square";
    case NamedBody::unit_edge_hexagon: return "unit_edge_hexagon";
    case NamedBody::unit_right_triangle: return "unit_right_triangle";
    case NamedBody::equilateral_triangle: return "equilateral_triangle";
    case NamedBody::stromquist_D: return "stromquist_D";
    case NamedBody::smoothed_octagon: return "smoothed_octagon";
    case NamedBody::regular_octagon: return "regular_octagon";
    }
    return "?";
}

inline NamedBody parse_named_body(const std::string& s)
{
    for (NamedBody n : {NamedBody::unit_square, NamedBody::unit_edge_hexagon, NamedBody::unit_right_triangle,
                        NamedBody::equilateral_triangle, NamedBody::stromquist_D, NamedBody::smoothed_octagon,
                        NamedBody::regular_octagon})
        if (s == to_string(n))
            return n;
    throw Error(ErrorKind::invalid_parameter, "bodies", "unknown body name '" + s + "'");
}

namespace detail {

/// Stromquist's domain {|y| <= 1, x^2 + y^2 <= 2, x^2/2 + y^2 <= 4/3}, arcs sampled by
/// `res` inscribed chords each.
inline std::vector<Vec2> stromquist_vertices(int res)
{
    const double ea = std::sqrt(8.0 / 3.0), eb = std::sqrt(4.0 / 3.0);
    const double phi0 = std::atan(std::sqrt(0.5));
    std::vector<Vec2> chain;
    auto ellipse = [&](double t0, double t1) {
        for (int i = 0; i <= res; ++i) {
            const double t = t0 + (t1 - t0) * i / res;
            chain.push_back({ea * std::cos(t), eb * std::sin(t)});
        }
    };
    ellipse(-kPi / 3.0, -kPi / 4.0);
    for (int i = 1; i < res; ++i) {
        const double t = -phi0 + 2.0 * phi0 * i / res;
        chain.push_back(unit(t) * std::sqrt(2.0));
    }
    ellipse(kPi / 4.0, kPi / 3.0);
    std::vector<Vec2> all = chain;
    for (const Vec2& p : chain)
        all.push_back(-p);
    return all;
}

/// Regular octagon of inradius 1 with every corner replaced by the hyperbola arc tangent to
/// the two sides at the corner and asymptotic to the two sides beyond them.
inline std::vector<Vec2> smoothed_octagon_vertices(int res)
{
    const double half = kPi / 8.0;
    const double cs = std::cos(half);
    const double a = std::sqrt(2.0 * std::sqrt(2.0)) * cs;
    const double b = a * std::tan(half);
    const double dist = 1.0 / std::sin(half);
    const double s_t = std::acosh(a * cs / std::sqrt(2.0));
    std::vector<Vec2> out;
    for (int k = 0; k < 8; ++k) {
        const double phi = half + k * kPi / 4.0;
        const Vec2 e = unit(phi), f = perp(e);
        const Vec2 apex = e * dist;
        for (int i = 0; i <= res; ++i) {
            const double s = -s_t + 2.0 * s_t * i / res;
            out.push_back(apex - e * (a * std::cosh(s)) + f * (b * std::sinh(s)));
        }
    }
    return out;
}

}  // namespace detail

inline ConvexBody make_named_body(NamedBody name, int resolution = 256)
{
    const std::string tag = std::string(to_string(name));
    switch (name) {
    case NamedBody::unit_square:
        return ConvexBody::from_vertices({{0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}, {-0.5, -0.5}}, true, tag);
    case NamedBody::unit_edge_hexagon:
        return make_regular_polygon(6, 1.0).with_provenance(tag);
    case NamedBody::unit_right_triangle:
        return ConvexBody::from_vertices({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}, false, tag)
            .translated({-1.0 / 3.0, -1.0 / 3.0});
    case NamedBody::equilateral_triangle:
        return make_regular_polygon(3, 1.0 / std::sqrt(3.0)).with_provenance(tag);
    case NamedBody::regular_octagon:
        return make_regular_polygon(8, 1.0).with_provenance(tag);
    case NamedBody::stromquist_D:
    case NamedBody::smoothed_octagon:
        break;
    }
    if (resolution < 32)
        throw Error(ErrorKind::invalid_parameter, "bodies",
                    "resolution " + std::to_string(resolution) + " too small for curved body (need >= 32)");
    const std::string p = tag + "(resolution=" + std::to_string(resolution) + ")";
    if (name == NamedBody::stromquist_D)
        return ConvexBody::hull_of(detail::stromquist_vertices(resolution), true, p);
    return ConvexBody::hull_of(detail::smoothed_octagon_vertices(resolution), true, p);
}

/// Inscribed regular polygon approximating the disk of the given radius.
inline ConvexBody make_disk(int k = 256, double radius = 1.0)
{
    return make_regular_polygon(k, radius).with_provenance("disk(k=" + std::to_string(k) + ")");
}

/// Named body, "disk" (inscribed `resolution`-gon) or "polygon<k>" (regular k-gon, circumradius 1).
inline ConvexBody body_by_name(const std::string& name, int resolution = 256)
{
    if (name == "disk") {
        if (resolution < 3)
            throw Error(ErrorKind::invalid_parameter, "bodies", "disk resolution must be at least 3");
        return make_disk(resolution);
    }
    if (name.rfind("polygon", 0) == 0 && name.size() > 7) {
        const int k = std::stoi(name.substr(7));
        if (k < 3)
            throw Error(ErrorKind::invalid_parameter, "bodies", "a polygon needs at least 3 vertices");
        return make_regular_polygon(k, 1.0).with_provenance(name);
    }
    return make_named_body(parse_named_body(name), resolution);
}

}  // namespace cvxspace
