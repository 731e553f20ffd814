#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cvxspace {

inline constexpr double kPi = 3.14159265358979323846;

enum class ErrorKind {
    invalid_parameter,
    invalid_body,
    domain,
    non_convergence,
    inconsistent_oracles,
    budget_exhausted,
    schema,
    capacity,
};

inline const char* to_string(ErrorKind k)
{
    switch (k) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::invalid_body: return "invalid-body";
    case ErrorKind::domain: return "domain-error";
    case ErrorKind::non_convergence: return "non-convergence";
    case ErrorKind::inconsistent_oracles: return "inconsistent-oracles";
    case ErrorKind::budget_exhausted: return "budget-exhausted";
    case ErrorKind::schema: return "schema-error";
    case ErrorKind::capacity: return "capacity-exceeded";
    }
    return "error";
}

/// Every failure raised by the library carries the module that produced it.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string module, const std::string& what)
        : std::runtime_error(module + ": " + to_string(kind) + ": " + what),
          kind_(kind), module_(std::move(module))
    {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& module() const noexcept { return module_; }

private:
    ErrorKind kind_;
    std::string module_;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
    constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
constexpr double norm2(Vec2 a) { return dot(a, a); }
/// Counterclockwise quarter turn.
constexpr Vec2 perp(Vec2 a) { return {-a.y, a.x}; }
inline Vec2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }
inline double angle_of(Vec2 a) { return std::atan2(a.y, a.x); }

/// Row-major 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr Mat2 diagonal(double s, double t) { return {s, 0.0, 0.0, t}; }
    static Mat2 rotation(double angle)
    {
        const double cs = std::cos(angle), sn = std::sin(angle);
        return {cs, -sn, sn, cs};
    }
    /// Columns are the given vectors.
    static constexpr Mat2 from_columns(Vec2 c0, Vec2 c1) { return {c0.x, c1.x, c0.y, c1.y}; }

    constexpr double det() const { return a * d - b * c; }
    constexpr Mat2 transpose() const { return {a, c, b, d}; }
    Mat2 inverse() const
    {
        const double dt = det();
        return {d / dt, -b / dt, -c / dt, a / dt};
    }
    constexpr Vec2 operator*(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    constexpr Mat2 operator*(const Mat2& o) const
    {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    constexpr Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
    constexpr Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    constexpr Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
    double frobenius() const { return std::sqrt(a * a + b * b + c * c + d * d); }
    constexpr Vec2 col0() const { return {a, c}; }
    constexpr Vec2 col1() const { return {b, d}; }
};

/// x -> linear * x + translation, with a nonsingular linear part.
class AffineMap2 {
public:
    AffineMap2() = default;
    AffineMap2(Mat2 linear, Vec2 translation = {}) : linear_(linear), translation_(translation)
    {
        if (!(std::abs(linear.det()) > 1e-12) || !std::isfinite(linear.det()))
            throw Error(ErrorKind::invalid_parameter, "bodies", "singular affine map (|det| <= 1e-12)");
    }

    static AffineMap2 identity() { return {}; }
    static AffineMap2 scaling(double s) { return AffineMap2(Mat2::diagonal(s, s)); }
    static AffineMap2 translation(Vec2 t) { return AffineMap2(Mat2::identity(), t); }

    const Mat2& linear() const { return linear_; }
    Vec2 translation() const { return translation_; }
    double det() const { return linear_.det(); }

    Vec2 operator()(Vec2 p) const { return linear_ * p + translation_; }

    /// (*this)(other(x))
    AffineMap2 compose(const AffineMap2& other) const
    {
        return AffineMap2(linear_ * other.linear_, linear_ * other.translation_ + translation_);
    }

    AffineMap2 inverse() const
    {
        const Mat2 inv = linear_.inverse();
        return AffineMap2(inv, -(inv * translation_));
    }

    /// Frobenius distance of the full 2x3 map from the identity.
    double distance_from_identity() const
    {
        const Mat2 dm = linear_ - Mat2::identity();
        return std::sqrt(dm.a * dm.a + dm.b * dm.b + dm.c * dm.c + dm.d * dm.d +
                         norm2(translation_));
    }

private:
    Mat2 linear_ = Mat2::identity();
    Vec2 translation_{};
};

/// {x : (x - center)^T shape (x - center) <= 1}
class Ellipse2 {
public:
    Ellipse2(Vec2 center, Mat2 shape) : center_(center), shape_(shape)
    {
        if (std::abs(shape.b - shape.c) > 1e-12)
            throw Error(ErrorKind::invalid_parameter, "bodies", "ellipse shape matrix not symmetric");
        if (!(shape.a > 0.0) || !(shape.det() > 0.0))
            throw Error(ErrorKind::invalid_parameter, "bodies", "ellipse shape matrix not positive definite");
    }

    /// Image of the unit disk under u -> center + half_axes * u, half_axes symmetric positive definite.
    static Ellipse2 from_half_axes(Vec2 center, const Mat2& half_axes)
    {
        Mat2 inv = half_axes.inverse();
        Mat2 m = inv.transpose() * inv;
        const double off = 0.5 * (m.b + m.c);
        m.b = off;
        m.c = off;
        return Ellipse2(center, m);
    }

    Vec2 center() const { return center_; }
    const Mat2& shape() const { return shape_; }
    double area() const { return kPi / std::sqrt(shape_.det()); }
    bool contains(Vec2 p, double tol = 0.0) const
    {
        const Vec2 q = p - center_;
        return dot(q, shape_ * q) <= 1.0 + tol;
    }

private:
    Vec2 center_;
    Mat2 shape_;
};

}  // namespace cvxspace
