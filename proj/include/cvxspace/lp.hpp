#pragma once

#include <cmath>
#include <vector>

#include "cvxspace/geometry.hpp"

namespace cvxspace {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpResult {
    LpStatus status = LpStatus::iteration_limit;
    double value = 0.0;
    std::vector<double> y;
    /// Simplex multipliers, one per equality row.
    std::vector<double> duals;
};

/// maximize c.y subject to A y = b, y >= 0, with A given row-major (m x n) and b >= 0.
/// Dense two-phase tableau simplex for the very small row counts used here.
inline LpResult simplex_max(int m, int n, const std::vector<double>& a, const std::vector<double>& b,
                            const std::vector<double>& c, int max_pivots = 10000)
{
    if (static_cast<int>(a.size()) != m * n || static_cast<int>(b.size()) != m || static_cast<int>(c.size()) != n)
        throw Error(ErrorKind::invalid_parameter, "metrics", "simplex: dimension mismatch");
    const int cols = n + m + 1;
    const int rhs = n + m;
    std::vector<double> t(static_cast<std::size_t>((m + 1) * cols), 0.0);
    auto at = [&](int r, int col) -> double& { return t[static_cast<std::size_t>(r * cols + col)]; };
    std::vector<int> basis(m);
    for (int r = 0; r < m; ++r) {
        const double sign = b[r] < 0.0 ? -1.0 : 1.0;
        for (int j = 0; j < n; ++j)
            at(r, j) = sign * a[static_cast<std::size_t>(r * n + j)];
        at(r, n + r) = 1.0;
        at(r, rhs) = sign * b[r];
        basis[r] = n + r;
    }
    double scale = 0.0;
    for (double v : a)
        scale = std::max(scale, std::abs(v));
    const double eps = 1e-12 * std::max(1.0, scale);

    auto pivot = [&](int pr, int pc) {
        const double p = at(pr, pc);
        for (int j = 0; j < cols; ++j)
            at(pr, j) /= p;
        for (int r = 0; r <= m; ++r) {
            if (r == pr)
                continue;
            const double f = at(r, pc);
            if (f == 0.0)
                continue;
            for (int j = 0; j < cols; ++j)
                at(r, j) -= f * at(pr, j);
        }
        basis[pr] = pc;
    };

    // Objective row holds reduced costs d_j = c_j - z_j for a maximization; we enter on d_j > 0.
    auto run = [&](int allowed_cols, int& pivots) -> LpStatus {
        int stall = 0;
        double last = at(m, rhs);
        for (;;) {
            if (pivots >= max_pivots)
                return LpStatus::iteration_limit;
            int pc = -1;
            double best = eps;
            const bool bland = stall > 20;
            for (int j = 0; j < allowed_cols; ++j) {
                const double d = at(m, j);
                if (d > best) {
                    pc = j;
                    if (bland)
                        break;
                    best = d;
                }
            }
            if (pc < 0)
                return LpStatus::optimal;
            int pr = -1;
            double ratio = 0.0;
            for (int r = 0; r < m; ++r) {
                const double v = at(r, pc);
                if (v > eps) {
                    const double q = at(r, rhs) / v;
                    if (pr < 0 || q < ratio - 1e-15 || (std::abs(q - ratio) <= 1e-15 && basis[r] < basis[pr])) {
                        pr = r;
                        ratio = q;
                    }
                }
            }
            if (pr < 0)
                return LpStatus::unbounded;
            pivot(pr, pc);
            ++pivots;
            const double now = at(m, rhs);
            stall = (std::abs(now - last) <= 1e-15 * std::max(1.0, std::abs(now))) ? stall + 1 : 0;
            last = now;
        }
    };

    int pivots = 0;
    // Phase I: maximize -sum(artificials).
    for (int j = 0; j < cols; ++j) {
        double s = 0.0;
        for (int r = 0; r < m; ++r)
            s += at(r, j);
        at(m, j) = (j < n || j == rhs) ? s : 0.0;
    }
    LpResult out;
    LpStatus st = run(n, pivots);
    if (st == LpStatus::iteration_limit) {
        out.status = st;
        return out;
    }
    if (at(m, rhs) > 1e-9 * std::max(1.0, scale)) {
        out.status = LpStatus::infeasible;
        return out;
    }
    // Drive remaining zero-level artificials out where possible.
    for (int r = 0; r < m; ++r) {
        if (basis[r] < n)
            continue;
        for (int j = 0; j < n; ++j)
            if (std::abs(at(r, j)) > eps) {
                pivot(r, j);
                break;
            }
    }
    // Phase II objective row.
    for (int j = 0; j < cols; ++j)
        at(m, j) = j < n ? c[j] : 0.0;
    for (int r = 0; r < m; ++r) {
        const int bj = basis[r];
        const double cb = bj < n ? c[bj] : 0.0;
        if (cb == 0.0)
            continue;
        for (int j = 0; j < cols; ++j)
            at(m, j) -= cb * at(r, j);
    }
    st = run(n, pivots);
    out.status = st;
    out.y.assign(n, 0.0);
    for (int r = 0; r < m; ++r)
        if (basis[r] < n)
            out.y[basis[r]] = at(r, rhs);
    out.value = 0.0;
    for (int j = 0; j < n; ++j)
        out.value += c[j] * out.y[j];
    out.duals.assign(m, 0.0);
    for (int r = 0; r < m; ++r) {
        const double sign = b[r] < 0.0 ? -1.0 : 1.0;
        out.duals[r] = -at(m, n + r) * sign;
    }
    return out;
}

}  // namespace cvxspace
