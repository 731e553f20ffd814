#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <tbb/parallel_for.h>

#include "cvxspace/geometry.hpp"

namespace cvxspace {

using Objective = std::function<double(const std::vector<double>&)>;

struct MinimizeOptions {
    int max_evaluations = 2000;
    /// Stop when the simplex characteristic size falls below this.
    double size_tolerance = 1e-7;
    /// Restart from the incumbent until a restart improves by less than this.
    double restart_tolerance = 1e-9;
    int max_restarts = 4;
};

struct MinimizeResult {
    std::vector<double> x;
    double value = std::numeric_limits<double>::infinity();
    int evaluations = 0;
    bool converged = false;
};

namespace detail {

struct GslObjective {
    const Objective* f;
    int* counter;
    std::vector<double> scratch;
};

inline double gsl_trampoline(const gsl_vector* v, void* params)
{
    auto* p = static_cast<GslObjective*>(params);
    for (std::size_t i = 0; i < p->scratch.size(); ++i)
        p->scratch[i] = gsl_vector_get(v, i);
    ++*p->counter;
    const double r = (*p->f)(p->scratch);
    return std::isfinite(r) ? r : 1e300;
}

inline void silence_gsl()
{
    static const bool once = [] {
        gsl_set_error_handler_off();
        return true;
    }();
    (void)once;
}

}  // namespace detail

/// Nelder-Mead (GSL nmsimplex2) with simplex restarts around the incumbent.
inline MinimizeResult nelder_mead(const Objective& f, std::vector<double> x0, const std::vector<double>& step,
                                  const MinimizeOptions& opt = {})
{
    detail::silence_gsl();
    const std::size_t n = x0.size();
    MinimizeResult best;
    best.x = x0;
    int evals = 0;
    detail::GslObjective ctx{&f, &evals, std::vector<double>(n)};
    gsl_multimin_function fn{&detail::gsl_trampoline, n, &ctx};
    gsl_vector* x = gsl_vector_alloc(n);
    gsl_vector* ss = gsl_vector_alloc(n);
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);

    double scale = 1.0;
    for (int restart = 0; restart <= opt.max_restarts && evals < opt.max_evaluations; ++restart) {
        for (std::size_t i = 0; i < n; ++i) {
            gsl_vector_set(x, i, best.x[i]);
            gsl_vector_set(ss, i, step[i] * scale);
        }
        gsl_multimin_fminimizer_set(s, &fn, x, ss);
        bool small = false;
        while (evals < opt.max_evaluations) {
            if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS)
                break;
            if (gsl_multimin_fminimizer_size(s) < opt.size_tolerance) {
                small = true;
                break;
            }
        }
        const double v = s->fval;
        const double before = best.value;
        if (v < best.value) {
            best.value = v;
            for (std::size_t i = 0; i < n; ++i)
                best.x[i] = gsl_vector_get(s->x, i);
        }
        best.converged = small;
        if (std::isfinite(before) && before - best.value < opt.restart_tolerance)
            break;
        scale *= 0.5;
    }
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(ss);
    gsl_vector_free(x);
    best.evaluations = evals;
    return best;
}

/// Runs fn(i) for i in [0, n) and returns the results in index order; the output does not
/// depend on scheduling.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, Fn&& fn)
{
    std::vector<T> out(n);
    tbb::parallel_for(std::size_t{0}, n, [&](std::size_t i) { out[i] = fn(i); });
    return out;
}

/// Independent stream for task `index` under a run seed.
inline std::mt19937_64 task_rng(std::uint64_t seed, std::uint64_t index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x9e3779b9u};
    return std::mt19937_64(seq);
}

}  // namespace cvxspace
