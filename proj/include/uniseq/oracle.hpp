#pragma once
#include <uniseq/core.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace uniseq {
namespace oracle {

// Slow reference computations for tests. Block indices are 0-based.

/*
 * Literal double loop: c_k = sum over q in [k, N) of y[q] conj(y[q-k]),
 * skipping q == i and q == i + k.
 */
template <class Scalar>
inline cvec_t<Scalar> constants(const UnimodularSequence<Scalar>& y, Eigen::Index i)
{
    const auto n = y.size();
    if (i < 0 || i >= n) throw std::out_of_range("oracle::constants: block index out of range");
    cvec_t<Scalar> c(n - 1);
    for (Eigen::Index k = 1; k < n; ++k) {
        complex_t<Scalar> acc(0, 0);
        for (Eigen::Index q = k; q < n; ++q) {
            if (q == i || q == i + k) continue;
            acc += y[q] * std::conj(y[q - k]);
        }
        c[k - 1] = acc;
    }
    return c;
}

/*
 * ISL of y with entry i replaced by `candidate`, by direct summation.
 */
template <class Scalar>
inline Scalar block_objective(const UnimodularSequence<Scalar>& y, Eigen::Index i, const complex_t<Scalar>& candidate)
{
    const auto n = y.size();
    if (i < 0 || i >= n) throw std::out_of_range("oracle::block_objective: block index out of range");
    cvec_t<Scalar> z = y.entries();
    z[i] = candidate;
    Scalar total = 0;
    for (Eigen::Index k = 1; k < n; ++k) {
        complex_t<Scalar> r(0, 0);
        for (Eigen::Index q = k; q < n; ++q) r += z[q] * std::conj(z[q - k]);
        total += std::norm(r);
    }
    return total;
}

template <class Scalar>
struct PhaseSearch
{
    complex_t<Scalar> phase;
    Scalar isl;
};

/*
 * Same value as block_objective, evaluated for many candidates: the
 * y_i-free part of every lag comes from constants(), and each candidate
 * re-adds its own products lag by lag.
 */
template <class Scalar>
inline PhaseSearch<Scalar> search_phase(const UnimodularSequence<Scalar>& y, Eigen::Index i, int grid_points)
{
    if (grid_points < 8) throw std::invalid_argument("oracle::best_phase: need at least 8 grid points");
    const auto n = y.size();
    const cvec_t<Scalar> c = constants(y, i);
    auto evaluate = [&](const complex_t<Scalar>& cand) {
        Scalar total = 0;
        for (Eigen::Index k = 1; k < n; ++k) {
            complex_t<Scalar> r = c[k - 1];
            if (i - k >= 0) r += cand * std::conj(y[i - k]);
            if (i + k < n) r += y[i + k] * std::conj(cand);
            total += std::norm(r);
        }
        return total;
    };
    const Scalar tie_tol = Scalar(1e-12);
    PhaseSearch<Scalar> best{ complex_t<Scalar>(1, 0), evaluate(complex_t<Scalar>(1, 0)) };
    for (int g = 1; g < grid_points; ++g) {
        const Scalar phase = Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(g) / Scalar(grid_points);
        const complex_t<Scalar> cand = std::polar(Scalar(1), phase);
        const Scalar v = evaluate(cand);
        if (v < best.isl - tie_tol * std::max(Scalar(1), best.isl)) best = { cand, v };
    }
    return best;
}

/*
 * Grid point exp(j 2 pi g / grid_points) minimizing block_objective.
 * Values within 1e-12 relative of the incumbent count as ties, and ties go
 * to the smallest phase.
 */
template <class Scalar>
inline complex_t<Scalar> best_phase(const UnimodularSequence<Scalar>& y, Eigen::Index i, int grid_points)
{
    return search_phase(y, i, grid_points).phase;
}

} // namespace oracle
} // namespace uniseq
