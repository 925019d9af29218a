#pragma once
#include <Eigen/Core>
#include <uniseq/core.hpp>
#include <uniseq/run.hpp>
#include <uniseq/spectral.hpp>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace uniseq {
namespace fbmm {

// Blocks are 0-based here: block i updates y[i], i = 0..N-1.

/*
 * Per-lag constants for the block currently being optimized.
 *
 * c[k-1] (lag k = 1..N-1) is the lag-k autocorrelation with every product
 * that involves y[block] removed:
 *
 *     c_k = sum_{q=k}^{N-1} y[q] conj(y[q-k]),   q != block, q != block + k
 *
 * s is the zero-padded copy [0_{N-2}, y, 0_N] of length 3N-2. Reading y
 * through s makes every out-of-range neighbour read as zero.
 */
template <class Scalar>
struct ConstantsState
{
    using complex_type = complex_t<Scalar>;

    cvec_t<Scalar> c;
    cvec_t<Scalar> s;
    Eigen::Index block = 0;

    Eigen::Index length() const { return c.size() + 1; }
    Eigen::Index offset() const { return length() - 2; }

    const complex_type& entry(Eigen::Index q) const { return s[offset() + q]; }
    void assign(Eigen::Index q, const complex_type& value) { s[offset() + q] = value; }
    auto sequence() const { return s.segment(offset(), length()); }
};

/*
 * Coefficients of the block objective restricted to |y_i| = 1:
 *
 *     f_i(y_i) = 2 Re(alpha y_i^2) + 2 Re(beta y_i) + const
 *              = v^T A v + e^T v,   v = (Re y_i, Im y_i)
 */
template <class Scalar>
struct BlockQuadratic
{
    using mat2_type = Eigen::Matrix<Scalar, 2, 2>;
    using vec2_type = Eigen::Matrix<Scalar, 2, 1>;

    complex_t<Scalar> alpha{0, 0};
    complex_t<Scalar> beta{0, 0};
    Scalar a = 0, b = 0, c = 0, d = 0;

    static BlockQuadratic from_accumulators(const complex_t<Scalar>& alpha, const complex_t<Scalar>& beta)
    {
        BlockQuadratic q;
        q.alpha = alpha;
        q.beta = beta;
        q.a = 2 * alpha.real();
        q.b = 4 * alpha.imag();
        q.c = 2 * beta.real();
        q.d = 2 * beta.imag();
        return q;
    }

    static BlockQuadratic from_real(Scalar a, Scalar b, Scalar c, Scalar d)
    {
        return from_accumulators({a / 2, b / 4}, {c / 2, d / 2});
    }

    mat2_type A() const
    {
        mat2_type m;
        m << a, -b / 2,
             -b / 2, -a;
        return m;
    }

    vec2_type e() const { return vec2_type(c, -d); }

    // Largest eigenvalue of the traceless symmetric A.
    Scalar lambda_max() const { return std::sqrt(a * a + b * b / 4); }

    // a(u1^2 - u2^2) - b u1 u2 + c u1 - d u2
    Scalar value(const vec2_type& v) const
    {
        return a * (v[0] * v[0] - v[1] * v[1]) - b * v[0] * v[1] + c * v[0] - d * v[1];
    }
};

namespace detail {

// Products written out on real parts; std::complex operator* carries
// NaN/Inf recovery branches that dominate the O(N^2) loops.
template <class Scalar>
inline complex_t<Scalar> mul_conj(const complex_t<Scalar>& x, const complex_t<Scalar>& y)
{
    return { x.real() * y.real() + x.imag() * y.imag(),
             x.imag() * y.real() - x.real() * y.imag() };
}

template <class Scalar>
inline complex_t<Scalar> conj_mul_conj(const complex_t<Scalar>& x, const complex_t<Scalar>& y)
{
    return { x.real() * y.real() - x.imag() * y.imag(),
             -(x.real() * y.imag() + x.imag() * y.real()) };
}

/*
 * Move the excluded block from `from` to `to`: put back every product that
 * involves y[from] and take out every product that involves y[to]. The one
 * product touching both blocks is added and removed in the same call, so it
 * stays excluded.
 */
template <class Scalar>
inline void transfer(ConstantsState<Scalar>& state, Eigen::Index from, Eigen::Index to)
{
    using complex_type = complex_t<Scalar>;
    const Eigen::Index n = state.length();
    const complex_type* s = state.s.data();
    complex_type* c = state.c.data();
    const Eigen::Index pf = state.offset() + from;
    const Eigen::Index pt = state.offset() + to;
    const complex_type yf = s[pf];
    const complex_type yt = s[pt];

    // s has N-2 leading zeros, so pf - k and pt - k only go negative at k = N-1.
    const Eigen::Index kmax = n - 1;
    for (Eigen::Index k = 1; k <= kmax; ++k) {
        const complex_type sf_lo = (pf - k >= 0) ? s[pf - k] : complex_type(0, 0);
        const complex_type st_lo = (pt - k >= 0) ? s[pt - k] : complex_type(0, 0);
        const complex_type add = mul_conj(yf, sf_lo) + mul_conj(s[pf + k], yf);
        const complex_type sub = mul_conj(yt, st_lo) + mul_conj(s[pt + k], yt);
        c[k - 1] += add - sub;
    }
}

} // namespace detail

/*
 * Constants for block 0 from precomputed autocorrelation lags of y.
 */
template <class Scalar>
inline ConstantsState<Scalar> constants_init(
    const UnimodularSequence<Scalar>& y,
    const AutocorrelationProfile<Scalar>& profile
)
{
    const auto n = y.size();
    if (profile.lags.size() != n) {
        throw std::invalid_argument("constants_init: lag count does not match sequence length");
    }
    ConstantsState<Scalar> st;
    st.block = 0;
    st.s = cvec_t<Scalar>::Zero(3 * n - 2);
    st.s.segment(n - 2, n) = y.entries();
    st.c.resize(n - 1);
    for (Eigen::Index k = 1; k < n; ++k) {
        st.c[k - 1] = profile.lags[k] - detail::mul_conj(y[k], y[0]);
    }
    return st;
}

template <class Scalar>
inline ConstantsState<Scalar> constants_init(const UnimodularSequence<Scalar>& y)
{
    return constants_init(y, autocorrelation_fft(y));
}

/*
 * Advance the state from block i-1 to block i. s must already hold the
 * updated y[i-1]; y[i] still holds its pre-update value.
 */
template <class Scalar>
inline void constants_step(ConstantsState<Scalar>& state)
{
    if (state.block + 1 >= state.length()) {
        throw std::out_of_range("constants_step: already at the last block");
    }
    detail::transfer(state, state.block, state.block + 1);
    ++state.block;
}

/*
 * Return from the last block to block 0 without a fresh FFT.
 */
template <class Scalar>
inline void constants_wrap(ConstantsState<Scalar>& state)
{
    if (state.block != state.length() - 1) {
        throw std::out_of_range("constants_wrap: state is not at the last block");
    }
    detail::transfer(state, state.block, Eigen::Index(0));
    state.block = 0;
}

/*
 * Coefficients of f_i for i = state.block.
 *
 * Lag k has an m-term y_i conj(y[i-k]) iff k <= i and an n-term
 * y[i+k] conj(y_i) iff k <= N-1-i. Both present contributes to alpha.
 */
template <class Scalar>
inline BlockQuadratic<Scalar> block_coefficients(const ConstantsState<Scalar>& state)
{
    using complex_type = complex_t<Scalar>;
    const Eigen::Index n = state.length();
    const Eigen::Index i = state.block;
    const Eigen::Index pos = state.offset() + i;
    const complex_type* s = state.s.data();
    const complex_type* c = state.c.data();

    const Eigen::Index left = i;
    const Eigen::Index right = n - 1 - i;
    const Eigen::Index both = std::min(left, right);

    complex_type alpha(0, 0);
    complex_type beta(0, 0);
    for (Eigen::Index k = 1; k <= both; ++k) {
        alpha += detail::conj_mul_conj(s[pos - k], s[pos + k]);
    }
    for (Eigen::Index k = 1; k <= left; ++k) {
        beta += detail::conj_mul_conj(s[pos - k], c[k - 1]);
    }
    for (Eigen::Index k = 1; k <= right; ++k) {
        beta += detail::mul_conj(c[k - 1], s[pos + k]);
    }
    return BlockQuadratic<Scalar>::from_accumulators(alpha, beta);
}

/*
 * One MM step on v^T A v + e^T v over the unit circle.
 *
 * v^T A v is majorized at v_t by lambda_max(A) |v|^2 + 2 v^T (A - lambda I) v_t
 * + const; the minimizer of the surrogate is z / |z| with
 * z = -[(A - lambda I) v_t + e / 2]. When z = 0, v_t is returned.
 */
template <class Scalar>
inline Eigen::Matrix<Scalar, 2, 1> mm_step(
    const BlockQuadratic<Scalar>& q,
    const Eigen::Matrix<Scalar, 2, 1>& v_t
)
{
    using vec2_type = Eigen::Matrix<Scalar, 2, 1>;
    const Scalar lambda = q.lambda_max();
    const vec2_type shifted(
        (q.a - lambda) * v_t[0] - q.b / 2 * v_t[1],
        -q.b / 2 * v_t[0] + (-q.a - lambda) * v_t[1]
    );
    const vec2_type z = -(shifted + q.e() / 2);
    const Scalar norm = z.norm();
    if (!(norm > Scalar(0))) return v_t;
    return z / norm;
}

/*
 * Update blocks 0..N-1 in order, one MM step each. `state` must be at
 * block 0 of y; on return it is at block N-1 of the updated y.
 */
template <class Scalar>
inline void sweep(UnimodularSequence<Scalar>& y, ConstantsState<Scalar>& state)
{
    using vec2_type = Eigen::Matrix<Scalar, 2, 1>;
    const Eigen::Index n = y.size();
    if (state.length() != n || state.block != 0) {
        throw std::invalid_argument("sweep: constants state is not at block 0 of this sequence");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto q = block_coefficients(state);
        const vec2_type v = mm_step(q, vec2_type(y[i].real(), y[i].imag()));
        y.set(i, complex_t<Scalar>(v[0], v[1]));
        state.assign(i, y[i]);
        if (i + 1 < n) constants_step(state);
    }
}

/*
 * Sweep until the relative ISL change of one sweep falls to cfg.tolerance
 * or cfg.max_iterations sweeps have run.
 */
template <class Scalar>
inline RunResult<Scalar> run(UnimodularSequence<Scalar> y, const RunConfig& cfg = {})
{
    ::uniseq::detail::Stopwatch clock;
    RunTrace trace;
    auto record = [&](std::size_t t, const AutocorrelationProfile<Scalar>& p) {
        TraceRecord r;
        r.iter = t;
        r.isl = double(p.isl);
        if (cfg.record_psl) r.psl = double(p.psl);
        r.elapsed_ms = t == 0 ? 0.0 : clock.elapsed_ms();
        trace.records.push_back(r);
    };

    auto profile = autocorrelation_fft(y);
    record(0, profile);
    auto state = constants_init(y, profile);

    for (std::size_t t = 1; t <= cfg.max_iterations; ++t) {
        sweep(y, state);
        const Scalar previous = profile.isl;
        profile = autocorrelation_fft(y);
        record(t, profile);
        if (relative_change_below(double(previous), double(profile.isl), cfg.tolerance)) {
            trace.termination = Termination::converged;
            break;
        }
        if (cfg.refresh_each_sweep) {
            state = constants_init(y, profile);
        } else {
            constants_wrap(state);
        }
    }
    return { std::move(y), std::move(trace) };
}

} // namespace fbmm
} // namespace uniseq
