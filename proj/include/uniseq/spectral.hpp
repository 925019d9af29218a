#pragma once
#include <uniseq/core.hpp>
#include <unsupported/Eigen/FFT>
#include <stdexcept>

namespace uniseq {

/*
 * 2N-point transform helpers on the grid w_f = 2*pi*f / (2N), f = 0..2N-1.
 *
 * forward_2N(y)      : u_f = sum_i y_i exp(-j w_f i)            (P^H y, unscaled)
 * inverse_first_N(x) : g_i = sum_f x_f exp(+j w_f i), i < N     (P x, unscaled)
 *
 * Neither direction applies a 1/(2N) factor. Callers that need the
 * autocorrelation rescale explicitly; callers that only take arguments of
 * the result are scale-invariant.
 */

namespace detail {

// One plan cache per thread; Eigen::FFT keeps twiddles keyed by size.
template <class Scalar>
inline Eigen::FFT<Scalar>& fft_engine()
{
    thread_local Eigen::FFT<Scalar> engine = [] {
        Eigen::FFT<Scalar> f;
        f.SetFlag(Eigen::FFT<Scalar>::Unscaled);
        return f;
    }();
    return engine;
}

} // namespace detail

/*
 * Size of the frequency grid used for a length-n sequence.
 */
inline Eigen::Index spectrum_size(Eigen::Index n) { return 2 * n; }

template <class Derived>
inline auto forward_2N(const Eigen::MatrixBase<Derived>& y)
{
    using value_t = typename Derived::Scalar::value_type;
    const auto n = y.size();
    if (n < 1) throw std::invalid_argument("forward_2N: empty input");
    cvec_t<value_t> padded = cvec_t<value_t>::Zero(spectrum_size(n));
    padded.head(n) = y;
    cvec_t<value_t> u(padded.size());
    detail::fft_engine<value_t>().fwd(u, padded);
    return u;
}

template <class Scalar>
inline cvec_t<Scalar> forward_2N(const UnimodularSequence<Scalar>& y)
{
    return forward_2N(y.entries());
}

/*
 * Full unscaled inverse transform of a length-2N vector.
 */
template <class Derived>
inline auto inverse_2N(const Eigen::MatrixBase<Derived>& x)
{
    using value_t = typename Derived::Scalar::value_type;
    if (x.size() < 2 || x.size() % 2 != 0) {
        throw std::invalid_argument("inverse transform: length must be a positive even number");
    }
    cvec_t<value_t> src = x;
    cvec_t<value_t> g(src.size());
    detail::fft_engine<value_t>().inv(g, src);
    return g;
}

template <class Derived>
inline auto inverse_first_N(const Eigen::MatrixBase<Derived>& x)
{
    using value_t = typename Derived::Scalar::value_type;
    cvec_t<value_t> g = inverse_2N(x);
    return cvec_t<value_t>(g.head(x.size() / 2));
}

/*
 * Autocorrelation lags from the 2N-point spectrum u of a length-n sequence.
 * Lags are the first n samples of IFFT(|u|^2) / (2n).
 */
template <class Scalar>
inline AutocorrelationProfile<Scalar> profile_from_spectrum(const cvec_t<Scalar>& u)
{
    const auto m = u.size();
    cvec_t<Scalar> power(m);
    for (Eigen::Index f = 0; f < m; ++f) power[f] = complex_t<Scalar>(std::norm(u[f]), 0);
    cvec_t<Scalar> lags = inverse_first_N(power);
    lags /= Scalar(m);
    return AutocorrelationProfile<Scalar>::from_lags(std::move(lags));
}

template <class Scalar>
inline AutocorrelationProfile<Scalar> autocorrelation_fft(const UnimodularSequence<Scalar>& y)
{
    return profile_from_spectrum<Scalar>(forward_2N(y));
}

/*
 * (1/4N) * sum_f (|u_f|^2 - N)^2 for a 2N-point spectrum u.
 */
template <class Scalar>
inline Scalar isl_from_spectrum(const cvec_t<Scalar>& u)
{
    const auto m = u.size();
    const Scalar n = Scalar(m / 2);
    Scalar acc = 0;
    for (Eigen::Index f = 0; f < m; ++f) {
        const Scalar d = std::norm(u[f]) - n;
        acc += d * d;
    }
    return acc / (Scalar(4) * n);
}

template <class Scalar>
inline Scalar isl_frequency(const UnimodularSequence<Scalar>& y)
{
    return isl_from_spectrum<Scalar>(forward_2N(y));
}

} // namespace uniseq
