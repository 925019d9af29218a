#pragma once
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace uniseq {

template <class Scalar>
using complex_t = std::complex<Scalar>;

template <class Scalar>
using cvec_t = Eigen::Matrix<complex_t<Scalar>, Eigen::Dynamic, 1>;

template <class Scalar>
using rvec_t = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using cvec = cvec_t<double>;
using rvec = rvec_t<double>;

/// Absolute tolerance on |y_i| - 1 accepted by UnimodularSequence.
inline constexpr double unimodular_tol = 1e-12;

/*
 * Phase of z with arg(0) = 0.
 */
template <class Scalar>
inline Scalar safe_arg(const complex_t<Scalar>& z)
{
    if (z.real() == Scalar(0) && z.imag() == Scalar(0)) return Scalar(0);
    return std::arg(z);
}

/*
 * z / |z|, or 1 when |z| is zero or underflows.
 */
template <class Scalar>
inline complex_t<Scalar> unit_of(const complex_t<Scalar>& z)
{
    const Scalar m = std::abs(z);
    if (!(m > Scalar(0)) || !std::isfinite(Scalar(1) / m)) return complex_t<Scalar>(1, 0);
    return z / m;
}

/*
 * Constant-modulus complex sequence y of length N >= 2.
 *
 * Every entry satisfies | |y_i| - 1 | <= unimodular_tol. Mutation goes through
 * set(), which renormalizes the written value.
 */
template <class Scalar>
class UnimodularSequence
{
public:
    using value_t = Scalar;
    using complex_type = complex_t<Scalar>;
    using vec_type = cvec_t<Scalar>;

    explicit UnimodularSequence(vec_type entries)
        : entries_(std::move(entries))
    {
        if (entries_.size() < 2) {
            throw std::invalid_argument("sequence length must be at least 2");
        }
        for (Eigen::Index i = 0; i < entries_.size(); ++i) {
            const Scalar dev = std::abs(std::abs(entries_[i]) - Scalar(1));
            if (!(dev <= Scalar(unimodular_tol))) {
                throw std::invalid_argument(
                    "entry " + std::to_string(i) + " is not unit modulus"
                );
            }
        }
    }

    Eigen::Index size() const { return entries_.size(); }
    const vec_type& entries() const { return entries_; }
    const complex_type& operator[](Eigen::Index i) const { return entries_[i]; }

    void set(Eigen::Index i, const complex_type& value)
    {
        entries_[i] = unit_of<Scalar>(value);
    }

    friend bool operator==(const UnimodularSequence& a, const UnimodularSequence& b)
    {
        return a.entries_ == b.entries_;
    }

private:
    vec_type entries_;
};

using Sequence = UnimodularSequence<double>;

/*
 * Aperiodic autocorrelation lags r(0..N-1) with the derived sidelobe metrics.
 */
template <class Scalar>
struct AutocorrelationProfile
{
    cvec_t<Scalar> lags;
    Scalar isl = 0;
    Scalar psl = 0;

    static AutocorrelationProfile from_lags(cvec_t<Scalar> lags)
    {
        AutocorrelationProfile p;
        p.lags = std::move(lags);
        for (Eigen::Index k = 1; k < p.lags.size(); ++k) {
            const Scalar m2 = std::norm(p.lags[k]);
            p.isl += m2;
            p.psl = std::max(p.psl, std::sqrt(m2));
        }
        return p;
    }
};

using Profile = AutocorrelationProfile<double>;

/*
 * Project each entry onto the unit circle. Entries with modulus 0 (or
 * modulus too small to invert) map to 1.
 */
template <class Derived>
inline auto project_unimodular(const Eigen::MatrixBase<Derived>& z)
{
    using complex_type = typename Derived::Scalar;
    using value_t = typename complex_type::value_type;
    cvec_t<value_t> out(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        out[i] = unit_of<value_t>(z(i));
    }
    return UnimodularSequence<value_t>(std::move(out));
}

/*
 * O(N^2) reference: r(k) = sum_{i=k}^{N-1} y[i] * conj(y[i-k]).
 */
template <class Scalar>
inline AutocorrelationProfile<Scalar> autocorrelation_direct(const UnimodularSequence<Scalar>& y)
{
    const auto n = y.size();
    cvec_t<Scalar> lags(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        complex_t<Scalar> acc(0, 0);
        for (Eigen::Index i = k; i < n; ++i) {
            acc += y[i] * std::conj(y[i - k]);
        }
        lags[k] = acc;
    }
    return AutocorrelationProfile<Scalar>::from_lags(std::move(lags));
}

template <class Scalar>
inline Scalar isl(const UnimodularSequence<Scalar>& y)
{
    return autocorrelation_direct(y).isl;
}

template <class Scalar>
inline Scalar psl(const UnimodularSequence<Scalar>& y)
{
    return autocorrelation_direct(y).psl;
}

} // namespace uniseq
