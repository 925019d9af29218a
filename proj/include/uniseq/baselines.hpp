#pragma once
#include <uniseq/core.hpp>
#include <uniseq/run.hpp>
#include <uniseq/spectral.hpp>
#include <algorithm>
#include <stdexcept>
#include <string_view>

namespace uniseq {
namespace baselines {

enum class Kind
{
    can,
    misl,
};

inline std::string_view to_string(Kind k) { return k == Kind::can ? "can" : "misl"; }

namespace detail {

// e^{j arg(z)} with arg(0) = 0.
template <class Scalar>
inline complex_t<Scalar> phase_of(const complex_t<Scalar>& z)
{
    const Scalar m = std::abs(z);
    if (!(m > Scalar(0))) return complex_t<Scalar>(1, 0);
    return z / m;
}

template <class Scalar>
inline UnimodularSequence<Scalar> phases_of(const cvec_t<Scalar>& z)
{
    cvec_t<Scalar> out(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) out[i] = phase_of(z[i]);
    return UnimodularSequence<Scalar>(std::move(out));
}

/*
 * CAN update from the spectrum u of the current iterate.
 */
template <class Scalar>
inline UnimodularSequence<Scalar> can_from_spectrum(const cvec_t<Scalar>& u)
{
    cvec_t<Scalar> x(u.size());
    for (Eigen::Index f = 0; f < u.size(); ++f) x[f] = phase_of(u[f]);
    return phases_of<Scalar>(inverse_first_N(x));
}

/*
 * MISL update from the spectrum u of the current iterate:
 * z = -P (Diag(|u|^2) - u_max I - N^2 I) u.
 */
template <class Scalar>
inline UnimodularSequence<Scalar> misl_from_spectrum(const cvec_t<Scalar>& u)
{
    const Eigen::Index m = u.size();
    const Scalar n = Scalar(m / 2);
    rvec_t<Scalar> power(m);
    for (Eigen::Index f = 0; f < m; ++f) power[f] = std::norm(u[f]);
    const Scalar shift = power.maxCoeff() + n * n;
    cvec_t<Scalar> w(m);
    for (Eigen::Index f = 0; f < m; ++f) w[f] = (power[f] - shift) * u[f];
    cvec_t<Scalar> z = -inverse_first_N(w);
    return phases_of<Scalar>(z);
}

} // namespace detail

template <class Scalar>
inline UnimodularSequence<Scalar> can_iteration(const UnimodularSequence<Scalar>& y)
{
    return detail::can_from_spectrum<Scalar>(forward_2N(y));
}

template <class Scalar>
inline UnimodularSequence<Scalar> misl_iteration(const UnimodularSequence<Scalar>& y)
{
    return detail::misl_from_spectrum<Scalar>(forward_2N(y));
}

/*
 * Iterate CAN or MISL until the relative ISL change of one update falls to
 * cfg.tolerance or cfg.max_iterations updates have run. The spectrum taken
 * to score an iterate is reused for its update.
 */
template <class Scalar>
inline RunResult<Scalar> run(Kind kind, UnimodularSequence<Scalar> y, const RunConfig& cfg = {})
{
    ::uniseq::detail::Stopwatch clock;
    RunTrace trace;

    cvec_t<Scalar> u = forward_2N(y);
    auto score = [&](std::size_t t) {
        TraceRecord r;
        r.iter = t;
        if (cfg.record_psl) {
            const auto p = profile_from_spectrum<Scalar>(u);
            r.isl = double(p.isl);
            r.psl = double(p.psl);
        } else {
            r.isl = double(isl_from_spectrum<Scalar>(u));
        }
        r.elapsed_ms = t == 0 ? 0.0 : clock.elapsed_ms();
        trace.records.push_back(r);
        return r.isl;
    };

    double current = score(0);
    for (std::size_t t = 1; t <= cfg.max_iterations; ++t) {
        y = kind == Kind::can ? detail::can_from_spectrum<Scalar>(u)
                              : detail::misl_from_spectrum<Scalar>(u);
        u = forward_2N(y);
        const double previous = current;
        current = score(t);
        if (relative_change_below(previous, current, cfg.tolerance)) {
            trace.termination = Termination::converged;
            break;
        }
    }
    return { std::move(y), std::move(trace) };
}

} // namespace baselines
} // namespace uniseq
