#pragma once
#include <uniseq/core.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string_view>
#include <vector>

namespace uniseq {

struct RunConfig
{
    double tolerance = 1e-5;
    std::size_t max_iterations = 100000;
    bool record_psl = true;
    // FBMM only: rebuild block-1 constants from a fresh FFT at each sweep.
    bool refresh_each_sweep = true;
};

enum class Termination
{
    converged,
    max_iterations,
};

inline std::string_view to_string(Termination t)
{
    return t == Termination::converged ? "converged" : "max_iterations";
}

struct TraceRecord
{
    std::size_t iter = 0;
    double isl = 0;
    // NaN when RunConfig::record_psl is off.
    double psl = std::numeric_limits<double>::quiet_NaN();
    double elapsed_ms = 0;
};

/*
 * Per-iteration history. Row 0 is the initial point; row t is the state
 * after t outer iterations (sweeps for FBMM, update steps for CAN/MISL).
 */
struct RunTrace
{
    std::vector<TraceRecord> records;
    Termination termination = Termination::max_iterations;

    std::size_t iterations() const { return records.empty() ? 0 : records.back().iter; }
    double final_isl() const { return records.back().isl; }
    double final_psl() const { return records.back().psl; }
    double elapsed_ms() const { return records.back().elapsed_ms; }
};

/*
 * |ISL(t+1) - ISL(t)| / max(1, ISL(t)) <= tol
 */
inline bool relative_change_below(double previous, double current, double tol)
{
    return std::abs(current - previous) / std::max(1.0, previous) <= tol;
}

template <class Scalar>
struct RunResult
{
    UnimodularSequence<Scalar> sequence;
    RunTrace trace;
};

namespace detail {

class Stopwatch
{
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double elapsed_ms() const
    {
        return std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

} // namespace detail
} // namespace uniseq
