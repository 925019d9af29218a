#pragma once
#include <uniseq/core.hpp>
#include <uniseq/run.hpp>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace uniseq {
namespace harness {

// ---------------------------------------------------------------------
// Initializers
// ---------------------------------------------------------------------

/*
 * Random phases e^{j 2 pi theta_i}, theta_i uniform on [0, 1).
 *
 * Generator: std::mt19937_64 seeded with `seed`; theta_i takes the top
 * 53 bits of the i-th draw, so the stream is identical on every platform.
 */
Sequence init_random(Eigen::Index n, std::uint64_t seed);

// y_n = exp(j pi (n-1) n / N), n = 1..N
Sequence init_golomb(Eigen::Index n);

// y_{(m-1)L+p} = exp(j 2 pi (m-1)(p-1) / L), N = L^2. Throws if N is not a perfect square.
Sequence init_frank(Eigen::Index n);

// Seed of Monte-Carlo run r: seed XOR r.
inline std::uint64_t run_seed(std::uint64_t seed, std::uint64_t run) { return seed ^ run; }

// ---------------------------------------------------------------------
// Experiment description
// ---------------------------------------------------------------------

enum class Algorithm
{
    fbmm,
    misl,
    can,
};

enum class InitKind
{
    random,
    golomb,
    frank,
};

std::string_view to_string(Algorithm a);
std::string_view to_string(InitKind k);
Algorithm parse_algorithm(std::string_view s);
InitKind parse_init(std::string_view s);

// Thrown for a malformed experiment description; the CLI maps it to exit 2.
class SpecError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

struct ExperimentSpec
{
    Algorithm algorithm = Algorithm::fbmm;
    Eigen::Index n = 100;
    InitKind init = InitKind::random;
    std::uint64_t seed = 0;
    double tolerance = 1e-5;
    std::size_t max_iterations = 100000;
    std::size_t runs = 1;
    std::size_t jobs = 1;
    bool normalize_db = false;
    // Write elapsed_ms as 0 so trace files are byte-reproducible.
    bool record_timing = true;

    std::filesystem::path trace_path;
    std::filesystem::path summary_path;
    std::filesystem::path autocorr_path;
    std::filesystem::path sequence_path;
};

void validate(const ExperimentSpec& spec);

Sequence make_initial(InitKind init, Eigen::Index n, std::uint64_t seed);

RunResult<double> run_algorithm(Algorithm algorithm, Sequence y0, const RunConfig& cfg);

struct RunSummary
{
    Algorithm algorithm = Algorithm::fbmm;
    Eigen::Index n = 0;
    InitKind init = InitKind::random;
    std::uint64_t seed = 0;
    double final_isl = 0;
    double final_psl = 0;
    std::size_t iterations = 0;
    double elapsed_ms = 0;
    Termination terminated = Termination::max_iterations;
};

/*
 * Run spec.runs independent runs (random init: seed run_seed(seed, r)) and
 * write the requested files. With runs > 1 every per-run file gets a
 * ".run<r>" suffix before its extension and the summary holds one object
 * per run. Throws SpecError on an invalid spec and std::runtime_error on
 * I/O failure.
 */
std::vector<RunSummary> run_experiment(const ExperimentSpec& spec);

// ---------------------------------------------------------------------
// Output formats
// ---------------------------------------------------------------------

// Header: iter,isl,psl,elapsed_ms
void write_trace_csv(std::ostream& os, const RunTrace& trace, bool record_timing = true);

// Header: lag,magnitude_db with 20 log10 |r(k)| (or |r(k)|/N when normalized).
void write_autocorr_csv(std::ostream& os, const Profile& profile, bool normalize_db = false);

// Header: index,real,imag
void write_sequence_csv(std::ostream& os, const Sequence& y);

std::string summary_json(const RunSummary& s);
std::string summary_json(const std::vector<RunSummary>& runs);

std::filesystem::path per_run_path(const std::filesystem::path& base, std::size_t run, std::size_t runs);

// ---------------------------------------------------------------------
// Comparison and scaling presets
// ---------------------------------------------------------------------

/*
 * Run fbmm, misl and can from one random initial sequence. The combined
 * CSV has header algorithm,iter,isl,psl,elapsed_ms; every algorithm's
 * time axis starts at 0.
 */
std::vector<RunSummary> compare(Eigen::Index n, std::uint64_t seed, const RunConfig& cfg, std::ostream& csv);

struct BenchRow
{
    Algorithm algorithm = Algorithm::fbmm;
    Eigen::Index n = 0;
    double avg_sweep_ms = 0;
    double avg_total_ms = 0;
    double avg_iterations = 0;
};

/*
 * For each length, `runs` random initial sequences (seed run_seed(seed, r))
 * shared by every algorithm. avg_sweep_ms is total time over iterations.
 */
std::vector<BenchRow> benchmark_scaling(
    const std::vector<Eigen::Index>& lengths,
    std::size_t runs,
    const std::vector<Algorithm>& algorithms,
    const RunConfig& cfg,
    std::uint64_t seed = 0
);

// Header: algorithm,N,avg_sweep_ms,avg_total_ms,avg_iterations
void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);

/*
 * Median wall time in ms of one FBMM outer iteration (constants refresh,
 * full sweep and ISL evaluation) at length n.
 */
double time_fbmm_iteration(Eigen::Index n, std::uint64_t seed, std::size_t repetitions);

// Least-squares slope of log(time) against log(n).
double loglog_slope(const std::vector<double>& n, const std::vector<double>& time);

} // namespace harness
} // namespace uniseq
