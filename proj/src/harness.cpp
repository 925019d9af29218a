#include <uniseq/harness.hpp>
#include <uniseq/baselines.hpp>
#include <uniseq/fbmm.hpp>
#include <uniseq/spectral.hpp>
#include <json.hpp>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace uniseq {
namespace harness {
namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::string fmt_double(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::ofstream open_output(const std::filesystem::path& path)
{
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return os;
}

void finish(std::ofstream& os, const std::filesystem::path& path)
{
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

nlohmann::ordered_json to_json(const RunSummary& s)
{
    nlohmann::ordered_json j;
    j["algorithm"] = std::string(to_string(s.algorithm));
    j["n"] = s.n;
    j["init"] = std::string(to_string(s.init));
    j["seed"] = s.seed;
    j["final_isl"] = s.final_isl;
    j["final_psl"] = s.final_psl;
    j["iterations"] = s.iterations;
    j["elapsed_ms"] = s.elapsed_ms;
    j["terminated"] = std::string(to_string(s.terminated));
    return j;
}

RunSummary summarize(Algorithm a, InitKind init, std::uint64_t seed, const RunResult<double>& res)
{
    RunSummary s;
    s.algorithm = a;
    s.n = res.sequence.size();
    s.init = init;
    s.seed = seed;
    // Final metrics from the returned sequence, independent of record_psl.
    const auto p = autocorrelation_fft(res.sequence);
    s.final_isl = p.isl;
    s.final_psl = p.psl;
    s.iterations = res.trace.iterations();
    s.elapsed_ms = res.trace.elapsed_ms();
    s.terminated = res.trace.termination;
    return s;
}

} // namespace

Sequence init_random(Eigen::Index n, std::uint64_t seed)
{
    if (n < 2) throw SpecError("sequence length must be at least 2");
    std::mt19937_64 gen(seed);
    cvec y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double theta = double(gen() >> 11) * 0x1.0p-53;
        y[i] = std::polar(1.0, two_pi * theta);
    }
    return Sequence(std::move(y));
}

Sequence init_golomb(Eigen::Index n)
{
    if (n < 2) throw SpecError("sequence length must be at least 2");
    cvec y(n);
    for (Eigen::Index k = 1; k <= n; ++k) {
        // (k-1)k is even, so reduce modulo 2N before scaling to keep the phase small.
        const auto num = ((k - 1) * k) % (2 * n);
        y[k - 1] = std::polar(1.0, std::numbers::pi * double(num) / double(n));
    }
    return Sequence(std::move(y));
}

Sequence init_frank(Eigen::Index n)
{
    const auto l = Eigen::Index(std::llround(std::sqrt(double(n))));
    if (n < 4 || l * l != n) {
        throw SpecError("frank initializer: length " + std::to_string(n) + " is not a perfect square");
    }
    cvec y(n);
    for (Eigen::Index m = 0; m < l; ++m) {
        for (Eigen::Index p = 0; p < l; ++p) {
            y[m * l + p] = std::polar(1.0, two_pi * double((m * p) % l) / double(l));
        }
    }
    return Sequence(std::move(y));
}

std::string_view to_string(Algorithm a)
{
    switch (a) {
        case Algorithm::fbmm: return "fbmm";
        case Algorithm::misl: return "misl";
        case Algorithm::can: return "can";
    }
    return "?";
}

std::string_view to_string(InitKind k)
{
    switch (k) {
        case InitKind::random: return "random";
        case InitKind::golomb: return "golomb";
        case InitKind::frank: return "frank";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view s)
{
    if (s == "fbmm") return Algorithm::fbmm;
    if (s == "misl") return Algorithm::misl;
    if (s == "can") return Algorithm::can;
    throw SpecError("unknown algorithm '" + std::string(s) + "'");
}

InitKind parse_init(std::string_view s)
{
    if (s == "random") return InitKind::random;
    if (s == "golomb") return InitKind::golomb;
    if (s == "frank") return InitKind::frank;
    throw SpecError("unknown initializer '" + std::string(s) + "'");
}

void validate(const ExperimentSpec& spec)
{
    if (spec.n < 2) throw SpecError("N must be at least 2");
    if (spec.runs < 1) throw SpecError("runs must be at least 1");
    if (spec.jobs < 1) throw SpecError("jobs must be at least 1");
    if (!(spec.tolerance > 0)) throw SpecError("tolerance must be positive");
    if (spec.init == InitKind::frank) {
        const auto l = Eigen::Index(std::llround(std::sqrt(double(spec.n))));
        if (l * l != spec.n) {
            throw SpecError("frank initializer: length " + std::to_string(spec.n) + " is not a perfect square");
        }
    }
}

Sequence make_initial(InitKind init, Eigen::Index n, std::uint64_t seed)
{
    switch (init) {
        case InitKind::random: return init_random(n, seed);
        case InitKind::golomb: return init_golomb(n);
        case InitKind::frank: return init_frank(n);
    }
    throw SpecError("unknown initializer");
}

RunResult<double> run_algorithm(Algorithm algorithm, Sequence y0, const RunConfig& cfg)
{
    switch (algorithm) {
        case Algorithm::fbmm: return fbmm::run(std::move(y0), cfg);
        case Algorithm::misl: return baselines::run(baselines::Kind::misl, std::move(y0), cfg);
        case Algorithm::can: return baselines::run(baselines::Kind::can, std::move(y0), cfg);
    }
    throw SpecError("unknown algorithm");
}

std::filesystem::path per_run_path(const std::filesystem::path& base, std::size_t run, std::size_t runs)
{
    if (runs <= 1 || base.empty()) return base;
    auto p = base;
    p.replace_filename(base.stem().string() + ".run" + std::to_string(run) + base.extension().string());
    return p;
}

std::vector<RunSummary> run_experiment(const ExperimentSpec& spec)
{
    validate(spec);
    RunConfig cfg;
    cfg.tolerance = spec.tolerance;
    cfg.max_iterations = spec.max_iterations;

    std::vector<RunSummary> summaries(spec.runs);
    std::vector<std::exception_ptr> errors(spec.runs);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t r = next++; r < spec.runs; r = next++) {
            try {
                const auto seed = spec.init == InitKind::random ? run_seed(spec.seed, r) : spec.seed;
                const auto res = run_algorithm(spec.algorithm, make_initial(spec.init, spec.n, seed), cfg);
                summaries[r] = summarize(spec.algorithm, spec.init, seed, res);

                if (!spec.trace_path.empty()) {
                    const auto path = per_run_path(spec.trace_path, r, spec.runs);
                    auto os = open_output(path);
                    write_trace_csv(os, res.trace, spec.record_timing);
                    finish(os, path);
                }
                if (!spec.autocorr_path.empty()) {
                    const auto path = per_run_path(spec.autocorr_path, r, spec.runs);
                    auto os = open_output(path);
                    write_autocorr_csv(os, autocorrelation_fft(res.sequence), spec.normalize_db);
                    finish(os, path);
                }
                if (!spec.sequence_path.empty()) {
                    const auto path = per_run_path(spec.sequence_path, r, spec.runs);
                    auto os = open_output(path);
                    write_sequence_csv(os, res.sequence);
                    finish(os, path);
                }
            } catch (...) {
                errors[r] = std::current_exception();
            }
        }
    };

    const auto nthreads = std::min(spec.jobs, spec.runs);
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    if (!spec.summary_path.empty()) {
        auto os = open_output(spec.summary_path);
        os << (spec.runs == 1 ? summary_json(summaries.front()) : summary_json(summaries)) << '\n';
        finish(os, spec.summary_path);
    }
    return summaries;
}

void write_trace_csv(std::ostream& os, const RunTrace& trace, bool record_timing)
{
    os << "iter,isl,psl,elapsed_ms\n";
    for (const auto& r : trace.records) {
        os << r.iter << ',' << fmt_double(r.isl) << ',' << fmt_double(r.psl) << ','
           << fmt_double(record_timing ? r.elapsed_ms : 0.0) << '\n';
    }
}

void write_autocorr_csv(std::ostream& os, const Profile& profile, bool normalize_db)
{
    const double n = double(profile.lags.size());
    os << "lag,magnitude_db\n";
    for (Eigen::Index k = 0; k < profile.lags.size(); ++k) {
        double mag = std::abs(profile.lags[k]);
        if (normalize_db) mag /= n;
        os << k << ',' << fmt_double(20.0 * std::log10(mag)) << '\n';
    }
}

void write_sequence_csv(std::ostream& os, const Sequence& y)
{
    os << "index,real,imag\n";
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        os << i << ',' << fmt_double(y[i].real()) << ',' << fmt_double(y[i].imag()) << '\n';
    }
}

std::string summary_json(const RunSummary& s)
{
    return to_json(s).dump(2);
}

std::string summary_json(const std::vector<RunSummary>& runs)
{
    nlohmann::ordered_json j;
    j["runs"] = nlohmann::ordered_json::array();
    double isl = 0, ms = 0, iters = 0;
    for (const auto& s : runs) {
        j["runs"].push_back(to_json(s));
        isl += s.final_isl;
        ms += s.elapsed_ms;
        iters += double(s.iterations);
    }
    const double m = runs.empty() ? 1.0 : double(runs.size());
    j["mean_final_isl"] = isl / m;
    j["mean_elapsed_ms"] = ms / m;
    j["mean_iterations"] = iters / m;
    return j.dump(2);
}

std::vector<RunSummary> compare(Eigen::Index n, std::uint64_t seed, const RunConfig& cfg, std::ostream& csv)
{
    const auto y0 = init_random(n, seed);
    std::vector<RunSummary> out;
    csv << "algorithm,iter,isl,psl,elapsed_ms\n";
    for (auto a : { Algorithm::fbmm, Algorithm::misl, Algorithm::can }) {
        const auto res = run_algorithm(a, y0, cfg);
        for (const auto& r : res.trace.records) {
            csv << to_string(a) << ',' << r.iter << ',' << fmt_double(r.isl) << ','
                << fmt_double(r.psl) << ',' << fmt_double(r.elapsed_ms) << '\n';
        }
        out.push_back(summarize(a, InitKind::random, seed, res));
    }
    return out;
}

std::vector<BenchRow> benchmark_scaling(
    const std::vector<Eigen::Index>& lengths,
    std::size_t runs,
    const std::vector<Algorithm>& algorithms,
    const RunConfig& cfg,
    std::uint64_t seed
)
{
    if (runs < 1) throw SpecError("runs must be at least 1");
    if (!std::is_sorted(lengths.begin(), lengths.end())) throw SpecError("lengths must be sorted ascending");
    std::vector<BenchRow> rows;
    for (const auto n : lengths) {
        std::vector<BenchRow> per_algo(algorithms.size());
        for (std::size_t r = 0; r < runs; ++r) {
            const auto y0 = init_random(n, run_seed(seed, r));
            for (std::size_t a = 0; a < algorithms.size(); ++a) {
                const auto res = run_algorithm(algorithms[a], y0, cfg);
                const double total = res.trace.elapsed_ms();
                const double iters = double(std::max<std::size_t>(1, res.trace.iterations()));
                per_algo[a].avg_total_ms += total;
                per_algo[a].avg_sweep_ms += total / iters;
                per_algo[a].avg_iterations += double(res.trace.iterations());
            }
        }
        for (std::size_t a = 0; a < algorithms.size(); ++a) {
            auto row = per_algo[a];
            row.algorithm = algorithms[a];
            row.n = n;
            row.avg_total_ms /= double(runs);
            row.avg_sweep_ms /= double(runs);
            row.avg_iterations /= double(runs);
            rows.push_back(row);
        }
    }
    return rows;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows)
{
    os << "algorithm,N,avg_sweep_ms,avg_total_ms,avg_iterations\n";
    for (const auto& r : rows) {
        os << to_string(r.algorithm) << ',' << r.n << ',' << fmt_double(r.avg_sweep_ms) << ','
           << fmt_double(r.avg_total_ms) << ',' << fmt_double(r.avg_iterations) << '\n';
    }
}

double time_fbmm_iteration(Eigen::Index n, std::uint64_t seed, std::size_t repetitions)
{
    auto y = init_random(n, seed);
    std::vector<double> samples;
    samples.reserve(repetitions);
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
        ::uniseq::detail::Stopwatch clock;
        const auto profile = autocorrelation_fft(y);
        auto state = fbmm::constants_init(y, profile);
        fbmm::sweep(y, state);
        samples.push_back(clock.elapsed_ms());
    }
    std::nth_element(samples.begin(), samples.begin() + samples.size() / 2, samples.end());
    return samples[samples.size() / 2];
}

double loglog_slope(const std::vector<double>& n, const std::vector<double>& time)
{
    if (n.size() != time.size() || n.size() < 2) throw std::invalid_argument("loglog_slope: need two or more points");
    const std::size_t m = n.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double x = std::log(n[i]);
        const double y = std::log(time[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    return (double(m) * sxy - sx * sy) / (double(m) * sxx - sx * sx);
}

} // namespace harness
} // namespace uniseq
