#include <uniseq/harness.hpp>
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 2;
constexpr int exit_runtime = 3;

std::vector<Eigen::Index> parse_lengths(const std::string& text)
{
    std::vector<Eigen::Index> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size() || v < 2) {
            throw uniseq::harness::SpecError("invalid length '" + item + "'");
        }
        out.push_back(Eigen::Index(v));
    }
    if (out.empty()) throw uniseq::harness::SpecError("no lengths given");
    return out;
}

std::vector<uniseq::harness::Algorithm> parse_algorithms(const std::string& text)
{
    std::vector<uniseq::harness::Algorithm> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(uniseq::harness::parse_algorithm(item));
    }
    if (out.empty()) throw uniseq::harness::SpecError("no algorithms given");
    return out;
}

std::ofstream open_or_throw(const std::string& path)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    return os;
}

} // namespace

int main(int argc, char** argv)
{
    using namespace uniseq::harness;

    CLI::App app{"Unimodular sequence design by ISL minimization (FBMM, MISL, CAN)"};
    app.require_subcommand(1);

    // design
    auto* design = app.add_subcommand("design", "Run one algorithm and write trace, summary and dumps");
    std::string algo = "fbmm", init = "random";
    long long n = 100;
    std::uint64_t seed = 0;
    double tol = 1e-5;
    std::size_t max_iter = 100000, runs = 1, jobs = 1;
    std::string trace_path, summary_path, autocorr_path, sequence_path;
    bool normalize_db = false, no_timing = false;
    design->add_option("--algo", algo, "fbmm | misl | can")->check(CLI::IsMember({"fbmm", "misl", "can"}));
    design->add_option("--n", n, "Sequence length")->required();
    design->add_option("--init", init, "random | golomb | frank")->check(CLI::IsMember({"random", "golomb", "frank"}));
    design->add_option("--seed", seed, "Seed of the random initializer");
    design->add_option("--tol", tol, "Relative ISL-change stopping tolerance")->capture_default_str();
    design->add_option("--max-iter", max_iter, "Maximum outer iterations")->capture_default_str();
    design->add_option("--trace", trace_path, "Trace CSV (iter,isl,psl,elapsed_ms)");
    design->add_option("--summary", summary_path, "JSON summary");
    design->add_option("--dump-autocorr", autocorr_path, "Autocorrelation CSV (lag,magnitude_db)");
    design->add_option("--dump-sequence", sequence_path, "Final sequence CSV (index,real,imag)");
    design->add_option("--runs", runs, "Monte-Carlo runs")->capture_default_str();
    design->add_option("--jobs", jobs, "Runs executed concurrently")->capture_default_str();
    design->add_flag("--normalize-db", normalize_db, "Autocorrelation dump as 20 log10(|r(k)|/N)");
    design->add_flag("--no-timing", no_timing, "Write elapsed_ms as 0 for reproducible traces");

    // bench
    auto* bench = app.add_subcommand("bench", "Average wall time against sequence length");
    std::string lengths = "50,100,200,300,400,500", algos = "fbmm,misl,can", bench_out;
    std::size_t bench_runs = 30;
    std::uint64_t bench_seed = 0;
    double bench_tol = 1e-5;
    std::size_t bench_max_iter = 100000;
    bench->add_option("--lengths", lengths, "Comma-separated ascending lengths")->capture_default_str();
    bench->add_option("--runs", bench_runs, "Random initializations per length")->capture_default_str();
    bench->add_option("--algos", algos, "Comma-separated algorithms")->capture_default_str();
    bench->add_option("--seed", bench_seed, "Base seed");
    bench->add_option("--tol", bench_tol, "Stopping tolerance")->capture_default_str();
    bench->add_option("--max-iter", bench_max_iter, "Maximum outer iterations")->capture_default_str();
    bench->add_option("--out", bench_out, "Output CSV")->required();

    // compare
    auto* cmp = app.add_subcommand("compare", "Run all three algorithms from one random initial sequence");
    long long cmp_n = 100;
    std::uint64_t cmp_seed = 0;
    double cmp_tol = 1e-5;
    std::size_t cmp_max_iter = 100000;
    std::string cmp_out;
    cmp->add_option("--n", cmp_n, "Sequence length")->required();
    cmp->add_option("--seed", cmp_seed, "Seed of the random initializer");
    cmp->add_option("--tol", cmp_tol, "Stopping tolerance")->capture_default_str();
    cmp->add_option("--max-iter", cmp_max_iter, "Maximum outer iterations")->capture_default_str();
    cmp->add_option("--out", cmp_out, "Combined CSV (algorithm,iter,isl,psl,elapsed_ms)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (*design) {
            ExperimentSpec spec;
            spec.algorithm = parse_algorithm(algo);
            spec.n = Eigen::Index(n);
            spec.init = parse_init(init);
            spec.seed = seed;
            spec.tolerance = tol;
            spec.max_iterations = max_iter;
            spec.runs = runs;
            spec.jobs = jobs;
            spec.normalize_db = normalize_db;
            spec.record_timing = !no_timing;
            spec.trace_path = trace_path;
            spec.summary_path = summary_path;
            spec.autocorr_path = autocorr_path;
            spec.sequence_path = sequence_path;
            const auto summaries = run_experiment(spec);
            if (summary_path.empty()) {
                std::cout << (summaries.size() == 1 ? summary_json(summaries.front()) : summary_json(summaries)) << '\n';
            }
        } else if (*bench) {
            uniseq::RunConfig cfg;
            cfg.tolerance = bench_tol;
            cfg.max_iterations = bench_max_iter;
            cfg.record_psl = false;
            if (!(bench_tol > 0)) throw SpecError("tolerance must be positive");
            const auto rows = benchmark_scaling(parse_lengths(lengths), bench_runs, parse_algorithms(algos), cfg, bench_seed);
            auto os = open_or_throw(bench_out);
            write_bench_csv(os, rows);
            if (!os) throw std::runtime_error("write failed: " + bench_out);
        } else if (*cmp) {
            if (cmp_n < 2) throw SpecError("N must be at least 2");
            if (!(cmp_tol > 0)) throw SpecError("tolerance must be positive");
            uniseq::RunConfig cfg;
            cfg.tolerance = cmp_tol;
            cfg.max_iterations = cmp_max_iter;
            auto os = open_or_throw(cmp_out);
            const auto summaries = compare(Eigen::Index(cmp_n), cmp_seed, cfg, os);
            if (!os) throw std::runtime_error("write failed: " + cmp_out);
            std::cout << summary_json(summaries) << '\n';
        }
    } catch (const SpecError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_runtime;
    }
    return exit_ok;
}
