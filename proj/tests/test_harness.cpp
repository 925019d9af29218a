#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include "test_util.hpp"
#include <uniseq/harness.hpp>
#include <json.hpp>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace uniseq;
using namespace uniseq::harness;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name)
{
    auto dir = fs::temp_directory_path() / "uniseq_test_harness";
    fs::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("random initializer")
{
    CHECK(init_random(50, 3) == init_random(50, 3));
    CHECK(!(init_random(50, 3) == init_random(50, 4)));
    // Documented stream: top 53 bits of successive mt19937_64 draws.
    std::mt19937_64 gen(5489);
    const auto y = init_random(3, 5489);
    for (int i = 0; i < 3; ++i) {
        const double theta = double(gen() >> 11) * 0x1.0p-53;
        CHECK(std::abs(y[i] - std::polar(1.0, 2 * M_PI * theta)) < 1e-15);
    }

    double worst = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto z = init_random(1000, s);
        worst = std::max(worst, std::abs(z.entries().mean()));
    }
    CHECK(worst < 0.1);
    CHECK_THROWS_AS(init_random(1, 0), SpecError);
}

TEST_CASE("golomb initializer")
{
    const auto g2 = init_golomb(2);
    CHECK(std::abs(g2[0] - 1.0) < 1e-15);
    CHECK(std::abs(g2[1] + 1.0) < 1e-15);

    const auto g4 = init_golomb(4);
    const double phases[] = {0, M_PI / 2, 3 * M_PI / 2, M_PI};
    for (int i = 0; i < 4; ++i) CHECK(std::abs(g4[i] - std::polar(1.0, phases[i])) < 1e-15);

    const auto big = init_golomb(997);
    for (Eigen::Index i = 0; i < big.size(); ++i) CHECK(std::abs(std::abs(big[i]) - 1) < 1e-12);
}

TEST_CASE("frank initializer")
{
    const auto f = init_frank(4);
    const double expected[] = {1, 1, 1, -1};
    for (int i = 0; i < 4; ++i) CHECK(std::abs(f[i] - expected[i]) < 1e-15);
    CHECK(isl(f) == doctest::Approx(2.0));
    CHECK_THROWS_WITH_AS(init_frank(5), doctest::Contains("not a perfect square"), SpecError);
    CHECK_NOTHROW(init_frank(289));
}

TEST_CASE("parsing and validation")
{
    CHECK(parse_algorithm("misl") == Algorithm::misl);
    CHECK_THROWS_AS(parse_algorithm("isl-new"), SpecError);
    CHECK(parse_init("frank") == InitKind::frank);

    ExperimentSpec s;
    s.n = 1;
    CHECK_THROWS_AS(validate(s), SpecError);
    s.n = 10;
    s.tolerance = 0;
    CHECK_THROWS_AS(validate(s), SpecError);
    s.tolerance = 1e-5;
    s.runs = 0;
    CHECK_THROWS_AS(validate(s), SpecError);
    s.runs = 1;
    s.init = InitKind::frank;
    CHECK_THROWS_AS(validate(s), SpecError);
    s.n = 9;
    CHECK_NOTHROW(validate(s));
}

TEST_CASE("csv formats")
{
    RunTrace t;
    t.records.push_back({0, 5.0, 2.0, 0.0});
    t.records.push_back({1, 1.5, 1.0, 0.25});
    std::ostringstream os;
    write_trace_csv(os, t);
    CHECK(os.str() == "iter,isl,psl,elapsed_ms\n0,5,2,0\n1,1.5,1,0.25\n");

    std::ostringstream quiet;
    write_trace_csv(quiet, t, false);
    CHECK(quiet.str() == "iter,isl,psl,elapsed_ms\n0,5,2,0\n1,1.5,1,0\n");

    const auto p = autocorrelation_direct(test::seq({1.0, 1.0, -1.0}));
    std::ostringstream ac;
    write_autocorr_csv(ac, p);
    CHECK(ac.str().rfind("lag,magnitude_db\n0,", 0) == 0);
    CHECK(ac.str().find("\n1,-inf\n") != std::string::npos);
    CHECK(ac.str().find("\n2,0\n") != std::string::npos);

    std::ostringstream nd;
    write_autocorr_csv(nd, p, true);
    CHECK(nd.str().find("\n0,0\n") != std::string::npos);
}

TEST_CASE("per-run paths")
{
    CHECK(per_run_path("out/trace.csv", 3, 1) == fs::path("out/trace.csv"));
    CHECK(per_run_path("out/trace.csv", 3, 5) == fs::path("out/trace.run3.csv"));
}

TEST_CASE("run_experiment fbmm from golomb at N=3")
{
    ExperimentSpec s;
    s.algorithm = Algorithm::fbmm;
    s.n = 3;
    s.init = InitKind::golomb;
    s.summary_path = scratch("golomb3.json");
    s.trace_path = scratch("golomb3.csv");
    s.autocorr_path = scratch("golomb3_ac.csv");
    s.sequence_path = scratch("golomb3_seq.csv");
    run_experiment(s);
    const auto j = nlohmann::json::parse(slurp(s.summary_path));
    CHECK(j["algorithm"] == "fbmm");
    CHECK(j["n"] == 3);
    CHECK(j["init"] == "golomb");
    CHECK(j["final_isl"].get<double>() <= 1 + 1e-6);
    CHECK(j["terminated"] == "converged");
    for (auto key : {"seed", "final_psl", "iterations", "elapsed_ms"}) CHECK(j.contains(key));
    CHECK(slurp(s.trace_path).rfind("iter,isl,psl,elapsed_ms\n", 0) == 0);
    CHECK(slurp(s.sequence_path).rfind("index,real,imag\n", 0) == 0);
}

TEST_CASE("run_experiment misl N=2 and monte carlo fan-out")
{
    ExperimentSpec s;
    s.algorithm = Algorithm::misl;
    s.n = 2;
    s.seed = 7;
    s.trace_path = scratch("misl2.csv");
    const auto out = run_experiment(s);
    CHECK(out.front().final_isl == doctest::Approx(1.0));
    std::ifstream is(s.trace_path);
    int lines = 0;
    for (std::string line; std::getline(is, line);) ++lines;
    CHECK(lines - 1 <= 3);

    ExperimentSpec mc;
    mc.n = 20;
    mc.runs = 4;
    mc.jobs = 2;
    mc.seed = 100;
    mc.record_timing = false;
    mc.trace_path = scratch("mc.csv");
    mc.summary_path = scratch("mc.json");
    const auto runs = run_experiment(mc);
    REQUIRE(runs.size() == 4);
    for (std::size_t r = 0; r < 4; ++r) {
        CHECK(runs[r].seed == (100u ^ r));
        CHECK(fs::exists(scratch("mc.run" + std::to_string(r) + ".csv")));
    }
    const auto j = nlohmann::json::parse(slurp(mc.summary_path));
    CHECK(j["runs"].size() == 4);

    // Parallel and serial execution produce the same files.
    const auto first = slurp(scratch("mc.run2.csv"));
    mc.jobs = 1;
    run_experiment(mc);
    CHECK(slurp(scratch("mc.run2.csv")) == first);
}

TEST_CASE("io failure surfaces as runtime_error")
{
    ExperimentSpec s;
    s.n = 4;
    s.trace_path = "/proc/definitely/not/writable.csv";
    CHECK_THROWS_AS(run_experiment(s), std::runtime_error);
}

TEST_CASE("compare writes one combined csv")
{
    RunConfig cfg;
    std::ostringstream os;
    const auto s = compare(30, 1, cfg, os);
    REQUIRE(s.size() == 3);
    const auto text = os.str();
    CHECK(text.rfind("algorithm,iter,isl,psl,elapsed_ms\n", 0) == 0);
    CHECK(text.find("\nfbmm,0,") != std::string::npos);
    CHECK(text.find("\nmisl,0,") != std::string::npos);
    CHECK(text.find("\ncan,0,") != std::string::npos);
}

TEST_CASE("benchmark rows")
{
    RunConfig cfg;
    cfg.record_psl = false;
    const auto rows = benchmark_scaling({20}, 2, {Algorithm::fbmm, Algorithm::misl, Algorithm::can}, cfg);
    CHECK(rows.size() == 3);
    std::ostringstream os;
    write_bench_csv(os, rows);
    CHECK(os.str().rfind("algorithm,N,avg_sweep_ms,avg_total_ms,avg_iterations\n", 0) == 0);
    CHECK_THROWS_AS(benchmark_scaling({100, 50}, 1, {Algorithm::fbmm}, cfg), SpecError);
}

TEST_CASE("loglog slope")
{
    CHECK(loglog_slope({10, 20, 40}, {1, 4, 16}) == doctest::Approx(2.0));
}
