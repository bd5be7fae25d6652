// Drives the built `mwmr` binary end to end.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = fs::path(MWMR_SOURCE_DIR) / "scenarios";

int run(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(MWMR_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> lines_of(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::string text_of(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("mwmr_cli_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("load sweep writes one row per load and seed") {
    TempDir dir("sweep");
    const fs::path out = dir.path / "out";
    const int rc = run("run --scenario " + (kScenarios / "uniform.json").string() +
                           " --allocator mwmr-ac --loads 0.1:1.0:0.1 --seeds 5 --slots 60 --out-dir " + out.string(),
                       dir.path / "log.txt");
    REQUIRE(rc == 0);
    const auto csv = lines_of(out / "metrics.csv");
    REQUIRE(csv.size() == 51);
    CHECK(csv[0].rfind("pattern,allocator,offered_load,seed,mean_latency_ns,net_throughput,nodal_throughput_0,", 0) ==
          0);
    CHECK(csv[0].find("nodal_throughput_63") != std::string::npos);
    std::vector<std::string> loads;
    for (std::size_t i = 1; i < csv.size(); ++i) {
        std::stringstream ss(csv[i]);
        std::string pattern, alloc, load, seed;
        std::getline(ss, pattern, ',');
        std::getline(ss, alloc, ',');
        std::getline(ss, load, ',');
        std::getline(ss, seed, ',');
        CHECK(pattern == "uniform");
        CHECK(alloc == "mwmr-ac");
        CHECK_FALSE(seed.empty());
        if (loads.empty() || loads.back() != load) loads.push_back(load);
    }
    CHECK(loads.size() == 10);
    CHECK(loads.front() == "0.1");
    CHECK(loads.back() == "1.0");

    const auto summary = nlohmann::json::parse(text_of(out / "summary.json"));
    CHECK(summary["runs"] == 50);
    CHECK(summary["points"].size() == 10);
    CHECK(summary["points"][0]["seeds"].size() == 5);
}

TEST_CASE("same root seed gives byte-identical output") {
    TempDir dir("repeat");
    const std::string args = " --pattern hotspot --allocator corona,mwmr-ac --loads 0.2,0.4 --seeds 2 --slots 50";
    REQUIRE(run("run" + args + " --out-dir " + (dir.path / "a").string(), dir.path / "a.txt") == 0);
    REQUIRE(run("run" + args + " --out-dir " + (dir.path / "b").string(), dir.path / "b.txt") == 0);
    CHECK(text_of(dir.path / "a" / "metrics.csv") == text_of(dir.path / "b" / "metrics.csv"));
    CHECK(lines_of(dir.path / "a" / "metrics.csv").size() == 9);
}

TEST_CASE("configuration errors exit nonzero") {
    TempDir dir("errors");
    const auto log = dir.path / "log.txt";
    CHECK(run("run --allocator bogus --slots 10 --out-dir " + dir.path.string(), log) != 0);
    CHECK(text_of(log).find("unknown allocator") != std::string::npos);
    CHECK(run("run --scenario /nonexistent.json --out-dir " + dir.path.string(), log) != 0);
    CHECK(run("run --loads 0.5:0.1:0.1 --out-dir " + dir.path.string(), log) != 0);
    CHECK(run("run --weights heavy --out-dir " + dir.path.string(), log) != 0);
    CHECK(run("run --no-such-flag", log) != 0);
    CHECK(run("solve --scenario " + (kScenarios / "uniform.json").string(), log) != 0);
}

TEST_CASE("convergence study table") {
    TempDir dir("conv");
    const int rc = run("run --convergence-study --n 16 --densities 2,50,90 --d 3,5 --reps 4 --out-dir " +
                           dir.path.string(),
                       dir.path / "log.txt");
    REQUIRE(rc == 0);
    const auto csv = lines_of(dir.path / "convergence.csv");
    REQUIRE(csv.size() == 7);
    CHECK(csv[0] ==
          "n,density_pct,d,reps,mean_iterations,variance_iterations,p05_iterations,p50_iterations,p95_iterations,"
          "nonconverged");
    CHECK(csv[1].rfind("16,2.0,3.0,4,", 0) == 0);
}

TEST_CASE("solve prints the allocation") {
    TempDir dir("solve");
    const auto log = dir.path / "solve.json";
    REQUIRE(run("solve --scenario " + (kScenarios / "solve_pair.json").string(), log) == 0);
    const auto j = nlohmann::json::parse(text_of(log));
    CHECK(j["converged"] == true);
    REQUIRE(j["rates"].size() == 2);
    CHECK(j["rates"][0]["rate_bps"].get<double>() == doctest::Approx(2e10).epsilon(1e-6));
    CHECK(j["rates"][1]["rate_bps"].get<double>() == doctest::Approx(6e10).epsilon(1e-6));

    const auto trace = dir.path / "iters.csv";
    REQUIRE(run("solve --scenario " + (kScenarios / "solve_pair.json").string() + " --iter-trace " + trace.string(),
                log) == 0);
    CHECK(lines_of(trace).front() == "m,gamma,max_dx,lambda0,max_lambda_k");
}

TEST_CASE("control sizing subcommand") {
    TempDir dir("sizing");
    const auto log = dir.path / "out.txt";
    REQUIRE(run("control-sizing --n 64 --bits 120 --rate 10e9 --slot 6e-9 --overhead 5.4e-9", log) == 0);
    CHECK(text_of(log).find("min control waveguides: 20") != std::string::npos);
    CHECK(run("control-sizing --n 64 --bits 120 --rate 10e9 --slot 5e-9 --overhead 5.4e-9", log) != 0);
}

TEST_CASE("trace scenario and optional outputs") {
    TempDir dir("trace");
    const fs::path out = dir.path / "out";
    REQUIRE(run("run --scenario " + (kScenarios / "trace_small.json").string() + " --time-series --out-dir " +
                    out.string(),
                dir.path / "log.txt") == 0);
    const auto csv = lines_of(out / "metrics.csv");
    REQUIRE(csv.size() == 2);
    CHECK(csv[1].rfind("trace,mwmr-ac,", 0) == 0);
    int series = 0;
    for (const auto& e : fs::directory_iterator(out)) series += e.path().filename().string().rfind("timeseries_", 0) == 0;
    CHECK(series == 1);

    const auto dump = dir.path / "sched.jsonl";
    REQUIRE(run("run --pattern uniform --loads 0.2 --slots 30 --schedule-dump " + dump.string() + " --out-dir " +
                    out.string(),
                dir.path / "log.txt") == 0);
    CHECK(lines_of(dump).size() == 30);
    CHECK(run("run --scenario " + (kScenarios / "trace_small.json").string() + " --loads 0.5 --out-dir " +
                  out.string(),
              dir.path / "log.txt") != 0);
}
