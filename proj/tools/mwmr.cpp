// Experiment runner: load sweeps, side-by-side allocators, the solver
// convergence study and one-off solves.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mwmr/burst.hpp"
#include "mwmr/controller.hpp"
#include "mwmr/convergence.hpp"
#include "mwmr/errors.hpp"
#include "mwmr/random.hpp"
#include "mwmr/report.hpp"
#include "mwmr/scenario.hpp"
#include "mwmr/simulator.hpp"
#include "mwmr/solver.hpp"

namespace fs = std::filesystem;
using namespace mwmr;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty()) throw InvalidInput("not a number: '" + s + "'");
    return v;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& s : split(text, ',')) out.push_back(to_double(s));
    if (out.empty()) throw InvalidInput("empty list");
    return out;
}

/// "lo:hi:step", a single value, or a comma list.
std::vector<double> parse_loads(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() == 3) {
        const double lo = to_double(parts[0]);
        const double hi = to_double(parts[1]);
        const double step = to_double(parts[2]);
        if (!(step > 0.0) || hi < lo) throw InvalidInput("loads must be lo:hi:step with step > 0 and hi >= lo");
        const auto count = static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
        std::vector<double> out;
        for (std::size_t i = 0; i < count; ++i) {
            // Round to 12 digits so 0.1 + 2 * 0.1 prints as 0.3.
            out.push_back(std::round((lo + step * static_cast<double>(i)) * 1e12) / 1e12);
        }
        return out;
    }
    if (parts.size() == 1) return parse_list(parts[0]);
    throw InvalidInput("loads must be lo:hi:step, a number or a comma list");
}

struct RunOptions {
    std::string scenario;
    std::string allocators = "mwmr-ac";
    std::string loads;
    int seeds = 1;
    std::uint64_t root_seed = 1;
    std::optional<double> alpha;
    std::string d;
    std::optional<double> epsilon;
    std::string out_dir = ".";
    std::string trace;
    std::string weights;
    std::string pattern;
    std::string policy;
    std::optional<std::uint64_t> slots;
    std::string schedule_dump;
    bool time_series = false;
    bool convergence = false;
    std::string conv_n = "64";
    std::string densities = "0.5,2,10,50,90";
    int reps = 100;
};

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << text;
    if (!out) throw InvalidInput("write failed for " + path.string());
}

int run_convergence(const RunOptions& o) {
    ConvergenceStudyConfig c;
    c.n_nodes.clear();
    for (double v : parse_list(o.conv_n)) {
        if (!(v >= 2.0) || v != std::floor(v)) throw InvalidInput("--n values must be integers >= 2");
        c.n_nodes.push_back(static_cast<std::size_t>(v));
    }
    c.densities_pct = parse_list(o.densities);
    c.step_constants = o.d.empty() ? std::vector<double>{5.0} : parse_list(o.d);
    c.reps = o.reps;
    c.seed = o.root_seed;
    if (o.epsilon) c.epsilon = *o.epsilon;
    if (o.alpha) c.alpha = *o.alpha;

    const auto cells = run_convergence_study(c);
    fs::create_directories(o.out_dir);
    std::ostringstream csv;
    write_convergence_csv(csv, cells);
    write_file(fs::path(o.out_dir) / "convergence.csv", csv.str());

    std::cout << "     N  density%     d   mean I_eps    variance   p05   p50   p95  nonconv\n";
    for (const auto& cell : cells) {
        std::printf("%6zu  %8.1f  %4.1f  %11.2f  %10.2f  %4.0f  %4.0f  %4.0f  %7d\n", cell.n, cell.density_pct,
                    cell.d, cell.mean_iterations, cell.variance_iterations, cell.p05, cell.p50, cell.p95,
                    cell.nonconverged);
    }
    std::cout << "wrote " << (fs::path(o.out_dir) / "convergence.csv").string() << '\n';
    return 0;
}

int run_simulation(const RunOptions& o) {
    Scenario sc = o.scenario.empty() ? Scenario{} : load_scenario(fs::path(o.scenario));
    if (o.scenario.empty()) sc.sim.nodes = default_nodes(sc.sim.crossbar);
    SimConfig& base = sc.sim;
    const std::size_t n = base.crossbar.n_nodes;

    if (!o.pattern.empty()) base.pattern = parse_pattern(o.pattern);
    if (!o.trace.empty()) {
        base.pattern = Pattern::trace;
        base.trace = load_trace(fs::path(o.trace), n, base.crossbar.slot_length);
    }
    if (!o.weights.empty()) base.weights = weights_by_name(o.weights, n);
    if (o.alpha) base.controller.utility.alpha = *o.alpha;
    if (!o.d.empty()) {
        const auto ds = parse_list(o.d);
        if (ds.size() != 1) throw InvalidInput("--d takes one value outside the convergence study");
        base.controller.solver.step_constant = ds.front();
    }
    if (o.epsilon) base.controller.solver.epsilon = *o.epsilon;
    if (!o.policy.empty()) base.controller.policy = parse_policy(o.policy);
    if (o.slots) base.slots = *o.slots;
    base.record_time_series = o.time_series;
    base.validate();

    std::vector<Allocator> allocators;
    for (const auto& a : split(o.allocators, ',')) allocators.push_back(parse_allocator(a));
    if (allocators.empty()) throw InvalidInput("--allocator needs at least one name");
    if (base.pattern == Pattern::trace && !o.loads.empty()) {
        throw InvalidInput("--loads does not apply to trace replay");
    }
    const std::vector<double> loads = o.loads.empty() ? std::vector<double>{base.load} : parse_loads(o.loads);
    for (double l : loads) {
        if (!(l >= 0.0 && l <= 1.0)) throw InvalidInput("offered loads must lie in [0, 1]");
    }
    if (o.seeds < 1) throw InvalidInput("--seeds must be >= 1");

    std::vector<SweepPoint> points;
    for (auto a : allocators) {
        for (double l : loads) {
            for (int s = 0; s < o.seeds; ++s) points.push_back({a, l, child_seed(o.root_seed, s)});
        }
    }
    fs::create_directories(o.out_dir);

    std::vector<SimMetrics> results;
    if (!o.schedule_dump.empty()) {
        if (points.size() != 1) throw InvalidInput("--schedule-dump needs a single run (one allocator, load, seed)");
        std::ofstream dump(o.schedule_dump);
        if (!dump) throw InvalidInput("cannot write " + o.schedule_dump);
        SimConfig c = base;
        c.allocator = points[0].allocator;
        c.load = points[0].load;
        c.seed = points[0].seed;
        results.push_back(simulate(c, &dump));
    } else {
        results = run_sweep(base, points);
    }

    std::vector<MetricsRow> rows;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double offered = results[i].offered_load;
        rows.push_back({base.pattern, points[i].allocator, offered, points[i].seed, std::move(results[i])});
    }
    sort_rows(rows);

    std::ostringstream csv;
    write_metrics_csv(csv, rows);
    write_file(fs::path(o.out_dir) / "metrics.csv", csv.str());
    auto summary = summarize(rows);
    summary["root_seed"] = o.root_seed;
    summary["slots"] = base.slots;
    summary["n_nodes"] = n;
    write_file(fs::path(o.out_dir) / "summary.json", summary.dump(2) + "\n");
    if (o.time_series) {
        for (const auto& r : rows) {
            std::ostringstream ts;
            write_time_series_csv(ts, r.metrics.series);
            std::ostringstream name;
            name << "timeseries_" << to_string(r.allocator) << "_" << r.offered_load << "_" << r.seed << ".csv";
            write_file(fs::path(o.out_dir) / name.str(), ts.str());
        }
    }

    for (const auto& p : summary["points"]) {
        std::printf("%-10s load %.3f  throughput %.4f  latency %10.2f ns\n",
                    p["allocator"].get<std::string>().c_str(), p["offered_load"].get<double>(),
                    p["net_throughput"].get<double>(), p["mean_latency_ns"].get<double>());
    }
    std::cout << "wrote " << rows.size() << " rows to " << (fs::path(o.out_dir) / "metrics.csv").string() << '\n';
    if (summary["overflow_events"].get<std::uint64_t>() != 0) {
        std::cerr << "warning: receive buffer overflow events recorded\n";
    }
    return 0;
}

int run_solve(const std::string& scenario_path, const std::string& solver, const std::string& trace_path) {
    Scenario sc = load_scenario(fs::path(scenario_path));
    if (!sc.matrix) throw InvalidInput("solve needs traffic.matrix in the scenario");
    const auto& cfg = sc.sim.crossbar;
    const auto& nodes = sc.sim.nodes;
    const auto& traffic = *sc.matrix;
    const auto& spec = sc.sim.controller.utility;

    nlohmann::json out;
    RateAllocation x;
    if (solver == "burst") {
        auto r = solve_burst(traffic, nodes, cfg);
        x = r.x;
        out["surplus_bps"] = r.surplus;
        out["regime"] = r.regime == BurstRegime::under_utilized ? "under-utilized" : "fully-utilized";
    } else if (solver == "iterative") {
        auto params = sc.sim.controller.solver;
        params.record_trace = !trace_path.empty();
        auto r = solve_iterative(traffic, nodes, cfg, spec, params);
        x = r.x;
        out["iterations"] = r.iterations;
        out["converged"] = r.converged;
        out["projected"] = r.projected;
        const auto kkt = kkt_residuals(r.x, r.lambda, traffic, nodes, cfg, spec);
        out["kkt"] = {{"stationarity", kkt.scaled_stationarity},
                      {"feasibility", kkt.scaled_feasibility},
                      {"complementarity", kkt.scaled_complementarity}};
        out["lambda0"] = r.lambda.lambda0;
        out["lambda"] = r.lambda.lambda;
        if (!trace_path.empty()) {
            std::ofstream t(trace_path);
            if (!t) throw InvalidInput("cannot write " + trace_path);
            write_iteration_trace(t, r.trace);
        }
    } else {
        throw InvalidInput("unknown solver '" + solver + "' (expected iterative or burst)");
    }
    out["objective"] = total_utility(x, traffic, spec);
    nlohmann::json rates = nlohmann::json::array();
    for (const auto& c : traffic.connections()) {
        rates.push_back({{"src", c.sender}, {"dst", c.receiver}, {"rate_bps", x(c.sender, c.receiver)}});
    }
    out["rates"] = rates;
    std::cout << out.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MWMR crossbar admission control: simulation and solver experiments"};
    app.require_subcommand(1);

    RunOptions o;
    auto* run = app.add_subcommand("run", "run a simulation sweep or the convergence study");
    run->add_option("--scenario", o.scenario, "scenario JSON file");
    run->add_option("--allocator", o.allocators, "mwmr-ac, corona, corona-ff, or a comma list");
    run->add_option("--loads", o.loads, "offered loads: lo:hi:step, a value, or a comma list");
    run->add_option("--seeds", o.seeds, "runs per (allocator, load)");
    run->add_option("--seed", o.root_seed, "root seed");
    run->add_option("--alpha", o.alpha, "fairness parameter alpha");
    run->add_option("--d", o.d, "step constant d (comma list for the convergence study)");
    run->add_option("--epsilon", o.epsilon, "stopping tolerance, units of R");
    run->add_option("--out-dir", o.out_dir, "output directory");
    run->add_option("--trace", o.trace, "trace CSV (cycle,src,dst,bits) to replay");
    run->add_option("--weights", o.weights, "equal or categories");
    run->add_option("--pattern", o.pattern, "uniform, hotspot or trace");
    run->add_option("--policy", o.policy, "surplus, always-iterative, always-burst or load-threshold");
    run->add_option("--slots", o.slots, "simulated slots per run");
    run->add_option("--schedule-dump", o.schedule_dump, "JSON-lines slot schedules (single run only)");
    run->add_flag("--time-series", o.time_series, "write per-slot CSV for every run");
    run->add_flag("--convergence-study", o.convergence, "run the solver iteration-count study instead");
    run->add_option("--n", o.conv_n, "node counts for the convergence study");
    run->add_option("--densities", o.densities, "traffic densities in percent for the convergence study");
    run->add_option("--reps", o.reps, "instances per convergence cell");

    std::string solve_scenario;
    std::string solve_solver = "iterative";
    std::string iter_trace;
    auto* solve = app.add_subcommand("solve", "solve the allocation for a scenario's traffic matrix");
    solve->add_option("--scenario", solve_scenario, "scenario JSON with traffic.matrix")->required();
    solve->add_option("--solver", solve_solver, "iterative or burst");
    solve->add_option("--iter-trace", iter_trace, "per-iteration CSV");

    std::size_t size_n = 64;
    double size_bits = 120.0;
    double size_rate = 10e9;
    double size_slot = 6e-9;
    double size_overhead = 5.4e-9;
    auto* sizing = app.add_subcommand("control-sizing", "minimum control bandwidth and waveguides");
    sizing->add_option("--n", size_n, "nodes");
    sizing->add_option("--bits", size_bits, "request + result size, bits");
    sizing->add_option("--rate", size_rate, "wavelength rate, b/s");
    sizing->add_option("--slot", size_slot, "slot length, s");
    sizing->add_option("--overhead", size_overhead, "controller overhead V, s");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) return o.convergence ? run_convergence(o) : run_simulation(o);
        if (*solve) return run_solve(solve_scenario, solve_solver, iter_trace);
        if (*sizing) {
            std::cout << "min control bandwidth: " << min_control_bandwidth(size_bits, 0.0, size_overhead, size_slot)
                      << " b/s\nmin control waveguides: "
                      << min_control_waveguides(size_n, size_bits, 0.0, size_rate, size_slot, size_overhead) << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
