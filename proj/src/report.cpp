#include "mwmr/report.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "mwmr/errors.hpp"

namespace mwmr {

namespace {

// Shortest text that reads back to the same double.
std::string num(double v) {
    return nlohmann::json(v).dump();
}

}  // namespace

void sort_rows(std::vector<MetricsRow>& rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const MetricsRow& a, const MetricsRow& b) {
        return std::tuple(static_cast<int>(a.allocator), a.offered_load, a.seed) <
               std::tuple(static_cast<int>(b.allocator), b.offered_load, b.seed);
    });
}

std::vector<std::string> metrics_header(std::size_t n_nodes) {
    std::vector<std::string> cols{"pattern",         "allocator",      "offered_load", "seed",
                                  "mean_latency_ns", "net_throughput"};
    for (std::size_t i = 0; i < n_nodes; ++i) cols.push_back("nodal_throughput_" + std::to_string(i));
    return cols;
}

void write_metrics_csv(std::ostream& os, std::span<const MetricsRow> rows) {
    const std::size_t n = rows.empty() ? 0 : rows.front().metrics.nodal_throughput.size();
    const auto header = metrics_header(n);
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& r : rows) {
        if (r.metrics.nodal_throughput.size() != n) throw DimensionMismatch("rows disagree on node count");
        os << to_string(r.pattern) << ',' << to_string(r.allocator) << ',' << num(r.offered_load) << ',' << r.seed
           << ',' << num(r.metrics.mean_latency * 1e9) << ',' << num(r.metrics.network_throughput);
        for (double v : r.metrics.nodal_throughput) os << ',' << num(v);
        os << '\n';
    }
}

nlohmann::json summarize(std::span<const MetricsRow> rows) {
    struct Acc {
        std::string pattern;
        double latency = 0.0;
        double throughput = 0.0;
        int runs = 0;
        std::uint64_t overflow = 0;
        std::uint64_t iterative = 0;
        std::uint64_t nonconverged = 0;
        std::vector<std::uint64_t> seeds;
    };
    std::map<std::pair<std::string, double>, Acc> groups;
    std::uint64_t overflow_total = 0;
    for (const auto& r : rows) {
        auto& a = groups[{std::string(to_string(r.allocator)), r.offered_load}];
        a.pattern = std::string(to_string(r.pattern));
        a.latency += r.metrics.mean_latency * 1e9;
        a.throughput += r.metrics.network_throughput;
        a.overflow += r.metrics.overflow_events;
        a.iterative += r.metrics.iterative_slots;
        a.nonconverged += r.metrics.nonconverged_slots;
        a.seeds.push_back(r.seed);
        ++a.runs;
        overflow_total += r.metrics.overflow_events;
    }
    nlohmann::json points = nlohmann::json::array();
    for (const auto& [key, a] : groups) {
        points.push_back({{"allocator", key.first},
                          {"pattern", a.pattern},
                          {"offered_load", key.second},
                          {"runs", a.runs},
                          {"seeds", a.seeds},
                          {"mean_latency_ns", a.latency / a.runs},
                          {"net_throughput", a.throughput / a.runs},
                          {"overflow_events", a.overflow},
                          {"iterative_slots", a.iterative},
                          {"nonconverged_slots", a.nonconverged}});
    }
    return {{"runs", rows.size()}, {"overflow_events", overflow_total}, {"points", points}};
}

void write_convergence_csv(std::ostream& os, std::span<const ConvergenceCell> cells) {
    os << "n,density_pct,d,reps,mean_iterations,variance_iterations,p05_iterations,p50_iterations,p95_iterations,"
          "nonconverged\n";
    for (const auto& c : cells) {
        os << c.n << ',' << num(c.density_pct) << ',' << num(c.d) << ',' << c.reps << ',' << num(c.mean_iterations)
           << ',' << num(c.variance_iterations) << ',' << num(c.p05) << ',' << num(c.p50) << ',' << num(c.p95) << ','
           << c.nonconverged << '\n';
    }
}

void write_time_series_csv(std::ostream& os, std::span<const SlotSample> series) {
    os << "t,generated,delivered,queued,in_flight,bits_sent,max_occupancy,solver,iterations\n";
    for (const auto& s : series) {
        os << s.t << ',' << s.generated << ',' << s.delivered << ',' << s.queued << ',' << s.in_flight << ','
           << num(s.bits_sent) << ',' << num(s.max_occupancy) << ',' << to_string(s.solver) << ',' << s.iterations
           << '\n';
    }
}

}  // namespace mwmr
