#pragma once

// CSV and JSON writers for simulation sweeps and the convergence study.
//
// metrics.csv:     pattern,allocator,offered_load,seed,mean_latency_ns,net_throughput,
//                  nodal_throughput_0,...,nodal_throughput_{N-1}
// convergence.csv: n,density_pct,d,reps,mean_iterations,variance_iterations,
//                  p05_iterations,p50_iterations,p95_iterations,nonconverged
// timeseries.csv:  t,generated,delivered,queued,in_flight,bits_sent,max_occupancy,solver,iterations

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "mwmr/convergence.hpp"
#include "mwmr/simulator.hpp"

namespace mwmr {

struct MetricsRow {
    Pattern pattern = Pattern::uniform;
    Allocator allocator = Allocator::mwmr_ac;
    double offered_load = 0.0;
    std::uint64_t seed = 0;
    SimMetrics metrics;
};

/// Sorts by (allocator, offered_load, seed) so output order never depends on scheduling.
void sort_rows(std::vector<MetricsRow>& rows);

std::vector<std::string> metrics_header(std::size_t n_nodes);
void write_metrics_csv(std::ostream& os, std::span<const MetricsRow> rows);

/// Per (allocator, load): means over seeds plus run-level counters.
nlohmann::json summarize(std::span<const MetricsRow> rows);

void write_convergence_csv(std::ostream& os, std::span<const ConvergenceCell> cells);
void write_time_series_csv(std::ostream& os, std::span<const SlotSample> series);

}  // namespace mwmr
