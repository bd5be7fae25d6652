#pragma once

// Slotted simulator of the crossbar. Packets are generated at the start of
// a slot; MWMR-AC schedules are computed one slot ahead from the state seen
// at the start of the current slot; token baselines arbitrate in-slot.

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "mwmr/controller.hpp"
#include "mwmr/model.hpp"
#include "mwmr/traffic.hpp"

namespace mwmr {

enum class Allocator { mwmr_ac, corona, corona_ff };

Allocator parse_allocator(std::string_view name);
std::string_view to_string(Allocator a);

/// Receive buffer of 160 packets and a drain rate of 512 wavelengths.
std::vector<NodeState> default_nodes(const CrossbarConfig& cfg);

struct SimConfig {
    CrossbarConfig crossbar;
    /// Per node: drain_rate is r_k, free_buffer is the buffer size.
    std::vector<NodeState> nodes;
    Allocator allocator = Allocator::mwmr_ac;
    Pattern pattern = Pattern::uniform;
    double load = 0.1;
    NodeId hotspot_target = 0;
    std::vector<TraceRecord> trace;  // used when pattern == trace
    WeightProfile weights;           // empty means all 1
    std::uint64_t slots = 2000;
    double warmup_fraction = 0.1;
    std::uint64_t seed = 1;
    double packet_bits = kPacketBits;
    ControllerOptions controller;
    /// When false, every packet also pays the controller overhead V.
    bool pipelined = true;
    double controller_overhead = 5.4e-9;
    bool record_time_series = false;

    void validate() const;
    std::uint64_t warmup_slots() const noexcept;
};

struct SlotSample {
    std::uint64_t t = 0;
    std::uint64_t generated = 0;  // cumulative packets
    std::uint64_t delivered = 0;  // cumulative packets
    std::uint64_t queued = 0;     // not yet started
    std::uint64_t in_flight = 0;  // partly transmitted
    double bits_sent = 0.0;       // this slot
    double max_occupancy = 0.0;   // largest receive buffer fill this slot, fraction of size
    SolverKind solver = SolverKind::burst;
    int iterations = 0;
};

struct SimMetrics {
    double offered_load = 0.0;  // nominal load, or measured for a trace
    double mean_latency = 0.0;  // seconds, packets delivered after warmup
    double network_throughput = 0.0;
    std::vector<double> nodal_throughput;  // fraction of C R, per sender
    std::uint64_t generated_packets = 0;
    std::uint64_t delivered_packets = 0;
    std::uint64_t measured_packets = 0;  // delivered after warmup
    std::uint64_t queued_packets = 0;
    std::uint64_t in_flight_packets = 0;
    std::uint64_t overflow_events = 0;
    double max_occupancy = 0.0;  // fraction of buffer size
    std::uint64_t iterative_slots = 0;
    std::uint64_t nonconverged_slots = 0;
    std::vector<SlotSample> series;
};

/// Runs one scenario. `schedule_dump` receives one JSON line per slot.
SimMetrics simulate(const SimConfig& config, std::ostream* schedule_dump = nullptr);

struct SweepPoint {
    Allocator allocator = Allocator::mwmr_ac;
    double load = 0.0;
    std::uint64_t seed = 0;
};

/// Runs every point with `base` otherwise unchanged, fanned out over OpenMP
/// threads. Results line up with `points`.
std::vector<SimMetrics> run_sweep(const SimConfig& base, std::span<const SweepPoint> points);

struct FairnessReport {
    std::vector<double> class_means;  // mean nodal throughput per class
    std::vector<double> ratios;       // class_means / class_means[0]
    double jain = 0.0;                // over every node with class >= 0
};

/// `classes[n]` is the class of sender n, or -1 to leave it out.
/// Throws InsufficientData when a class has zero throughput or no members.
FairnessReport measure_fairness(const SimMetrics& metrics, std::span<const int> classes);

/// Jain index (sum x)^2 / (n sum x^2); 0 for an empty or all-zero input.
double jain_index(std::span<const double> values);

}  // namespace mwmr
