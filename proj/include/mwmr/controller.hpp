#pragma once

// Per-slot central admission control: collect requests, pick a solver, trim
// to whole wavelengths and hand out concrete (waveguide, wavelength) channels.

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mwmr/model.hpp"
#include "mwmr/solver.hpp"

namespace mwmr {

struct Destination {
    NodeId receiver;
    double weight = 1.0;
};

/// What one node reports at the start of a slot: where it wants to send and
/// how much its own receive side can take.
struct SlotRequest {
    NodeId sender = 0;
    std::vector<Destination> destinations;
    double free_buffer = 0.0;  // M_k of this node, bits
    double drain_rate = 0.0;   // r_k of this node, bits/s
};

struct Channel {
    std::size_t waveguide = 0;
    std::size_t wavelength = 0;

    friend bool operator==(const Channel&, const Channel&) = default;
};

struct ChannelGrant {
    NodeId sender = 0;
    NodeId receiver = 0;
    std::vector<Channel> channels;
    double granted_rate = 0.0;  // R * channels.size()
};

enum class SolverKind { iterative, burst };

std::string to_string(SolverKind kind);

struct SlotSchedule {
    std::uint64_t t = 0;
    std::vector<ChannelGrant> grants;
    SolverKind solver_used = SolverKind::burst;
    int solver_iterations = 0;
    bool converged = true;
    double leftover = 0.0;  // trimming residual that found no home, bits/s

    std::size_t channels_granted() const noexcept;
};

enum class PolicyKind { surplus, always_iterative, always_burst, load_threshold };

struct SolverPolicy {
    PolicyKind kind = PolicyKind::surplus;
    /// For load_threshold: burst while the proportional split asks for at
    /// most threshold * C R in aggregate.
    double threshold = 0.9;
};

SolverPolicy parse_policy(std::string_view name);

SolverKind select_solver(const TrafficMatrix& traffic, std::span<const NodeState> nodes, const CrossbarConfig& cfg,
                         const SolverPolicy& policy = {});

/// First-fit over channels ordered (waveguide, wavelength). Entries of
/// `trimmed` must be whole multiples of R. Throws CapacityExceeded when the
/// total exceeds C channels.
std::vector<ChannelGrant> assign_channels(const RateAllocation& trimmed, const TrafficMatrix& traffic,
                                          const CrossbarConfig& cfg);

struct ControllerOptions {
    UtilitySpec utility;
    SolverParams solver;
    SolverPolicy policy;
};

/// Computes the schedule for slot t from requests collected during slot t-1.
/// Nodes without a request report zero buffer and zero drain. A destination
/// whose receiver reports zero capacity is dropped.
SlotSchedule run_slot(std::span<const SlotRequest> requests, const CrossbarConfig& cfg,
                      const ControllerOptions& options, std::uint64_t t, std::uint64_t seed);

struct ControlChannelModel {
    double request_size = 64.0;           // rqst, bits
    double result_size = 56.0;            // rslt, bits
    double controller_overhead = 5.4e-9;  // V, seconds
    std::optional<double> control_bandwidth;           // B_c; derived minimum when unset
    std::optional<std::size_t> control_waveguides;     // W_c; derived minimum when unset

    /// Throws TimingInfeasible when the configured B_c or W_c are too small.
    void validate(const CrossbarConfig& cfg) const;
};

/// (rqst + rslt) / (delta - V). Throws TimingInfeasible when delta <= V.
double min_control_bandwidth(double request_bits, double result_bits, double overhead, double slot_length);

/// ceil(N (rqst + rslt) / (wavelengths * R * (delta - V))).
std::size_t min_control_waveguides(std::size_t n_nodes, double request_bits, double result_bits,
                                   double wavelength_rate, double slot_length, double overhead,
                                   std::size_t wavelengths_per_waveguide = 64);

/// One JSON object per line: {t, solver, iterations, grants:[{src,dst,rate_bps,channels}]}.
void write_schedule_jsonl(std::ostream& os, const SlotSchedule& schedule);

}  // namespace mwmr
