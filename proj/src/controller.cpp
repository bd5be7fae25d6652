#include "mwmr/controller.hpp"

#include <cmath>

#include "json.hpp"

#include "mwmr/burst.hpp"
#include "mwmr/errors.hpp"
#include "mwmr/trimmer.hpp"

namespace mwmr {

std::string to_string(SolverKind kind) {
    return kind == SolverKind::iterative ? "iterative" : "burst";
}

std::size_t SlotSchedule::channels_granted() const noexcept {
    std::size_t total = 0;
    for (const auto& g : grants) total += g.channels.size();
    return total;
}

SolverPolicy parse_policy(std::string_view name) {
    if (name == "surplus") return {PolicyKind::surplus};
    if (name == "always-iterative" || name == "iterative") return {PolicyKind::always_iterative};
    if (name == "always-burst" || name == "burst") return {PolicyKind::always_burst};
    if (name == "load-threshold") return {PolicyKind::load_threshold};
    throw InvalidInput("unknown solver policy '" + std::string(name) + "'");
}

SolverKind select_solver(const TrafficMatrix& traffic, std::span<const NodeState> nodes, const CrossbarConfig& cfg,
                         const SolverPolicy& policy) {
    switch (policy.kind) {
        case PolicyKind::always_iterative:
            return SolverKind::iterative;
        case PolicyKind::always_burst:
            return SolverKind::burst;
        case PolicyKind::load_threshold: {
            if (traffic.empty()) return SolverKind::burst;
            const double cap = cfg.total_capacity();
            const double demand = cap - burst_surplus(traffic, nodes, cfg);
            return demand <= policy.threshold * cap ? SolverKind::burst : SolverKind::iterative;
        }
        case PolicyKind::surplus:
            break;
    }
    if (traffic.empty()) return SolverKind::burst;
    return burst_surplus(traffic, nodes, cfg) >= 0.0 ? SolverKind::burst : SolverKind::iterative;
}

std::vector<ChannelGrant> assign_channels(const RateAllocation& trimmed, const TrafficMatrix& traffic,
                                          const CrossbarConfig& cfg) {
    if (trimmed.size() != traffic.size()) throw DimensionMismatch("assign_channels: sizes differ");
    const std::size_t per_guide = cfg.wavelengths_per_waveguide;
    const std::size_t capacity = cfg.total_channels();
    std::vector<ChannelGrant> grants;
    std::size_t next = 0;
    for (const auto& c : traffic.connections()) {
        const double units = trimmed(c.sender, c.receiver) / cfg.wavelength_rate;
        const double count_f = std::round(units);
        if (std::abs(units - count_f) > 1e-6) {
            throw InvalidInput("assign_channels: rate is not a whole multiple of R");
        }
        const auto count = static_cast<std::size_t>(count_f);
        if (count == 0) continue;
        if (next + count > capacity) {
            throw CapacityExceeded("assign_channels: " + std::to_string(next + count) + " channels requested, " +
                                   std::to_string(capacity) + " available");
        }
        ChannelGrant g{c.sender, c.receiver, {}, static_cast<double>(count) * cfg.wavelength_rate};
        g.channels.reserve(count);
        for (std::size_t i = 0; i < count; ++i, ++next) {
            g.channels.push_back({next / per_guide, next % per_guide});
        }
        grants.push_back(std::move(g));
    }
    return grants;
}

SlotSchedule run_slot(std::span<const SlotRequest> requests, const CrossbarConfig& cfg,
                      const ControllerOptions& options, std::uint64_t t, std::uint64_t seed) {
    const std::size_t n = cfg.n_nodes;
    SlotSchedule schedule;
    schedule.t = t;

    std::vector<NodeState> nodes(n);
    std::vector<bool> seen(n, false);
    for (const auto& r : requests) {
        if (r.sender >= n) throw InvalidInput("request from unknown node " + std::to_string(r.sender));
        if (seen[r.sender]) throw InvalidInput("duplicate request from node " + std::to_string(r.sender));
        seen[r.sender] = true;
        nodes[r.sender] = NodeState{r.drain_rate, r.free_buffer};
        nodes[r.sender].validate();
    }

    std::vector<Connection> conns;
    for (const auto& r : requests) {
        for (const auto& d : r.destinations) {
            if (d.receiver >= n) throw InvalidInput("destination out of range: " + std::to_string(d.receiver));
            if (receiver_capacity(nodes[d.receiver], cfg.slot_length) <= 0.0) continue;
            conns.push_back({r.sender, d.receiver, d.weight});
        }
    }
    if (conns.empty()) return schedule;
    const TrafficMatrix traffic(n, conns);

    RateAllocation optimal;
    schedule.solver_used = select_solver(traffic, nodes, cfg, options.policy);
    if (schedule.solver_used == SolverKind::burst) {
        optimal = solve_burst(traffic, nodes, cfg).x;
    } else {
        auto solved = solve_iterative(traffic, nodes, cfg, options.utility, options.solver);
        schedule.solver_iterations = solved.iterations;
        schedule.converged = solved.converged;
        optimal = std::move(solved.x);
    }

    auto trimmed = trim(optimal, traffic, nodes, cfg, seed);
    schedule.leftover = trimmed.residual_left;
    schedule.grants = assign_channels(trimmed.x, traffic, cfg);
    return schedule;
}

void ControlChannelModel::validate(const CrossbarConfig& cfg) const {
    if (request_size < 0.0 || result_size < 0.0 || controller_overhead < 0.0) {
        throw InvalidInput("control channel sizes and overhead must be >= 0");
    }
    const double need = min_control_bandwidth(request_size, result_size, controller_overhead, cfg.slot_length);
    if (control_bandwidth && *control_bandwidth < need) {
        throw TimingInfeasible("control bandwidth below the minimum of " + std::to_string(need) + " b/s");
    }
    const std::size_t guides =
        min_control_waveguides(cfg.n_nodes, request_size, result_size, cfg.wavelength_rate, cfg.slot_length,
                               controller_overhead, cfg.wavelengths_per_waveguide);
    if (control_waveguides && *control_waveguides < guides) {
        throw TimingInfeasible("control waveguides below the minimum of " + std::to_string(guides));
    }
}

double min_control_bandwidth(double request_bits, double result_bits, double overhead, double slot_length) {
    if (!(slot_length > overhead)) throw TimingInfeasible("slot length must exceed controller overhead");
    return (request_bits + result_bits) / (slot_length - overhead);
}

std::size_t min_control_waveguides(std::size_t n_nodes, double request_bits, double result_bits,
                                   double wavelength_rate, double slot_length, double overhead,
                                   std::size_t wavelengths_per_waveguide) {
    if (!(wavelength_rate > 0.0)) throw InvalidInput("wavelength rate must be > 0");
    if (wavelengths_per_waveguide == 0) throw InvalidInput("wavelengths per waveguide must be >= 1");
    const double bandwidth = min_control_bandwidth(request_bits, result_bits, overhead, slot_length);
    const double raw = static_cast<double>(n_nodes) * bandwidth /
                       (static_cast<double>(wavelengths_per_waveguide) * wavelength_rate);
    // delta - V rarely subtracts exactly; forgive the last few ulps before rounding up.
    const double nearest = std::round(raw);
    if (std::abs(raw - nearest) <= 1e-9 * std::max(1.0, nearest)) return static_cast<std::size_t>(nearest);
    return static_cast<std::size_t>(std::ceil(raw));
}

void write_schedule_jsonl(std::ostream& os, const SlotSchedule& schedule) {
    nlohmann::json grants = nlohmann::json::array();
    for (const auto& g : schedule.grants) {
        nlohmann::json channels = nlohmann::json::array();
        for (const auto& c : g.channels) channels.push_back({c.waveguide, c.wavelength});
        grants.push_back({{"src", g.sender}, {"dst", g.receiver}, {"rate_bps", g.granted_rate}, {"channels", channels}});
    }
    nlohmann::json rec = {{"t", schedule.t},
                          {"solver", to_string(schedule.solver_used)},
                          {"iterations", schedule.solver_iterations},
                          {"grants", grants}};
    os << rec.dump() << '\n';
}

}  // namespace mwmr
