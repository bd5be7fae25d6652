#pragma once

// Domain types shared by the solver, trimmer, controller and simulator.
//
// Units: rates in bits/second, buffers in bits, time in seconds.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mwmr {

using NodeId = std::size_t;

struct CrossbarConfig {
    std::size_t n_nodes = 64;
    std::size_t n_waveguides = 64;
    std::size_t wavelengths_per_waveguide = 64;
    double wavelength_rate = 10e9;  // R, bits/s per wavelength
    double slot_length = 6e-9;      // delta, seconds

    std::size_t total_channels() const noexcept { return n_waveguides * wavelengths_per_waveguide; }
    double total_capacity() const noexcept {
        return static_cast<double>(total_channels()) * wavelength_rate;
    }
    /// Bits one channel carries during one slot.
    double channel_bits_per_slot() const noexcept { return wavelength_rate * slot_length; }

    void validate() const;
};

struct NodeState {
    double drain_rate = 0.0;   // r_k
    double free_buffer = 0.0;  // M_k

    void validate() const;
};

/// r_k + M_k / delta: the most a receiver can absorb during one slot, as a rate.
double receiver_capacity(const NodeState& node, double slot_length);

struct Connection {
    NodeId sender;
    NodeId receiver;
    double weight;
};

/// Binary sender->receiver demand pattern with per-connection weights.
///
/// Active connections are stored grouped by receiver (ascending), senders
/// ascending within a receiver. The solver kernels iterate this order.
class TrafficMatrix {
public:
    TrafficMatrix() = default;
    explicit TrafficMatrix(std::size_t n_nodes);
    /// Throws InvalidInput on self-traffic, out-of-range ids, non-positive
    /// weights or duplicate pairs.
    TrafficMatrix(std::size_t n_nodes, std::span<const Connection> connections);

    std::size_t size() const noexcept { return n_; }
    bool empty() const noexcept { return entries_.empty(); }
    std::size_t active_count() const noexcept { return entries_.size(); }

    bool active(NodeId sender, NodeId receiver) const;
    /// 0 for inactive pairs.
    double weight(NodeId sender, NodeId receiver) const;
    double inverse_weight(NodeId sender, NodeId receiver) const;
    double density() const noexcept;

    /// Receiver-grouped list of active connections.
    std::span<const Connection> connections() const noexcept { return entries_; }
    std::span<const double> inverse_weights() const noexcept { return inv_weights_; }
    /// Offsets into connections(): receiver k owns [offsets[k], offsets[k+1]).
    std::span<const std::size_t> receiver_offsets() const noexcept { return offsets_; }
    std::size_t in_degree(NodeId receiver) const;
    /// Dense index (sender * N + receiver) of every active entry, same order as connections().
    std::span<const std::size_t> dense_index() const noexcept { return dense_; }

private:
    std::size_t n_ = 0;
    std::vector<Connection> entries_;
    std::vector<double> inv_weights_;
    std::vector<std::size_t> offsets_;
    std::vector<std::size_t> dense_;
    std::vector<std::int32_t> slot_of_;  // dense -> entry index or -1
};

/// N x N nonnegative rates, row = sender, column = receiver.
class RateAllocation {
public:
    RateAllocation() = default;
    explicit RateAllocation(std::size_t n_nodes) : n_(n_nodes), x_(n_nodes * n_nodes, 0.0) {}

    std::size_t size() const noexcept { return n_; }
    double operator()(NodeId sender, NodeId receiver) const { return x_[sender * n_ + receiver]; }
    double& operator()(NodeId sender, NodeId receiver) { return x_[sender * n_ + receiver]; }
    std::span<const double> values() const noexcept { return x_; }
    std::span<double> values() noexcept { return x_; }
    double total() const noexcept;

    friend bool operator==(const RateAllocation&, const RateAllocation&) = default;

private:
    std::size_t n_ = 0;
    std::vector<double> x_;
};

struct UtilitySpec {
    double alpha = 1.0;

    void validate() const;
};

/// w x^(1-a)/(1-a), or w log x at a = 1. Throws DomainError for x <= 0.
double utility(double x, const UtilitySpec& spec, double weight);
/// U'(x) = w x^(-a).
double marginal_utility(double x, const UtilitySpec& spec, double weight);
/// U''(x) = -a w x^(-a-1).
double utility_curvature(double x, const UtilitySpec& spec, double weight);

/// Sum of utilities over active connections.
double total_utility(const RateAllocation& x, const TrafficMatrix& traffic, const UtilitySpec& spec);

enum class ConstraintKind { nonnegative, receiver, total_capacity };

struct Violation {
    ConstraintKind kind;
    std::size_t index;  // receiver id, dense entry index, or 0 for total capacity
    double slack;       // rhs - lhs, negative when violated
};

struct FeasibilityReport {
    bool ok = true;
    std::vector<Violation> violations;
    std::vector<double> receiver_slack;  // per receiver, rhs - lhs
    double capacity_slack = 0.0;
};

/// Checks X >= 0, per-receiver capacity, and the total wavelength pool.
/// `rel_tolerance` forgives violations up to rel_tolerance * rhs.
FeasibilityReport check_feasible(const RateAllocation& x, const TrafficMatrix& traffic,
                                 std::span<const NodeState> nodes, const CrossbarConfig& cfg,
                                 double rel_tolerance = 0.0);

std::string to_string(ConstraintKind kind);

}  // namespace mwmr
