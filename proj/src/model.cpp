#include "mwmr/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mwmr/errors.hpp"

namespace mwmr {

void CrossbarConfig::validate() const {
    if (n_nodes < 1 || n_waveguides < 1 || wavelengths_per_waveguide < 1) {
        throw InvalidInput("crossbar counts must be >= 1");
    }
    if (!(wavelength_rate > 0.0)) throw InvalidInput("wavelength_rate must be > 0");
    if (!(slot_length > 0.0)) throw InvalidInput("slot_length must be > 0");
}

void NodeState::validate() const {
    if (!(drain_rate >= 0.0) || !(free_buffer >= 0.0)) {
        throw InvalidInput("node drain rate and free buffer must be >= 0");
    }
}

double receiver_capacity(const NodeState& node, double slot_length) {
    return node.drain_rate + node.free_buffer / slot_length;
}

TrafficMatrix::TrafficMatrix(std::size_t n_nodes)
    : n_(n_nodes), offsets_(n_nodes + 1, 0), slot_of_(n_nodes * n_nodes, -1) {}

TrafficMatrix::TrafficMatrix(std::size_t n_nodes, std::span<const Connection> connections)
    : TrafficMatrix(n_nodes) {
    entries_.assign(connections.begin(), connections.end());
    for (const auto& c : entries_) {
        if (c.sender >= n_ || c.receiver >= n_) throw InvalidInput("connection id out of range");
        if (c.sender == c.receiver) throw InvalidInput("self-traffic is not allowed");
        if (!(c.weight > 0.0) || !std::isfinite(c.weight)) {
            throw InvalidInput("connection weights must be positive");
        }
    }
    std::sort(entries_.begin(), entries_.end(), [](const Connection& a, const Connection& b) {
        return a.receiver != b.receiver ? a.receiver < b.receiver : a.sender < b.sender;
    });
    inv_weights_.reserve(entries_.size());
    dense_.reserve(entries_.size());
    for (std::size_t e = 0; e < entries_.size(); ++e) {
        const auto& c = entries_[e];
        const std::size_t d = c.sender * n_ + c.receiver;
        if (slot_of_[d] >= 0) throw InvalidInput("duplicate connection");
        slot_of_[d] = static_cast<std::int32_t>(e);
        dense_.push_back(d);
        inv_weights_.push_back(1.0 / c.weight);
        ++offsets_[c.receiver + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
}

bool TrafficMatrix::active(NodeId sender, NodeId receiver) const {
    return slot_of_.at(sender * n_ + receiver) >= 0;
}

double TrafficMatrix::weight(NodeId sender, NodeId receiver) const {
    const auto e = slot_of_.at(sender * n_ + receiver);
    return e < 0 ? 0.0 : entries_[static_cast<std::size_t>(e)].weight;
}

double TrafficMatrix::inverse_weight(NodeId sender, NodeId receiver) const {
    const auto e = slot_of_.at(sender * n_ + receiver);
    return e < 0 ? 0.0 : inv_weights_[static_cast<std::size_t>(e)];
}

double TrafficMatrix::density() const noexcept {
    if (n_ == 0) return 0.0;
    return static_cast<double>(entries_.size()) / static_cast<double>(n_ * n_);
}

std::size_t TrafficMatrix::in_degree(NodeId receiver) const {
    return offsets_.at(receiver + 1) - offsets_.at(receiver);
}

double RateAllocation::total() const noexcept {
    return std::accumulate(x_.begin(), x_.end(), 0.0);
}

void UtilitySpec::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidInput("alpha must be > 0");
}

double utility(double x, const UtilitySpec& spec, double weight) {
    if (!(x > 0.0)) throw DomainError("utility is undefined for x <= 0");
    if (spec.alpha == 1.0) return weight * std::log(x);
    const double e = 1.0 - spec.alpha;
    return weight * std::pow(x, e) / e;
}

double marginal_utility(double x, const UtilitySpec& spec, double weight) {
    if (!(x > 0.0)) throw DomainError("marginal utility is undefined for x <= 0");
    if (spec.alpha == 1.0) return weight / x;
    return weight * std::pow(x, -spec.alpha);
}

double utility_curvature(double x, const UtilitySpec& spec, double weight) {
    if (!(x > 0.0)) throw DomainError("utility curvature is undefined for x <= 0");
    if (spec.alpha == 1.0) return -weight / (x * x);
    return -spec.alpha * weight * std::pow(x, -spec.alpha - 1.0);
}

double total_utility(const RateAllocation& x, const TrafficMatrix& traffic, const UtilitySpec& spec) {
    if (x.size() != traffic.size()) throw DimensionMismatch("allocation and traffic sizes differ");
    double sum = 0.0;
    for (const auto& c : traffic.connections()) {
        sum += utility(x(c.sender, c.receiver), spec, c.weight);
    }
    return sum;
}

FeasibilityReport check_feasible(const RateAllocation& x, const TrafficMatrix& traffic,
                                 std::span<const NodeState> nodes, const CrossbarConfig& cfg,
                                 double rel_tolerance) {
    const std::size_t n = traffic.size();
    if (x.size() != n || nodes.size() != n || cfg.n_nodes != n) {
        throw DimensionMismatch("feasibility check: sizes differ from N");
    }
    FeasibilityReport report;
    report.receiver_slack.assign(n, 0.0);

    const auto values = x.values();
    for (std::size_t d = 0; d < values.size(); ++d) {
        if (values[d] < 0.0) {
            report.ok = false;
            report.violations.push_back({ConstraintKind::nonnegative, d, values[d]});
        }
    }

    std::vector<double> load(n, 0.0);
    double total = 0.0;
    for (const auto& c : traffic.connections()) {
        const double v = x(c.sender, c.receiver);
        load[c.receiver] += v;
        total += v;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const double rhs = receiver_capacity(nodes[k], cfg.slot_length);
        report.receiver_slack[k] = rhs - load[k];
        if (load[k] > rhs * (1.0 + rel_tolerance)) {
            report.ok = false;
            report.violations.push_back({ConstraintKind::receiver, k, report.receiver_slack[k]});
        }
    }
    const double cap = cfg.total_capacity();
    report.capacity_slack = cap - total;
    if (total > cap * (1.0 + rel_tolerance)) {
        report.ok = false;
        report.violations.push_back({ConstraintKind::total_capacity, 0, report.capacity_slack});
    }
    return report;
}

std::string to_string(ConstraintKind kind) {
    switch (kind) {
        case ConstraintKind::nonnegative: return "nonnegative";
        case ConstraintKind::receiver: return "receiver";
        case ConstraintKind::total_capacity: return "total_capacity";
    }
    return "unknown";
}

}  // namespace mwmr
