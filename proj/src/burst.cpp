#include "mwmr/burst.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mwmr/errors.hpp"

namespace mwmr {

namespace {

void check_inputs(const TrafficMatrix& traffic, std::span<const NodeState> nodes, const CrossbarConfig& cfg) {
    if (nodes.size() != traffic.size() || cfg.n_nodes != traffic.size()) {
        throw DimensionMismatch("burst solver: sizes differ from N");
    }
    if (traffic.empty()) throw InvalidInput("traffic matrix has no active connections");
}

// z_nk = w_nk / (sum_j w_jk) * (r_k + M_k/delta), written in place.
double proportional_split(const TrafficMatrix& traffic, std::span<const NodeState> nodes,
                          const CrossbarConfig& cfg, RateAllocation* out) {
    const auto conns = traffic.connections();
    const auto offsets = traffic.receiver_offsets();
    double total = 0.0;
    std::vector<double> z;
    for (std::size_t k = 0; k < traffic.size(); ++k) {
        if (offsets[k + 1] == offsets[k]) continue;
        double weight_sum = 0.0;
        for (std::size_t e = offsets[k]; e < offsets[k + 1]; ++e) weight_sum += conns[e].weight;
        const double cap = receiver_capacity(nodes[k], cfg.slot_length);
        z.clear();
        for (std::size_t e = offsets[k]; e < offsets[k + 1]; ++e) z.push_back(conns[e].weight / weight_sum * cap);
        // Rounding can push the shares an ulp past the capacity; step them down.
        while (std::accumulate(z.begin(), z.end(), 0.0) > cap) {
            for (auto& v : z) v = std::nextafter(v, 0.0);
        }
        for (std::size_t e = offsets[k]; e < offsets[k + 1]; ++e) {
            total += z[e - offsets[k]];
            if (out) (*out)(conns[e].sender, k) = z[e - offsets[k]];
        }
    }
    return total;
}

}  // namespace

double burst_surplus(const TrafficMatrix& traffic, std::span<const NodeState> nodes, const CrossbarConfig& cfg) {
    check_inputs(traffic, nodes, cfg);
    return cfg.total_capacity() - proportional_split(traffic, nodes, cfg, nullptr);
}

BurstResult solve_burst(const TrafficMatrix& traffic, std::span<const NodeState> nodes, const CrossbarConfig& cfg) {
    check_inputs(traffic, nodes, cfg);
    BurstResult result{RateAllocation(traffic.size()), 0.0, BurstRegime::under_utilized};
    const double cap = cfg.total_capacity();
    result.surplus = cap - proportional_split(traffic, nodes, cfg, &result.x);
    if (result.surplus >= 0.0) return result;

    result.regime = BurstRegime::fully_utilized;
    const double uniform = cap / static_cast<double>(traffic.active_count());
    for (const auto& c : traffic.connections()) {
        auto& v = result.x(c.sender, c.receiver);
        v = std::min(v, uniform);
    }
    return result;
}

}  // namespace mwmr
