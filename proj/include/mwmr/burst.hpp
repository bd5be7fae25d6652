#pragma once

#include <span>

#include "mwmr/model.hpp"

namespace mwmr {

enum class BurstRegime { under_utilized, fully_utilized };

struct BurstResult {
    RateAllocation x;
    double surplus = 0.0;  // C R - sum z, may be negative
    BurstRegime regime = BurstRegime::under_utilized;
};

/// Non-iterative allocation: every receiver's capacity is split among its
/// senders in proportion to their weights. If the split oversubscribes the
/// wavelength pool, each rate is capped at C R / (number of active connections).
/// Optimal for alpha = 1 whenever the surplus is nonnegative.
BurstResult solve_burst(const TrafficMatrix& traffic, std::span<const NodeState> nodes, const CrossbarConfig& cfg);

/// Surplus C R - sum z without building the allocation.
double burst_surplus(const TrafficMatrix& traffic, std::span<const NodeState> nodes, const CrossbarConfig& cfg);

}  // namespace mwmr
