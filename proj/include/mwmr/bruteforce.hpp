#pragma once

// Exhaustive reference solver for tiny instances. Test use only.

#include <span>

#include "mwmr/model.hpp"

namespace mwmr {

inline constexpr std::size_t kBruteForceMaxConnections = 8;

struct BruteForceResult {
    RateAllocation x;
    double objective = 0.0;
    double grid_step = 0.0;  // largest coarse step over all coordinates, bits/s
};

/// Largest per-coordinate resolution (at most 40) keeping the coarse grid
/// under about two million points.
int auto_resolution(std::size_t dims);

/// Coarse grid with `resolution` points per active connection, each on
/// (0, min(receiver capacity, C R)], followed by a shrinking 5-point pattern
/// search around the best feasible point. `resolution` 0 picks
/// auto_resolution. Throws InstanceTooLarge above kBruteForceMaxConnections;
/// an empty matrix yields all zeros.
BruteForceResult solve_bruteforce(const TrafficMatrix& traffic, std::span<const NodeState> nodes,
                                  const CrossbarConfig& cfg, const UtilitySpec& spec, int resolution = 0);

}  // namespace mwmr
