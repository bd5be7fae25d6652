#pragma once

#include <cstdint>
#include <span>

#include "mwmr/model.hpp"

namespace mwmr {

struct TrimOutcome {
    RateAllocation x;                // every active entry a whole multiple of R
    double residual_start = 0.0;     // S = sum (x* mod R), bits/s
    double residual_left = 0.0;      // S still unassigned when the loop stopped, bits/s
    std::size_t increments_applied = 0;
    std::uint64_t rng_seed = 0;
};

/// Rounds every rate down to a whole number of wavelengths, then hands the
/// removed mass back one wavelength at a time. Each increment goes to a
/// connection whose rate was rounded down and whose receiver can absorb
/// another R, picked with probability proportional to its remaining deficit
/// x*_nk - xhat_nk. Stops when less than one R of residual remains or no
/// connection qualifies. Deterministic for a given seed.
TrimOutcome trim(const RateAllocation& optimal, const TrafficMatrix& traffic, std::span<const NodeState> nodes,
                 const CrossbarConfig& cfg, std::uint64_t seed);

}  // namespace mwmr
