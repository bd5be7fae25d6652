#pragma once

// Slot-level abstraction of an MWSR token crossbar. Every home node owns one
// waveguide of 64 wavelengths; a token per home grants one sender per slot.
// Tokens carry buffer credits: at the start of every round of N-1 slots the
// home reloads its token with its free buffer space, and every transmission
// spends credits. Without Fast Forward the token visits senders k+1, k+2, ...
// in ring order, one per slot, starting over each round. With Fast Forward it
// skips senders with nothing queued for k and resumes after the last holder.

#include <cstdint>
#include <span>
#include <vector>

#include "mwmr/controller.hpp"
#include "mwmr/model.hpp"

namespace mwmr {

struct TokenState {
    std::vector<NodeId> position;   // next candidate holder, per home
    std::vector<double> credits;    // bits, per home
    std::size_t channels_per_home = 64;
    bool ff_enabled = false;

    TokenState() = default;
    TokenState(std::size_t n_nodes, std::size_t channels_per_home, bool ff);
};

/// Queued bits per (sender, home), dense row-major, plus the homes' free buffers.
struct CoronaRequests {
    std::span<const double> queued_bits;  // N * N
    std::span<const double> free_buffer;  // N
};

/// One slot of token arbitration. Grants use the home's dedicated waveguide:
/// channels (k, 0..c-1) for home k. Each grant's rate covers min(queue, 64 R
/// delta, credits) rounded up to whole channels; `sent_bits` receives the
/// exact amount per grant.
SlotSchedule corona_allocate(const CoronaRequests& requests, TokenState& state, const CrossbarConfig& cfg,
                             std::uint64_t t, std::vector<double>* sent_bits = nullptr);

}  // namespace mwmr
