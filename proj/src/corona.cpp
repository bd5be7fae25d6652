#include "mwmr/corona.hpp"

#include <algorithm>
#include <cmath>

#include "mwmr/errors.hpp"

namespace mwmr {

TokenState::TokenState(std::size_t n_nodes, std::size_t channels, bool ff)
    : position(n_nodes), credits(n_nodes, 0.0), channels_per_home(channels), ff_enabled(ff) {
    for (std::size_t k = 0; k < n_nodes; ++k) position[k] = (k + 1) % n_nodes;
}

SlotSchedule corona_allocate(const CoronaRequests& requests, TokenState& state, const CrossbarConfig& cfg,
                             std::uint64_t t, std::vector<double>* sent_bits) {
    const std::size_t n = cfg.n_nodes;
    if (n < 2) throw InvalidInput("token arbitration needs at least 2 nodes");
    if (requests.queued_bits.size() != n * n || requests.free_buffer.size() != n || state.credits.size() != n ||
        state.position.size() != n) {
        throw DimensionMismatch("corona_allocate: sizes differ from N");
    }
    if (cfg.n_waveguides < n || state.channels_per_home > cfg.wavelengths_per_waveguide) {
        throw InvalidInput("token arbitration needs one dedicated waveguide per home node");
    }
    const std::size_t ring = n - 1;
    const double channel_bits = cfg.channel_bits_per_slot();
    const double budget = static_cast<double>(state.channels_per_home) * channel_bits;
    const bool new_round = t % ring == 0;

    SlotSchedule schedule;
    schedule.t = t;
    if (sent_bits) sent_bits->clear();

    for (NodeId k = 0; k < n; ++k) {
        if (new_round) {
            state.credits[k] = std::max(requests.free_buffer[k], 0.0);
            if (!state.ff_enabled) state.position[k] = (k + 1) % n;
        }
        if (state.credits[k] <= 0.0) continue;

        NodeId holder = n;
        if (state.ff_enabled) {
            NodeId cand = state.position[k];
            for (std::size_t step = 0; step < n; ++step, cand = (cand + 1) % n) {
                if (cand == k) continue;
                if (requests.queued_bits[cand * n + k] > 0.0) {
                    holder = cand;
                    break;
                }
            }
            if (holder == n) continue;
            state.position[k] = (holder + 1) % n == k ? (k + 1) % n : (holder + 1) % n;
        } else {
            holder = (k + 1 + static_cast<std::size_t>(t % ring)) % n;
        }

        const double sent = std::min({requests.queued_bits[holder * n + k], budget, state.credits[k]});
        if (!(sent > 0.0)) continue;
        state.credits[k] -= sent;

        auto count = static_cast<std::size_t>(std::ceil(sent / channel_bits - 1e-9));
        count = std::clamp<std::size_t>(count, 1, state.channels_per_home);
        ChannelGrant g{holder, k, {}, static_cast<double>(count) * cfg.wavelength_rate};
        g.channels.reserve(count);
        for (std::size_t j = 0; j < count; ++j) g.channels.push_back({k, j});
        schedule.grants.push_back(std::move(g));
        if (sent_bits) sent_bits->push_back(sent);
    }
    return schedule;
}

}  // namespace mwmr
