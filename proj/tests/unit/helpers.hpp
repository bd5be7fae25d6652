#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mwmr/model.hpp"

namespace testutil {

// Crossbar with R = 1 b/s and delta = 1 s so capacities read as plain numbers.
inline mwmr::CrossbarConfig unit_crossbar(std::size_t n, std::size_t channels, double rate = 1.0) {
    mwmr::CrossbarConfig cfg;
    cfg.n_nodes = n;
    cfg.n_waveguides = 1;
    cfg.wavelengths_per_waveguide = channels;
    cfg.wavelength_rate = rate;
    cfg.slot_length = 1.0;
    return cfg;
}

// Nodes whose receiver capacity is exactly `cap` (all drain, no buffer).
inline std::vector<mwmr::NodeState> capped_nodes(std::size_t n, double cap) {
    return std::vector<mwmr::NodeState>(n, mwmr::NodeState{cap, 0.0});
}

struct SmallInstance {
    mwmr::CrossbarConfig cfg;
    std::vector<mwmr::NodeState> nodes;
    mwmr::TrafficMatrix traffic;
};

// Up to `max_conn` random connections among `n` nodes, integer-ish
// capacities, random weights. R = 1, delta = 1.
inline SmallInstance small_instance(std::mt19937_64& rng, std::size_t n, std::size_t max_conn,
                                    std::size_t channels) {
    std::uniform_int_distribution<std::size_t> node(0, n - 1), count(1, max_conn);
    std::uniform_real_distribution<double> cap(5.0, 60.0), w(0.1, 1.0);
    SmallInstance s;
    s.cfg = unit_crossbar(n, channels);
    for (std::size_t k = 0; k < n; ++k) s.nodes.push_back({cap(rng), 0.0});
    std::vector<mwmr::Connection> conns;
    const std::size_t want = count(rng);
    std::vector<char> used(n * n, 0);
    while (conns.size() < want) {
        const auto a = node(rng), b = node(rng);
        if (a == b || used[a * n + b]) continue;
        used[a * n + b] = 1;
        conns.push_back({a, b, w(rng)});
    }
    s.traffic = mwmr::TrafficMatrix(n, conns);
    return s;
}

}  // namespace testutil
