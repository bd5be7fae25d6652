#pragma once

// JSON scenario files. Example:
//
//   {
//     "n_nodes": 64, "n_waveguides": 64, "wavelengths_per_waveguide": 64,
//     "wavelength_rate_bps": 1e10, "slot_length_s": 6e-9,
//     "nodes": [{"drain_rate_bps": 5.12e12, "buffer_bits": 81920}, ...],
//     "traffic": {"pattern": "hotspot", "hotspot_target": 0, "weights": "categories"},
//     "simulation": {"slots": 2000, "load": 0.5, "seed": 1, "allocator": "mwmr-ac"},
//     "utility": {"alpha": 1},
//     "solver": {"d": 5, "epsilon": 1e-11, "policy": "surplus"},
//     "control": {"request_bits": 64, "result_bits": 56, "overhead_s": 5.4e-9}
//   }
//
// "nodes" may be omitted (defaults per node) or hold a single entry applied
// to every node. "traffic" may instead carry "matrix": an N x N 0/1 array,
// with "weights" as "equal", "categories", a per-sender list, or an N x N array.

#include <filesystem>
#include <istream>
#include <optional>

#include "json.hpp"

#include "mwmr/controller.hpp"
#include "mwmr/simulator.hpp"

namespace mwmr {

struct Scenario {
    SimConfig sim;
    std::optional<TrafficMatrix> matrix;  // explicit demand pattern, if given
    ControlChannelModel control;
};

Scenario parse_scenario(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
Scenario load_scenario(std::istream& in, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

/// "equal" or "categories".
WeightProfile weights_by_name(std::string_view name, std::size_t n_nodes);

}  // namespace mwmr
