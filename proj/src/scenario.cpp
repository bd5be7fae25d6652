#include "mwmr/scenario.hpp"

#include <fstream>
#include <initializer_list>
#include <string>

#include "mwmr/errors.hpp"

namespace mwmr {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) throw InvalidInput(std::string(where) + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) throw InvalidInput("unknown key '" + key + "' in " + std::string(where));
    }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("bad value for '") + key + "': " + e.what());
    }
}

NodeState parse_node(const json& j) {
    reject_unknown(j, "node", {"drain_rate_bps", "buffer_bits"});
    NodeState s{};
    read(j, "drain_rate_bps", s.drain_rate);
    read(j, "buffer_bits", s.free_buffer);
    s.validate();
    return s;
}

WeightProfile parse_weight_profile(const json& j, std::size_t n) {
    if (j.is_string()) return weights_by_name(j.get<std::string>(), n);
    if (j.is_array() && !j.empty() && j.front().is_number()) {
        WeightProfile p{j.get<std::vector<double>>()};
        if (p.size() != n) throw DimensionMismatch("per-sender weight list must have N entries");
        return p;
    }
    throw InvalidInput("weights must be \"equal\", \"categories\" or a list of N numbers");
}

TrafficMatrix parse_matrix(const json& traffic, std::size_t n) {
    const json& m = traffic.at("matrix");
    if (!m.is_array() || m.size() != n) throw DimensionMismatch("traffic matrix must have N rows");
    std::vector<std::vector<double>> w;
    std::optional<WeightProfile> profile;
    if (traffic.contains("weights")) {
        const json& wj = traffic.at("weights");
        if (wj.is_array() && !wj.empty() && wj.front().is_array()) {
            w = wj.get<std::vector<std::vector<double>>>();
            if (w.size() != n) throw DimensionMismatch("weight matrix must have N rows");
        } else {
            profile = parse_weight_profile(wj, n);
        }
    }
    std::vector<Connection> conns;
    for (std::size_t s = 0; s < n; ++s) {
        const auto row = m.at(s).get<std::vector<int>>();
        if (row.size() != n) throw DimensionMismatch("traffic matrix must have N columns");
        for (std::size_t k = 0; k < n; ++k) {
            if (row[k] != 0 && row[k] != 1) throw InvalidInput("traffic matrix entries must be 0 or 1");
            if (row[k] == 0) continue;
            double weight = 1.0;
            if (!w.empty()) {
                if (w[s].size() != n) throw DimensionMismatch("weight matrix must have N columns");
                weight = w[s][k];
            } else if (profile) {
                weight = (*profile)[s];
            }
            conns.push_back({s, k, weight});
        }
    }
    return TrafficMatrix(n, conns);
}

}  // namespace

WeightProfile weights_by_name(std::string_view name, std::size_t n_nodes) {
    if (name == "equal") return equal_weights(n_nodes);
    if (name == "categories") return category_weights(n_nodes);
    throw InvalidInput("unknown weight profile '" + std::string(name) + "' (expected equal or categories)");
}

Scenario parse_scenario(const json& doc, const std::filesystem::path& base_dir) {
    reject_unknown(doc, "scenario",
                   {"n_nodes", "n_waveguides", "wavelengths_per_waveguide", "wavelength_rate_bps", "slot_length_s",
                    "nodes", "traffic", "simulation", "utility", "solver", "control", "description"});
    Scenario sc;
    auto& cfg = sc.sim.crossbar;
    read(doc, "n_nodes", cfg.n_nodes);
    read(doc, "n_waveguides", cfg.n_waveguides);
    read(doc, "wavelengths_per_waveguide", cfg.wavelengths_per_waveguide);
    read(doc, "wavelength_rate_bps", cfg.wavelength_rate);
    read(doc, "slot_length_s", cfg.slot_length);
    cfg.validate();
    const std::size_t n = cfg.n_nodes;

    sc.sim.nodes = default_nodes(cfg);
    if (doc.contains("nodes")) {
        const json& nodes = doc.at("nodes");
        if (!nodes.is_array()) throw InvalidInput("nodes must be a list");
        if (nodes.size() == 1) {
            sc.sim.nodes.assign(n, parse_node(nodes.front()));
        } else if (nodes.size() == n) {
            for (std::size_t i = 0; i < n; ++i) sc.sim.nodes[i] = parse_node(nodes[i]);
        } else {
            throw DimensionMismatch("nodes must hold 1 or N entries");
        }
    }

    if (doc.contains("traffic")) {
        const json& t = doc.at("traffic");
        reject_unknown(t, "traffic", {"pattern", "matrix", "weights", "hotspot_target", "trace_file", "clock_hz"});
        if (t.contains("pattern")) sc.sim.pattern = parse_pattern(t.at("pattern").get<std::string>());
        read(t, "hotspot_target", sc.sim.hotspot_target);
        if (t.contains("matrix")) sc.matrix = parse_matrix(t, n);
        if (t.contains("weights")) {
            const json& wj = t.at("weights");
            if (!(wj.is_array() && !wj.empty() && wj.front().is_array())) sc.sim.weights = parse_weight_profile(wj, n);
        }
        if (sc.sim.pattern == Pattern::trace) {
            if (!t.contains("trace_file")) throw InvalidInput("trace pattern needs trace_file");
            std::filesystem::path p = t.at("trace_file").get<std::string>();
            if (p.is_relative()) p = base_dir / p;
            double clock = kDefaultClockHz;
            read(t, "clock_hz", clock);
            sc.sim.trace = load_trace(p, n, cfg.slot_length, clock);
        }
    }

    if (doc.contains("simulation")) {
        const json& s = doc.at("simulation");
        reject_unknown(s, "simulation",
                       {"slots", "warmup_fraction", "load", "seed", "allocator", "pipelined", "packet_bits"});
        read(s, "slots", sc.sim.slots);
        read(s, "warmup_fraction", sc.sim.warmup_fraction);
        read(s, "load", sc.sim.load);
        read(s, "seed", sc.sim.seed);
        read(s, "pipelined", sc.sim.pipelined);
        read(s, "packet_bits", sc.sim.packet_bits);
        if (s.contains("allocator")) sc.sim.allocator = parse_allocator(s.at("allocator").get<std::string>());
    }

    if (doc.contains("utility")) {
        const json& u = doc.at("utility");
        reject_unknown(u, "utility", {"alpha"});
        read(u, "alpha", sc.sim.controller.utility.alpha);
    }

    if (doc.contains("solver")) {
        const json& s = doc.at("solver");
        reject_unknown(s, "solver", {"d", "epsilon", "max_iterations", "fixed_iterations", "initial_rate_fraction",
                                     "lambda_floor", "policy", "threshold", "backend"});
        auto& p = sc.sim.controller.solver;
        read(s, "d", p.step_constant);
        read(s, "epsilon", p.epsilon);
        read(s, "max_iterations", p.max_iterations);
        read(s, "initial_rate_fraction", p.initial_rate_fraction);
        read(s, "lambda_floor", p.lambda_floor);
        if (s.contains("fixed_iterations")) p.fixed_iterations = s.at("fixed_iterations").get<int>();
        if (s.contains("backend")) p.backend = kernels::parse_backend(s.at("backend").get<std::string>());
        if (s.contains("policy")) sc.sim.controller.policy = parse_policy(s.at("policy").get<std::string>());
        read(s, "threshold", sc.sim.controller.policy.threshold);
    }

    if (doc.contains("control")) {
        const json& c = doc.at("control");
        reject_unknown(c, "control", {"request_bits", "result_bits", "overhead_s", "bandwidth_bps", "waveguides"});
        read(c, "request_bits", sc.control.request_size);
        read(c, "result_bits", sc.control.result_size);
        read(c, "overhead_s", sc.control.controller_overhead);
        if (c.contains("bandwidth_bps")) sc.control.control_bandwidth = c.at("bandwidth_bps").get<double>();
        if (c.contains("waveguides")) sc.control.control_waveguides = c.at("waveguides").get<std::size_t>();
    }
    sc.sim.controller_overhead = sc.control.controller_overhead;
    sc.control.validate(cfg);
    sc.sim.validate();
    return sc;
}

Scenario load_scenario(std::istream& in, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidInput(std::string("scenario is not valid JSON: ") + e.what());
    }
    return parse_scenario(doc, base_dir);
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open scenario file " + path.string());
    return load_scenario(in, path.parent_path());
}

}  // namespace mwmr
