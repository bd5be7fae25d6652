#include "mwmr/traffic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

#include "mwmr/errors.hpp"

namespace mwmr {

WeightProfile equal_weights(std::size_t n) {
    return {std::vector<double>(n, 1.0)};
}

std::vector<int> category_of(std::size_t n) {
    if (n < 3) throw InvalidInput("category weights need at least 3 nodes");
    // The remainder goes to the later ranges: 64 -> 21, 21, 22.
    const std::size_t base = n / 3;
    const std::size_t rem = n % 3;
    const std::size_t first_end = base;
    const std::size_t second_end = first_end + base + (rem >= 2 ? 1 : 0);
    std::vector<int> cls(n);
    for (std::size_t i = 0; i < n; ++i) cls[i] = i < first_end ? 0 : (i < second_end ? 1 : 2);
    return cls;
}

WeightProfile category_weights(std::size_t n) {
    const auto cls = category_of(n);
    WeightProfile p;
    p.weight.reserve(n);
    for (int c : cls) p.weight.push_back(static_cast<double>(c + 1));
    return p;
}

Pattern parse_pattern(std::string_view name) {
    if (name == "uniform") return Pattern::uniform;
    if (name == "hotspot" || name == "hot-spot") return Pattern::hotspot;
    if (name == "trace") return Pattern::trace;
    throw InvalidInput("unknown traffic pattern '" + std::string(name) + "'");
}

std::string_view to_string(Pattern p) {
    switch (p) {
        case Pattern::uniform: return "uniform";
        case Pattern::hotspot: return "hotspot";
        case Pattern::trace: return "trace";
    }
    return "?";
}

namespace {

double packets_per_source(const CrossbarConfig& cfg, double load, std::size_t sources, double packet_bits) {
    if (!(load >= 0.0 && load <= 1.0)) throw InvalidInput("offered load must lie in [0, 1]");
    if (sources == 0) return 0.0;
    return load * cfg.total_capacity() * cfg.slot_length / (packet_bits * static_cast<double>(sources));
}

std::size_t draw_count(double mean, Rng& rng) {
    const double whole = std::floor(mean);
    std::size_t count = static_cast<std::size_t>(whole);
    const double frac = mean - whole;
    if (frac > 0.0 && std::uniform_real_distribution<double>(0.0, 1.0)(rng) < frac) ++count;
    return count;
}

}  // namespace

UniformSource::UniformSource(const CrossbarConfig& cfg, double load, std::uint64_t seed, double packet_bits)
    : n_(cfg.n_nodes),
      per_node_(packets_per_source(cfg, load, cfg.n_nodes, packet_bits)),
      bits_(packet_bits),
      rng_(make_rng(seed)) {
    if (n_ < 2) throw InvalidInput("uniform traffic needs at least 2 nodes");
}

void UniformSource::emit(std::uint64_t slot, std::vector<TraceRecord>& out) {
    if (per_node_ == 0.0) return;
    std::uniform_int_distribution<std::size_t> other(0, n_ - 2);
    for (NodeId src = 0; src < n_; ++src) {
        const std::size_t count = draw_count(per_node_, rng_);
        for (std::size_t i = 0; i < count; ++i) {
            NodeId dst = other(rng_);
            if (dst >= src) ++dst;
            out.push_back({slot, src, dst, bits_});
        }
    }
}

HotspotSource::HotspotSource(const CrossbarConfig& cfg, double load, NodeId target, std::uint64_t seed,
                             double packet_bits)
    : n_(cfg.n_nodes),
      target_(target),
      per_node_(packets_per_source(cfg, load, cfg.n_nodes > 0 ? cfg.n_nodes - 1 : 0, packet_bits)),
      bits_(packet_bits),
      rng_(make_rng(seed)) {
    if (target >= n_) throw InvalidInput("hot-spot target out of range");
}

void HotspotSource::emit(std::uint64_t slot, std::vector<TraceRecord>& out) {
    if (per_node_ == 0.0) return;
    for (NodeId src = 0; src < n_; ++src) {
        if (src == target_) continue;
        const std::size_t count = draw_count(per_node_, rng_);
        for (std::size_t i = 0; i < count; ++i) out.push_back({slot, src, target_, bits_});
    }
}

ReplaySource::ReplaySource(std::vector<TraceRecord> records) : records_(std::move(records)) {
    std::stable_sort(records_.begin(), records_.end(),
                     [](const TraceRecord& a, const TraceRecord& b) { return a.slot < b.slot; });
}

void ReplaySource::emit(std::uint64_t slot, std::vector<TraceRecord>& out) {
    while (next_ < records_.size() && records_[next_].slot < slot) ++next_;
    while (next_ < records_.size() && records_[next_].slot == slot) out.push_back(records_[next_++]);
}

std::vector<TraceRecord> gen_uniform(double load, const CrossbarConfig& cfg, std::uint64_t seed, std::uint64_t slots) {
    UniformSource src(cfg, load, seed);
    std::vector<TraceRecord> out;
    for (std::uint64_t t = 0; t < slots; ++t) src.emit(t, out);
    return out;
}

std::vector<TraceRecord> gen_hotspot(double load, const CrossbarConfig& cfg, NodeId target, std::uint64_t seed,
                                     std::uint64_t slots) {
    HotspotSource src(cfg, load, target, seed);
    std::vector<TraceRecord> out;
    for (std::uint64_t t = 0; t < slots; ++t) src.emit(t, out);
    return out;
}

namespace {

std::string_view trim_ws(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_field(std::string_view field, const char* name, std::size_t line) {
    field = trim_ws(field);
    T value{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw ParseError("cannot parse " + std::string(name) + " from '" + std::string(field) + "'", line);
    }
    return value;
}

}  // namespace

std::vector<TraceRecord> load_trace(std::istream& in, std::size_t n_nodes, double slot_length, double clock_hz) {
    if (!(slot_length > 0.0) || !(clock_hz > 0.0)) throw InvalidInput("slot length and clock must be > 0");
    const double cycles_per_slot = clock_hz * slot_length;
    std::vector<TraceRecord> records;
    std::string raw;
    std::size_t line = 0;
    bool header_seen = false;
    while (std::getline(in, raw)) {
        ++line;
        const std::string_view text = trim_ws(raw);
        if (text.empty() || text.front() == '#') continue;
        if (!header_seen) {
            header_seen = true;
            if (text != "cycle,src,dst,bits") throw ParseError("expected header 'cycle,src,dst,bits'", line);
            continue;
        }
        std::string_view fields[4];
        std::string_view rest = text;
        for (int i = 0; i < 4; ++i) {
            const auto comma = rest.find(',');
            if ((i < 3) == (comma == std::string_view::npos)) throw ParseError("expected 4 comma-separated fields", line);
            fields[i] = rest.substr(0, comma);
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
        const auto cycle = parse_field<std::uint64_t>(fields[0], "cycle", line);
        const auto src = parse_field<std::size_t>(fields[1], "src", line);
        const auto dst = parse_field<std::size_t>(fields[2], "dst", line);
        const auto bits = parse_field<double>(fields[3], "bits", line);
        if (src >= n_nodes || dst >= n_nodes) throw ParseError("node id out of range for N = " + std::to_string(n_nodes), line);
        if (src == dst) throw ParseError("self-traffic", line);
        if (!(bits > 0.0)) throw ParseError("bits must be > 0", line);
        const auto slot = static_cast<std::uint64_t>(std::floor(static_cast<double>(cycle) / cycles_per_slot + 1e-9));
        records.push_back({slot, src, dst, bits});
    }
    std::stable_sort(records.begin(), records.end(),
                     [](const TraceRecord& a, const TraceRecord& b) { return a.slot < b.slot; });
    return records;
}

std::vector<TraceRecord> load_trace(const std::filesystem::path& path, std::size_t n_nodes, double slot_length,
                                    double clock_hz) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open trace file " + path.string());
    return load_trace(in, n_nodes, slot_length, clock_hz);
}

}  // namespace mwmr
