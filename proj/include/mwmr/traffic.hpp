#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "mwmr/model.hpp"
#include "mwmr/random.hpp"

namespace mwmr {

inline constexpr double kPacketBits = 512.0;
inline constexpr double kDefaultClockHz = 5e9;

struct TraceRecord {
    std::uint64_t slot = 0;
    NodeId source = 0;
    NodeId destination = 0;
    double bits = kPacketBits;
    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// Per-node sender weight; w_nk = weight[n] for every destination k.
struct WeightProfile {
    std::vector<double> weight;

    double operator[](NodeId n) const { return weight[n]; }
    std::size_t size() const noexcept { return weight.size(); }
};

WeightProfile equal_weights(std::size_t n);
/// Three contiguous, near-equal ranges weighted 1, 2, 3; later ranges take
/// the remainder (N = 64 gives 21, 21, 22).
WeightProfile category_weights(std::size_t n);
/// 0, 1 or 2 for each node, matching category_weights.
std::vector<int> category_of(std::size_t n);

enum class Pattern { uniform, hotspot, trace };

Pattern parse_pattern(std::string_view name);
std::string_view to_string(Pattern p);

/// Produces the packets created at the start of each slot.
class TrafficSource {
public:
    virtual ~TrafficSource() = default;
    /// Appends every record of `slot` to `out`. Slots must be requested in order.
    virtual void emit(std::uint64_t slot, std::vector<TraceRecord>& out) = 0;
};

/// Every node generates floor(m) packets per slot plus one more with
/// probability frac(m), where m makes the aggregate expected rate equal
/// load * C R. Destinations are uniform over the other N-1 nodes.
class UniformSource final : public TrafficSource {
public:
    UniformSource(const CrossbarConfig& cfg, double load, std::uint64_t seed, double packet_bits = kPacketBits);
    void emit(std::uint64_t slot, std::vector<TraceRecord>& out) override;
    double packets_per_node() const noexcept { return per_node_; }

private:
    std::size_t n_;
    double per_node_;
    double bits_;
    Rng rng_;
};

/// Every node except `target` sends only to `target`; aggregate expected
/// rate is load * C R.
class HotspotSource final : public TrafficSource {
public:
    HotspotSource(const CrossbarConfig& cfg, double load, NodeId target, std::uint64_t seed,
                  double packet_bits = kPacketBits);
    void emit(std::uint64_t slot, std::vector<TraceRecord>& out) override;
    double packets_per_node() const noexcept { return per_node_; }

private:
    std::size_t n_;
    NodeId target_;
    double per_node_;
    double bits_;
    Rng rng_;
};

/// Replays a slot-sorted record list.
class ReplaySource final : public TrafficSource {
public:
    explicit ReplaySource(std::vector<TraceRecord> records);
    void emit(std::uint64_t slot, std::vector<TraceRecord>& out) override;

private:
    std::vector<TraceRecord> records_;
    std::size_t next_ = 0;
};

/// Materialized streams over `slots` slots.
std::vector<TraceRecord> gen_uniform(double load, const CrossbarConfig& cfg, std::uint64_t seed, std::uint64_t slots);
std::vector<TraceRecord> gen_hotspot(double load, const CrossbarConfig& cfg, NodeId target, std::uint64_t seed,
                                     std::uint64_t slots);

/// Reads CSV with header `cycle,src,dst,bits`. Cycles map to slots through
/// `clock_hz`. Records come back sorted by slot (stable). Throws ParseError
/// naming the offending line; ids >= n_nodes and self-traffic are errors too.
std::vector<TraceRecord> load_trace(std::istream& in, std::size_t n_nodes, double slot_length,
                                    double clock_hz = kDefaultClockHz);
std::vector<TraceRecord> load_trace(const std::filesystem::path& path, std::size_t n_nodes, double slot_length,
                                    double clock_hz = kDefaultClockHz);

}  // namespace mwmr
