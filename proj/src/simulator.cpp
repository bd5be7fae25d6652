#include "mwmr/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>
#include <string>

#include "mwmr/corona.hpp"
#include "mwmr/errors.hpp"
#include "mwmr/random.hpp"

namespace mwmr {

Allocator parse_allocator(std::string_view name) {
    if (name == "mwmr-ac") return Allocator::mwmr_ac;
    if (name == "corona") return Allocator::corona;
    if (name == "corona-ff") return Allocator::corona_ff;
    throw InvalidInput("unknown allocator '" + std::string(name) + "' (expected mwmr-ac, corona or corona-ff)");
}

std::string_view to_string(Allocator a) {
    switch (a) {
        case Allocator::mwmr_ac: return "mwmr-ac";
        case Allocator::corona: return "corona";
        case Allocator::corona_ff: return "corona-ff";
    }
    return "?";
}

std::vector<NodeState> default_nodes(const CrossbarConfig& cfg) {
    return std::vector<NodeState>(cfg.n_nodes, NodeState{512.0 * cfg.wavelength_rate, 160.0 * kPacketBits});
}

void SimConfig::validate() const {
    crossbar.validate();
    if (nodes.size() != crossbar.n_nodes) throw DimensionMismatch("simulation needs one node entry per node");
    for (const auto& n : nodes) n.validate();
    if (!weights.weight.empty()) {
        if (weights.size() != crossbar.n_nodes) throw DimensionMismatch("weight profile size differs from N");
        for (double w : weights.weight) {
            if (!(w > 0.0)) throw InvalidInput("weights must be > 0");
        }
    }
    if (!(load >= 0.0 && load <= 1.0)) throw InvalidInput("offered load must lie in [0, 1]");
    if (pattern == Pattern::hotspot && hotspot_target >= crossbar.n_nodes) {
        throw InvalidInput("hot-spot target out of range");
    }
    if (slots == 0) throw InvalidInput("simulation needs at least one slot");
    if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) throw InvalidInput("warmup fraction must lie in [0, 1)");
    if (!(packet_bits > 0.0)) throw InvalidInput("packet size must be > 0");
    controller.utility.validate();
    controller.solver.validate();
}

std::uint64_t SimConfig::warmup_slots() const noexcept {
    return static_cast<std::uint64_t>(std::floor(warmup_fraction * static_cast<double>(slots)));
}

namespace {

// Bits smaller than this are treated as nothing left to send.
constexpr double kBitEpsilon = 1e-6;

struct Packet {
    double created;   // seconds
    double size;      // bits
    double remaining; // bits
};

class Crossbar {
public:
    explicit Crossbar(const SimConfig& c)
        : cfg_(c),
          n_(c.crossbar.n_nodes),
          delta_(c.crossbar.slot_length),
          queues_(n_ * n_),
          queued_bits_(n_ * n_, 0.0),
          occupancy_(n_, 0.0),
          sent_by_(n_, 0.0),
          warmup_(c.warmup_slots()) {}

    SimMetrics run(std::ostream* dump) {
        auto source = make_source();
        std::vector<TraceRecord> arrivals;
        SimMetrics m;
        m.offered_load = cfg_.load;

        if (cfg_.allocator == Allocator::mwmr_ac) {
            planned_bits_.assign(n_ * n_, 0.0);
        } else {
            tokens_ = TokenState(n_, cfg_.crossbar.wavelengths_per_waveguide, cfg_.allocator == Allocator::corona_ff);
        }
        const std::uint64_t trim_root = child_seed(cfg_.seed, 1);

        for (std::uint64_t t = 0; t < cfg_.slots; ++t) {
            arrivals.clear();
            source->emit(t, arrivals);
            enqueue(arrivals, t);

            SlotSample sample;
            sample.t = t;
            if (cfg_.allocator == Allocator::mwmr_ac) {
                // Next slot's schedule is fixed before this slot's data moves.
                SlotSchedule next = plan_next(t, child_seed(trim_root, t));
                if (dump) write_schedule_jsonl(*dump, next);
                sample.solver = next.solver_used;
                sample.iterations = next.solver_iterations;
                if (next.solver_used == SolverKind::iterative) {
                    ++m.iterative_slots;
                    if (!next.converged) ++m.nonconverged_slots;
                }
                sample.bits_sent = transmit_planned(t);
                load_plan(next);
            } else {
                sample.bits_sent = transmit_tokens(t, dump);
            }
            drain(m);

            double fill = 0.0;
            for (std::size_t k = 0; k < n_; ++k) {
                if (cfg_.nodes[k].free_buffer > 0.0) fill = std::max(fill, occupancy_[k] / cfg_.nodes[k].free_buffer);
            }
            m.max_occupancy = std::max(m.max_occupancy, fill);
            if (cfg_.record_time_series) {
                sample.generated = generated_;
                sample.delivered = delivered_;
                sample.max_occupancy = fill;
                count_backlog(sample.queued, sample.in_flight);
                m.series.push_back(sample);
            }
        }

        if (cfg_.pattern == Pattern::trace) {
            // A replayed trace has no nominal load; report what it offered.
            m.offered_load = generated_bits_ / (cfg_.crossbar.total_capacity() * delta_ * static_cast<double>(cfg_.slots));
        }
        m.generated_packets = generated_;
        m.delivered_packets = delivered_;
        m.measured_packets = measured_;
        count_backlog(m.queued_packets, m.in_flight_packets);
        m.mean_latency = measured_ > 0 ? latency_sum_ / static_cast<double>(measured_) : 0.0;
        const double window = static_cast<double>(cfg_.slots - warmup_) * delta_;
        const double denom = cfg_.crossbar.total_capacity() * window;
        m.nodal_throughput.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            m.nodal_throughput[i] = denom > 0.0 ? sent_by_[i] / denom : 0.0;
            m.network_throughput += m.nodal_throughput[i];
        }
        return m;
    }

private:
    std::unique_ptr<TrafficSource> make_source() const {
        const std::uint64_t seed = child_seed(cfg_.seed, 0);
        switch (cfg_.pattern) {
            case Pattern::uniform:
                return std::make_unique<UniformSource>(cfg_.crossbar, cfg_.load, seed, cfg_.packet_bits);
            case Pattern::hotspot:
                return std::make_unique<HotspotSource>(cfg_.crossbar, cfg_.load, cfg_.hotspot_target, seed,
                                                       cfg_.packet_bits);
            case Pattern::trace:
                return std::make_unique<ReplaySource>(cfg_.trace);
        }
        throw InvalidInput("unknown traffic pattern");
    }

    void enqueue(const std::vector<TraceRecord>& arrivals, std::uint64_t t) {
        const double now = static_cast<double>(t) * delta_;
        for (const auto& r : arrivals) {
            if (r.source >= n_ || r.destination >= n_ || r.source == r.destination) {
                throw InvalidInput("traffic record with invalid endpoints");
            }
            const std::size_t idx = r.source * n_ + r.destination;
            queues_[idx].push_back({now, r.bits, r.bits});
            queued_bits_[idx] += r.bits;
            generated_bits_ += r.bits;
            ++generated_;
        }
    }

    double weight_of(NodeId n) const { return cfg_.weights.weight.empty() ? 1.0 : cfg_.weights[n]; }

    SlotSchedule plan_next(std::uint64_t t, std::uint64_t seed) {
        std::vector<double> inbound(n_, 0.0);
        for (std::size_t idx : planned_pairs_) inbound[idx % n_] += planned_bits_[idx];

        std::vector<SlotRequest> requests(n_);
        for (NodeId s = 0; s < n_; ++s) {
            auto& r = requests[s];
            r.sender = s;
            const double size = cfg_.nodes[s].free_buffer;
            const double drain = cfg_.nodes[s].drain_rate;
            // Worst case fill at the end of the current slot.
            const double expected = std::max(0.0, occupancy_[s] + inbound[s] - drain * delta_);
            r.free_buffer = std::max(0.0, size - expected);
            r.drain_rate = drain;
            for (NodeId k = 0; k < n_; ++k) {
                const std::size_t idx = s * n_ + k;
                if (queued_bits_[idx] - planned_bits_[idx] > kBitEpsilon) {
                    r.destinations.push_back({k, weight_of(s)});
                }
            }
        }
        return run_slot(requests, cfg_.crossbar, cfg_.controller, t + 1, seed);
    }

    void load_plan(const SlotSchedule& schedule) {
        for (std::size_t idx : planned_pairs_) planned_bits_[idx] = 0.0;
        planned_pairs_.clear();
        for (const auto& g : schedule.grants) {
            const std::size_t idx = g.sender * n_ + g.receiver;
            planned_bits_[idx] += g.granted_rate * delta_;
            planned_pairs_.push_back(idx);
        }
    }

    double transmit_planned(std::uint64_t t) {
        double total = 0.0;
        for (std::size_t idx : planned_pairs_) total += send(idx, planned_bits_[idx], t);
        return total;
    }

    double transmit_tokens(std::uint64_t t, std::ostream* dump) {
        std::vector<double> free(n_);
        for (std::size_t k = 0; k < n_; ++k) free[k] = std::max(0.0, cfg_.nodes[k].free_buffer - occupancy_[k]);
        CoronaRequests req{queued_bits_, free};
        SlotSchedule schedule = corona_allocate(req, tokens_, cfg_.crossbar, t, &token_sent_);
        if (dump) write_schedule_jsonl(*dump, schedule);
        double total = 0.0;
        for (std::size_t i = 0; i < schedule.grants.size(); ++i) {
            const auto& g = schedule.grants[i];
            total += send(g.sender * n_ + g.receiver, token_sent_[i], t);
        }
        return total;
    }

    // Moves up to `bits` from a pair queue into the receiver's buffer.
    double send(std::size_t idx, double bits, std::uint64_t t) {
        auto& q = queues_[idx];
        double budget = std::min(bits, queued_bits_[idx]);
        const double moved = budget;
        const double arrival = static_cast<double>(t + 1) * delta_;
        const double extra = cfg_.pipelined ? 0.0 : cfg_.controller_overhead;
        while (!q.empty() && budget > 0.0) {
            Packet& p = q.front();
            if (p.remaining <= budget + kBitEpsilon) {
                budget -= std::min(budget, p.remaining);
                ++delivered_;
                if (t >= warmup_) {
                    ++measured_;
                    latency_sum_ += arrival - p.created + extra;
                }
                q.pop_front();
            } else {
                p.remaining -= budget;
                budget = 0.0;
            }
        }
        queued_bits_[idx] = q.empty() ? 0.0 : std::max(0.0, queued_bits_[idx] - moved);
        occupancy_[idx % n_] += moved;
        if (t >= warmup_) sent_by_[idx / n_] += moved;
        return moved;
    }

    void drain(SimMetrics& m) {
        for (std::size_t k = 0; k < n_; ++k) {
            occupancy_[k] = std::max(0.0, occupancy_[k] - cfg_.nodes[k].drain_rate * delta_);
            if (occupancy_[k] > cfg_.nodes[k].free_buffer * (1.0 + 1e-12) + kBitEpsilon) ++m.overflow_events;
        }
    }

    void count_backlog(std::uint64_t& queued, std::uint64_t& in_flight) const {
        queued = 0;
        in_flight = 0;
        for (const auto& q : queues_) {
            if (q.empty()) continue;
            queued += q.size();
            if (q.front().remaining < q.front().size) {
                --queued;
                ++in_flight;
            }
        }
    }

    const SimConfig& cfg_;
    std::size_t n_;
    double delta_;
    std::vector<std::deque<Packet>> queues_;
    std::vector<double> queued_bits_;
    std::vector<double> occupancy_;
    std::vector<double> sent_by_;
    std::vector<double> planned_bits_;
    std::vector<std::size_t> planned_pairs_;
    std::vector<double> token_sent_;
    TokenState tokens_;
    std::uint64_t warmup_;
    std::uint64_t generated_ = 0;
    double generated_bits_ = 0.0;
    std::uint64_t delivered_ = 0;
    std::uint64_t measured_ = 0;
    double latency_sum_ = 0.0;
};

}  // namespace

SimMetrics simulate(const SimConfig& config, std::ostream* schedule_dump) {
    config.validate();
    Crossbar sim(config);
    return sim.run(schedule_dump);
}

std::vector<SimMetrics> run_sweep(const SimConfig& base, std::span<const SweepPoint> points) {
    base.validate();
    std::vector<SimMetrics> out(points.size());
    std::vector<std::string> errors(points.size());
    const auto count = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            SimConfig c = base;
            c.allocator = points[i].allocator;
            c.load = points[i].load;
            c.seed = points[i].seed;
            out[i] = simulate(c);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    for (const auto& e : errors) {
        if (!e.empty()) throw InvalidInput("sweep run failed: " + e);
    }
    return out;
}

double jain_index(std::span<const double> values) {
    double sum = 0.0;
    double sq = 0.0;
    for (double v : values) {
        sum += v;
        sq += v * v;
    }
    if (values.empty() || sq == 0.0) return 0.0;
    return sum * sum / (static_cast<double>(values.size()) * sq);
}

FairnessReport measure_fairness(const SimMetrics& metrics, std::span<const int> classes) {
    if (classes.size() != metrics.nodal_throughput.size()) {
        throw DimensionMismatch("one class label per node is required");
    }
    int n_classes = 0;
    for (int c : classes) n_classes = std::max(n_classes, c + 1);
    if (n_classes == 0) throw InsufficientData("no node belongs to a class");

    std::vector<double> sums(n_classes, 0.0);
    std::vector<std::size_t> members(n_classes, 0);
    std::vector<double> included;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (classes[i] < 0) continue;
        sums[classes[i]] += metrics.nodal_throughput[i];
        ++members[classes[i]];
        included.push_back(metrics.nodal_throughput[i]);
    }
    FairnessReport r;
    for (int c = 0; c < n_classes; ++c) {
        if (members[c] == 0 || sums[c] <= 0.0) {
            throw InsufficientData("class " + std::to_string(c + 1) + " delivered nothing");
        }
        r.class_means.push_back(sums[c] / static_cast<double>(members[c]));
    }
    for (double mean : r.class_means) r.ratios.push_back(mean / r.class_means.front());
    r.jain = jain_index(included);
    return r;
}

}  // namespace mwmr
