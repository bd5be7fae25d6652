#include "mwmr/trimmer.hpp"

#include <cmath>
#include <vector>

#include "mwmr/errors.hpp"
#include "mwmr/random.hpp"

namespace mwmr {

namespace {

// Snap tolerance, in wavelengths, for rates the solver left a hair off a multiple of R.
constexpr double kGrainTolerance = 1e-9;
// Deficits are sampled with integer weights so the tree stays exact.
constexpr double kWeightScale = 1099511627776.0;  // 2^40

class FenwickSampler {
public:
    explicit FenwickSampler(std::size_t n) : tree_(n + 1, 0), weight_(n, 0) {
        while ((top_ << 1) <= n) top_ <<= 1;
    }

    void set(std::size_t i, std::uint64_t w) {
        const auto old = weight_[i];
        weight_[i] = w;
        total_ += w;
        total_ -= old;
        for (std::size_t j = i + 1; j < tree_.size(); j += j & (~j + 1)) {
            tree_[j] += w;
            tree_[j] -= old;
        }
    }

    std::uint64_t total() const noexcept { return total_; }

    /// Index whose cumulative weight range contains `u` (u < total()).
    std::size_t find(std::uint64_t u) const {
        std::size_t pos = 0;
        for (std::size_t step = top_; step > 0; step >>= 1) {
            const std::size_t next = pos + step;
            if (next < tree_.size() && tree_[next] <= u) {
                pos = next;
                u -= tree_[next];
            }
        }
        return pos;
    }

private:
    std::vector<std::uint64_t> tree_;
    std::vector<std::uint64_t> weight_;
    std::uint64_t total_ = 0;
    std::size_t top_ = 1;
};

}  // namespace

TrimOutcome trim(const RateAllocation& optimal, const TrafficMatrix& traffic, std::span<const NodeState> nodes,
                 const CrossbarConfig& cfg, std::uint64_t seed) {
    const std::size_t n = traffic.size();
    if (optimal.size() != n || nodes.size() != n || cfg.n_nodes != n) {
        throw DimensionMismatch("trim: sizes differ from N");
    }
    const double grain = cfg.wavelength_rate;
    const auto conns = traffic.connections();
    const auto offsets = traffic.receiver_offsets();
    const std::size_t count = conns.size();

    TrimOutcome out;
    out.rng_seed = seed;
    out.x = RateAllocation(n);

    std::vector<double> units(count);
    std::vector<double> channels(count);
    std::vector<double> deficit(count);
    double residual = 0.0;
    for (std::size_t e = 0; e < count; ++e) {
        double u = optimal(conns[e].sender, conns[e].receiver) / grain;
        const double nearest = std::round(u);
        if (std::abs(u - nearest) <= kGrainTolerance) u = nearest;
        units[e] = u;
        channels[e] = std::floor(u);
        deficit[e] = u - channels[e];
        residual += deficit[e];
    }
    out.residual_start = residual * grain;

    // Headroom in whole channels for every receiver.
    std::vector<double> receiver_used(n, 0.0);
    std::vector<double> receiver_limit(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        receiver_limit[k] = receiver_capacity(nodes[k], cfg.slot_length) / grain * (1.0 + 1e-12);
        for (std::size_t e = offsets[k]; e < offsets[k + 1]; ++e) receiver_used[k] += channels[e];
    }

    FenwickSampler sampler(count);
    for (std::size_t k = 0; k < n; ++k) {
        if (receiver_used[k] + 1.0 > receiver_limit[k]) continue;
        for (std::size_t e = offsets[k]; e < offsets[k + 1]; ++e) {
            if (deficit[e] > 0.0) {
                const auto w = static_cast<std::uint64_t>(std::llround(deficit[e] * kWeightScale));
                sampler.set(e, w > 0 ? w : 1);
            }
        }
    }

    auto rng = make_rng(seed);
    while (residual >= 1.0 - kGrainTolerance && sampler.total() > 0) {
        std::uniform_int_distribution<std::uint64_t> pick(0, sampler.total() - 1);
        const std::size_t e = sampler.find(pick(rng));
        channels[e] += 1.0;
        residual -= 1.0;
        ++out.increments_applied;
        sampler.set(e, 0);  // deficit < 1, so one increment exhausts it

        const std::size_t k = conns[e].receiver;
        receiver_used[k] += 1.0;
        if (receiver_used[k] + 1.0 > receiver_limit[k]) {
            for (std::size_t j = offsets[k]; j < offsets[k + 1]; ++j) sampler.set(j, 0);
        }
    }
    out.residual_left = std::max(residual, 0.0) * grain;

    for (std::size_t e = 0; e < count; ++e) {
        out.x(conns[e].sender, conns[e].receiver) = channels[e] * grain;
    }
    return out;
}

}  // namespace mwmr
