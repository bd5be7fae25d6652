#include "mwmr/bruteforce.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mwmr/errors.hpp"

namespace mwmr {

namespace {

struct Search {
    std::size_t dims = 0;
    std::vector<std::size_t> receiver;  // per coordinate
    std::vector<double> weight;
    std::vector<double> upper;
    std::vector<double> receiver_cap;
    double total_cap = 0.0;
    double alpha = 1.0;

    double value(std::size_t i, double x) const {
        if (alpha == 1.0) return weight[i] * std::log(x);
        return weight[i] * std::pow(x, 1.0 - alpha) / (1.0 - alpha);
    }

    bool feasible(const std::vector<double>& x) const {
        std::vector<double> load(receiver_cap.size(), 0.0);
        double total = 0.0;
        for (std::size_t i = 0; i < dims; ++i) {
            if (!(x[i] > 0.0) || x[i] > upper[i]) return false;
            load[receiver[i]] += x[i];
            total += x[i];
        }
        if (total > total_cap) return false;
        for (std::size_t k = 0; k < load.size(); ++k) {
            if (load[k] > receiver_cap[k]) return false;
        }
        return true;
    }

    double objective(const std::vector<double>& x) const {
        double s = 0.0;
        for (std::size_t i = 0; i < dims; ++i) s += value(i, x[i]);
        return s;
    }
};

// Enumerates the coarse grid depth-first, pruning as soon as a partial
// assignment overloads a receiver or the pool.
void enumerate(const Search& s, const std::vector<std::vector<double>>& grid,
               const std::vector<std::vector<double>>& utils, std::size_t i, std::vector<double>& load,
               double total, double acc, std::vector<std::size_t>& pick, std::vector<std::size_t>& best_pick,
               double& best) {
    if (i == s.dims) {
        if (acc > best) {
            best = acc;
            best_pick = pick;
        }
        return;
    }
    const std::size_t k = s.receiver[i];
    for (std::size_t j = 0; j < grid[i].size(); ++j) {
        const double v = grid[i][j];
        if (load[k] + v > s.receiver_cap[k] || total + v > s.total_cap) break;  // grid is ascending
        load[k] += v;
        pick[i] = j;
        enumerate(s, grid, utils, i + 1, load, total + v, acc + utils[i][j], pick, best_pick, best);
        load[k] -= v;
    }
}

}  // namespace

int auto_resolution(std::size_t dims) {
    int res = 40;
    while (res > 2 && std::pow(static_cast<double>(res), static_cast<double>(dims)) > 2e6) --res;
    return res;
}

BruteForceResult solve_bruteforce(const TrafficMatrix& traffic, std::span<const NodeState> nodes,
                                  const CrossbarConfig& cfg, const UtilitySpec& spec, int resolution) {
    const std::size_t n = traffic.size();
    if (nodes.size() != n || cfg.n_nodes != n) throw DimensionMismatch("bruteforce: sizes differ from N");
    if (traffic.active_count() > kBruteForceMaxConnections) {
        throw InstanceTooLarge("bruteforce oracle handles at most " + std::to_string(kBruteForceMaxConnections) +
                               " active connections");
    }
    if (resolution < 0) throw InvalidInput("grid resolution must be >= 0");
    spec.validate();

    BruteForceResult out;
    out.x = RateAllocation(n);
    if (traffic.empty()) return out;

    Search s;
    s.dims = traffic.active_count();
    s.alpha = spec.alpha;
    s.total_cap = cfg.total_capacity();
    s.receiver_cap.resize(n);
    for (std::size_t k = 0; k < n; ++k) s.receiver_cap[k] = receiver_capacity(nodes[k], cfg.slot_length);
    const auto conns = traffic.connections();
    for (const auto& c : conns) {
        s.receiver.push_back(c.receiver);
        s.weight.push_back(c.weight);
        s.upper.push_back(std::min(s.receiver_cap[c.receiver], s.total_cap));
        if (!(s.upper.back() > 0.0)) throw InvalidInput("bruteforce: connection with zero capacity");
    }

    if (resolution == 0) resolution = auto_resolution(s.dims);

    std::vector<std::vector<double>> grid(s.dims), utils(s.dims);
    for (std::size_t i = 0; i < s.dims; ++i) {
        const double step = s.upper[i] / resolution;
        out.grid_step = std::max(out.grid_step, step);
        for (int j = 0; j < resolution; ++j) {
            const double v = step * (j + 1);
            grid[i].push_back(v);
            utils[i].push_back(s.value(i, v));
        }
    }

    std::vector<double> load(n, 0.0);
    std::vector<std::size_t> pick(s.dims, 0), best_pick(s.dims, 0);
    double best = -std::numeric_limits<double>::infinity();
    enumerate(s, grid, utils, 0, load, 0.0, 0.0, pick, best_pick, best);
    if (!std::isfinite(best)) {
        // Even the smallest grid point is infeasible; start the search near zero.
        for (std::size_t i = 0; i < s.dims; ++i) grid[i][0] = s.upper[i] * 1e-6;
        best_pick.assign(s.dims, 0);
    }

    std::vector<double> x(s.dims);
    for (std::size_t i = 0; i < s.dims; ++i) x[i] = grid[i][best_pick[i]];
    if (!s.feasible(x)) {
        for (auto& v : x) v *= 1e-3;
    }
    best = s.objective(x);

    // Pattern search over all 5^dims offset combinations. One step length is
    // shared by every coordinate so trades of equal size along a binding sum
    // are among the candidates. Values and utilities are tabulated once per step.
    const double widest = *std::max_element(s.upper.begin(), s.upper.end());
    std::vector<double> h(s.dims, widest / resolution);
    const double offsets[5] = {0.0, -0.5, 0.5, -1.0, 1.0};
    std::size_t combos = 1;
    for (std::size_t i = 0; i < s.dims; ++i) combos *= 5;
    std::vector<double> cand(s.dims * 5), cand_u(s.dims * 5), rload(n);
    std::vector<char> usable(s.dims * 5);
    while (true) {
        if (h[0] <= widest * 1e-10) break;
        for (std::size_t i = 0; i < s.dims; ++i) {
            for (int o = 0; o < 5; ++o) {
                const double v = std::min(x[i] + offsets[o] * h[i], s.upper[i]);
                cand[i * 5 + o] = v;
                usable[i * 5 + o] = v > 0.0;
                cand_u[i * 5 + o] = v > 0.0 ? s.value(i, v) : 0.0;
            }
        }
        double best_v = best;
        std::size_t best_code = 0;
        for (std::size_t code = 1; code < combos; ++code) {
            std::fill(rload.begin(), rload.end(), 0.0);
            double total = 0.0;
            double v = 0.0;
            bool ok = true;
            std::size_t c = code;
            for (std::size_t i = 0; i < s.dims && ok; ++i, c /= 5) {
                const std::size_t slot = i * 5 + c % 5;
                ok = usable[slot] != 0;
                rload[s.receiver[i]] += cand[slot];
                total += cand[slot];
                v += cand_u[slot];
            }
            if (!ok || total > s.total_cap || v <= best_v) continue;
            for (std::size_t i = 0; i < s.dims && ok; ++i) ok = rload[s.receiver[i]] <= s.receiver_cap[s.receiver[i]];
            if (!ok) continue;
            best_v = v;
            best_code = code;
        }
        if (best_code != 0) {
            std::size_t c = best_code;
            for (std::size_t i = 0; i < s.dims; ++i, c /= 5) x[i] = cand[i * 5 + c % 5];
            best = s.objective(x);
        } else {
            for (auto& v : h) v *= 0.6;
        }
    }

    for (std::size_t i = 0; i < s.dims; ++i) out.x(conns[i].sender, conns[i].receiver) = x[i];
    out.objective = best;
    return out;
}

}  // namespace mwmr
