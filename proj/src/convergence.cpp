#include "mwmr/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mwmr/errors.hpp"
#include "mwmr/random.hpp"

namespace mwmr {

Instance random_instance(std::size_t n_nodes, double density, std::uint64_t seed) {
    if (n_nodes < 2) throw InvalidInput("random instance needs at least 2 nodes");
    if (!(density > 0.0 && density <= 1.0)) throw InvalidInput("density must lie in (0, 1]");
    Instance inst;
    inst.cfg.n_nodes = n_nodes;
    inst.cfg.n_waveguides = 32;
    inst.cfg.wavelengths_per_waveguide = 64;
    inst.cfg.wavelength_rate = 10e9;
    inst.cfg.slot_length = 6e-9;
    const double cap = inst.cfg.total_capacity();

    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> packets(1, 20);
    inst.nodes.resize(n_nodes);
    for (auto& node : inst.nodes) {
        node.drain_rate = unit(rng) * cap;
        node.free_buffer = packets(rng) * 512.0;
    }

    const std::size_t off_diag = n_nodes * (n_nodes - 1);
    const auto wanted = static_cast<std::size_t>(std::llround(density * static_cast<double>(n_nodes * n_nodes)));
    const std::size_t ones = std::clamp<std::size_t>(wanted, 1, off_diag);
    std::vector<std::size_t> cells;
    cells.reserve(off_diag);
    for (std::size_t i = 0; i < n_nodes * n_nodes; ++i) {
        if (i / n_nodes != i % n_nodes) cells.push_back(i);
    }
    // Partial Fisher-Yates: only the first `ones` cells are needed.
    for (std::size_t i = 0; i < ones; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, cells.size() - 1);
        std::swap(cells[i], cells[pick(rng)]);
    }
    std::vector<Connection> conns;
    conns.reserve(ones);
    for (std::size_t i = 0; i < ones; ++i) {
        // 1 - U[0,1) lies in (0, 1].
        conns.push_back({cells[i] / n_nodes, cells[i] % n_nodes, 1.0 - unit(rng)});
    }
    inst.traffic = TrafficMatrix(n_nodes, conns);
    return inst;
}

double quantile(std::vector<double> sample, double q) {
    if (sample.empty()) throw InsufficientData("quantile of an empty sample");
    std::sort(sample.begin(), sample.end());
    const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(sample.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sample.size() - 1);
    return sample[lo] + (pos - static_cast<double>(lo)) * (sample[hi] - sample[lo]);
}

std::vector<ConvergenceCell> run_convergence_study(const ConvergenceStudyConfig& config) {
    if (config.reps < 1) throw InvalidInput("convergence study needs at least one rep");
    std::vector<ConvergenceCell> cells;
    for (std::size_t n : config.n_nodes) {
        for (std::size_t di = 0; di < config.densities_pct.size(); ++di) {
            const double density_pct = config.densities_pct[di];
            for (double d : config.step_constants) {
                SolverParams params;
                params.step_constant = d;
                params.epsilon = config.epsilon;
                params.max_iterations = config.max_iterations;
                const UtilitySpec spec{config.alpha};

                std::vector<double> iterations(config.reps);
                std::vector<int> converged(config.reps);
                std::vector<double> kkt(config.reps);
#pragma omp parallel for schedule(dynamic, 1)
                for (int rep = 0; rep < config.reps; ++rep) {
                    const std::uint64_t s =
                        child_seed(child_seed(child_seed(config.seed, n), di), static_cast<std::uint64_t>(rep));
                    const Instance inst = random_instance(n, density_pct / 100.0, s);
                    const SolveResult r = solve_iterative(inst.traffic, inst.nodes, inst.cfg, spec, params);
                    iterations[rep] = r.iterations;
                    converged[rep] = r.converged ? 1 : 0;
                    kkt[rep] = r.converged
                                   ? kkt_residuals(r.x, r.lambda, inst.traffic, inst.nodes, inst.cfg, spec).max_scaled()
                                   : 0.0;
                }

                ConvergenceCell cell;
                cell.n = n;
                cell.density_pct = density_pct;
                cell.d = d;
                cell.reps = config.reps;
                const double reps = static_cast<double>(config.reps);
                cell.mean_iterations = std::accumulate(iterations.begin(), iterations.end(), 0.0) / reps;
                double ss = 0.0;
                for (double v : iterations) ss += (v - cell.mean_iterations) * (v - cell.mean_iterations);
                cell.variance_iterations = config.reps > 1 ? ss / (reps - 1.0) : 0.0;
                cell.p05 = quantile(iterations, 0.05);
                cell.p50 = quantile(iterations, 0.50);
                cell.p95 = quantile(iterations, 0.95);
                for (int rep = 0; rep < config.reps; ++rep) {
                    if (!converged[rep]) ++cell.nonconverged;
                    cell.max_scaled_kkt = std::max(cell.max_scaled_kkt, kkt[rep]);
                }
                cells.push_back(cell);
            }
        }
    }
    return cells;
}

}  // namespace mwmr
