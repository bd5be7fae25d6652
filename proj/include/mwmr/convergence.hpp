#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mwmr/model.hpp"
#include "mwmr/solver.hpp"

namespace mwmr {

struct Instance {
    CrossbarConfig cfg;
    std::vector<NodeState> nodes;
    TrafficMatrix traffic;
};

/// Random solver instance: 32 waveguides of 64 wavelengths at 10 Gb/s,
/// r_k uniform on [0, C R], w uniform on (0, 1], free buffer of g packets
/// with g uniform on {1..20}, and round(density * N^2) active off-diagonal
/// entries (at least one) placed uniformly.
Instance random_instance(std::size_t n_nodes, double density, std::uint64_t seed);

struct ConvergenceStudyConfig {
    std::vector<std::size_t> n_nodes{64};
    std::vector<double> densities_pct{0.5, 2.0, 10.0, 50.0, 90.0};
    std::vector<double> step_constants{5.0};
    int reps = 100;
    std::uint64_t seed = 1;
    double epsilon = 1e-11;
    double alpha = 1.0;
    int max_iterations = 10000;
};

struct ConvergenceCell {
    std::size_t n = 0;
    double density_pct = 0.0;
    double d = 0.0;
    int reps = 0;
    double mean_iterations = 0.0;
    double variance_iterations = 0.0;  // sample variance
    double p05 = 0.0;
    double p50 = 0.0;
    double p95 = 0.0;
    int nonconverged = 0;
    double max_scaled_kkt = 0.0;  // over converged reps
};

/// Every (n, density, d) cell solved `reps` times. Instances depend on
/// (seed, n, density, rep) only, so all d values see the same instances.
/// Reps fan out over OpenMP threads.
std::vector<ConvergenceCell> run_convergence_study(const ConvergenceStudyConfig& config);

/// Linear-interpolated empirical quantile of an unsorted sample, q in [0, 1].
double quantile(std::vector<double> sample, double q);

}  // namespace mwmr
