#include <algorithm>
#include <cmath>

#include "mwmr/kernels.hpp"

namespace mwmr::kernels::omp {

namespace {
// Below this many entries the fork/join cost outweighs the loop.
constexpr std::ptrdiff_t kParallelThreshold = 4096;
}  // namespace

void primal_update(const DualProblem& p, double lambda0, std::span<const double> lambda, double floor,
                   std::span<double> x) {
    const auto n = static_cast<std::ptrdiff_t>(p.n_nodes);
    const auto entries = static_cast<std::ptrdiff_t>(p.entries());
#pragma omp parallel for schedule(static) if (entries >= kParallelThreshold)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        const double mu = std::max(lambda[k] + lambda0, floor);
        for (std::size_t e = p.offsets[k]; e < p.offsets[k + 1]; ++e) {
            x[e] = inverse_marginal(p.weight[e], mu, p.alpha);
        }
    }
}

void column_sums(const DualProblem& p, std::span<const double> x, ColumnSums& out) {
    out.load.assign(p.n_nodes, 0.0);
    out.curvature.assign(p.n_nodes, 0.0);
    const auto n = static_cast<std::ptrdiff_t>(p.n_nodes);
    const auto entries = static_cast<std::ptrdiff_t>(p.entries());
#pragma omp parallel for schedule(static) if (entries >= kParallelThreshold)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        double load = 0.0;
        double curv = 0.0;
        for (std::size_t e = p.offsets[k]; e < p.offsets[k + 1]; ++e) {
            load += x[e];
            curv += inverse_curvature(x[e], p.inv_weight[e], p.alpha);
        }
        out.load[k] = load;
        out.curvature[k] = curv;
    }
    // serial so the totals match the reference bit for bit
    out.total_load = 0.0;
    out.total_curvature = 0.0;
    for (std::size_t k = 0; k < p.n_nodes; ++k) {
        out.total_load += out.load[k];
        out.total_curvature += out.curvature[k];
    }
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    const auto n = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for reduction(max : m) schedule(static) if (n >= kParallelThreshold)
    for (std::ptrdiff_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace mwmr::kernels::omp
