#include <algorithm>
#include <cmath>

#include "mwmr/errors.hpp"
#include "mwmr/kernels.hpp"

namespace mwmr::kernels {

Backend parse_backend(std::string_view name) {
    if (name == "serial") return Backend::serial;
    if (name == "openmp" || name == "omp") return Backend::openmp;
    throw InvalidInput("unknown backend: " + std::string(name));
}

double inverse_marginal(double weight, double mu, double alpha) {
    const double ratio = weight / mu;
    if (alpha == 1.0) return ratio;
    if (alpha == 2.0) return std::sqrt(ratio);
    return std::pow(ratio, 1.0 / alpha);
}

double inverse_curvature(double x, double inv_weight, double alpha) {
    if (alpha == 1.0) return -x * x * inv_weight;
    return -std::pow(x, alpha + 1.0) * inv_weight / alpha;
}

namespace serial {

void primal_update(const DualProblem& p, double lambda0, std::span<const double> lambda, double floor,
                   std::span<double> x) {
    for (std::size_t k = 0; k < p.n_nodes; ++k) {
        const double mu = std::max(lambda[k] + lambda0, floor);
        for (std::size_t e = p.offsets[k]; e < p.offsets[k + 1]; ++e) {
            x[e] = inverse_marginal(p.weight[e], mu, p.alpha);
        }
    }
}

void column_sums(const DualProblem& p, std::span<const double> x, ColumnSums& out) {
    out.load.assign(p.n_nodes, 0.0);
    out.curvature.assign(p.n_nodes, 0.0);
    for (std::size_t k = 0; k < p.n_nodes; ++k) {
        double load = 0.0;
        double curv = 0.0;
        for (std::size_t e = p.offsets[k]; e < p.offsets[k + 1]; ++e) {
            load += x[e];
            curv += inverse_curvature(x[e], p.inv_weight[e], p.alpha);
        }
        out.load[k] = load;
        out.curvature[k] = curv;
    }
    out.total_load = 0.0;
    out.total_curvature = 0.0;
    for (std::size_t k = 0; k < p.n_nodes; ++k) {
        out.total_load += out.load[k];
        out.total_curvature += out.curvature[k];
    }
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace serial
}  // namespace mwmr::kernels
