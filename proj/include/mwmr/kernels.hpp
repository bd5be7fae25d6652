#pragma once

// Inner loops of the dual gradient projection solver.
//
// Two implementations share one contract: `serial` is the reference kept for
// testing, `omp` parallelizes over active entries (primal step) and over
// receivers (column reductions). Each receiver's sum is accumulated by a single
// thread in entry order and cross-receiver totals are reduced serially, so both
// backends return bit-identical results.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace mwmr::kernels {

enum class Backend { serial, openmp };

Backend parse_backend(std::string_view name);

/// Flattened, receiver-grouped problem data in solver units.
struct DualProblem {
    std::size_t n_nodes = 0;
    std::vector<std::size_t> offsets;  // receiver k owns entries [offsets[k], offsets[k+1])
    std::vector<double> weight;        // per entry
    std::vector<double> inv_weight;    // per entry
    std::vector<double> receiver_cap;  // per receiver, r_k + M_k/delta
    double total_cap = 0.0;            // C R
    double alpha = 1.0;

    std::size_t entries() const noexcept { return weight.size(); }
};

struct ColumnSums {
    std::vector<double> load;       // sum_n x_nk
    std::vector<double> curvature;  // sum_n 1/U''(x_nk), negative for active receivers
    double total_load = 0.0;
    double total_curvature = 0.0;
};

namespace serial {
void primal_update(const DualProblem& p, double lambda0, std::span<const double> lambda, double floor,
                   std::span<double> x);
void column_sums(const DualProblem& p, std::span<const double> x, ColumnSums& out);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
}  // namespace serial

namespace omp {
void primal_update(const DualProblem& p, double lambda0, std::span<const double> lambda, double floor,
                   std::span<double> x);
void column_sums(const DualProblem& p, std::span<const double> x, ColumnSums& out);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
}  // namespace omp

inline void primal_update(Backend b, const DualProblem& p, double lambda0, std::span<const double> lambda,
                          double floor, std::span<double> x) {
    b == Backend::openmp ? omp::primal_update(p, lambda0, lambda, floor, x)
                         : serial::primal_update(p, lambda0, lambda, floor, x);
}

inline void column_sums(Backend b, const DualProblem& p, std::span<const double> x, ColumnSums& out) {
    b == Backend::openmp ? omp::column_sums(p, x, out) : serial::column_sums(p, x, out);
}

inline double max_abs_diff(Backend b, std::span<const double> a, std::span<const double> c) {
    return b == Backend::openmp ? omp::max_abs_diff(a, c) : serial::max_abs_diff(a, c);
}

/// x = (w / mu)^(1/alpha), the maximizer of w x^(1-a)/(1-a) - mu x.
double inverse_marginal(double weight, double mu, double alpha);
/// 1/U''(x) = -x^(alpha+1) / (alpha w).
double inverse_curvature(double x, double inv_weight, double alpha);

}  // namespace mwmr::kernels
