#pragma once

// Diagonally scaled dual gradient projection for the alpha-fair admission
// control problem:
//
//   maximize   sum_{n,k} a_nk U_nk(x_nk)
//   subject to sum_n a_nk x_nk <= r_k + M_k/delta   for every receiver k
//              sum_{n,k} a_nk x_nk <= C R
//
// The primal step is x_nk = (w_nk / (lambda_k + lambda_0))^(1/alpha); the dual
// step is a projected Newton-like step on each multiplier, scaled by the
// diagonal of the dual Hessian, sum_n a_nk / U''(x_nk) with
// U''(x) = -alpha w x^(-alpha-1).

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "mwmr/kernels.hpp"
#include "mwmr/model.hpp"

namespace mwmr {

struct SolverParams {
    double step_constant = 5.0;        // d in gamma = d / sqrt(m)
    double epsilon = 1e-11;            // stop when max |dx| <= epsilon R and the duals settle
    int max_iterations = 10000;
    double initial_rate_fraction = 0.01;
    double lambda_floor = 1e-12;       // in solver units (rates normalized by R)
    /// Run exactly this many iterations without testing the stopping rule.
    std::optional<int> fixed_iterations;
    bool record_trace = false;
    kernels::Backend backend = kernels::Backend::serial;

    void validate() const;
};

struct DualVector {
    double lambda0 = 0.0;
    std::vector<double> lambda;  // one per receiver

    std::size_t size() const noexcept { return lambda.size(); }
};

struct IterationRecord {
    int m = 0;
    double gamma = 0.0;
    double max_dx = 0.0;        // bits/s
    double lambda0 = 0.0;       // solver units
    double max_lambda_k = 0.0;  // solver units
    double dual_value = 0.0;    // D(lambda^(m)) = L(X^(m+1), lambda^(m)), solver units
};

struct SolveResult {
    RateAllocation x;
    DualVector lambda;  // native units (U' measured per bit/s)
    int iterations = 0;
    bool converged = false;
    bool projected = false;  // final iterate was rescaled into the feasible set
    double objective = 0.0;
    std::vector<IterationRecord> trace;
};

/// gamma = d / sqrt(m).
double step_size(int m, double d);

/// x_nk = (w_nk / (lambda_k + lambda_0))^(1/alpha) on active entries, 0 elsewhere.
/// Sums below `lambda_floor` are clamped up; an exactly-zero sum with no floor
/// throws DegenerateDual.
RateAllocation primal_update(const DualVector& lambda, const TrafficMatrix& traffic, const UtilitySpec& spec,
                             double lambda_floor = 0.0);

/// One scaled projected step on every multiplier. Receivers with senders are
/// lifted to `lambda_floor`; receivers without senders are set to 0.
DualVector dual_update(const DualVector& lambda, const RateAllocation& x, const TrafficMatrix& traffic,
                       std::span<const NodeState> nodes, const CrossbarConfig& cfg, const UtilitySpec& spec,
                       double gamma, double lambda_floor = 0.0);

/// Iterates dual then primal updates until max |x^(m+1) - x^(m)| <= epsilon R
/// and no multiplier moves by more than epsilon times the largest price.
/// Non-convergence is reported in the result, not thrown.
SolveResult solve_iterative(const TrafficMatrix& traffic, std::span<const NodeState> nodes,
                            const CrossbarConfig& cfg, const UtilitySpec& spec, const SolverParams& params = {});

struct KktResiduals {
    // raw, in native units
    double stationarity = 0.0;     // max |U'(x) - lambda_k - lambda_0|
    double feasibility = 0.0;      // max constraint violation (bits/s)
    double complementarity = 0.0;  // max |multiplier * slack|
    // dimensionless
    double scaled_stationarity = 0.0;     // relative to U'(x)
    double scaled_feasibility = 0.0;      // relative to each constraint's rhs
    double scaled_complementarity = 0.0;  // (lambda / max U') * (|slack| / rhs)
    double dual_feasibility = 0.0;        // max(0, -lambda)

    double max_scaled() const noexcept;
};

KktResiduals kkt_residuals(const RateAllocation& x, const DualVector& lambda, const TrafficMatrix& traffic,
                           std::span<const NodeState> nodes, const CrossbarConfig& cfg, const UtilitySpec& spec);

/// CSV with columns m,gamma,max_dx,lambda0,max_lambda_k.
void write_iteration_trace(std::ostream& os, std::span<const IterationRecord> trace);

namespace detail {
/// Builds the receiver-grouped problem with rates divided by `rate_scale`.
kernels::DualProblem make_problem(const TrafficMatrix& traffic, std::span<const NodeState> nodes,
                                  const CrossbarConfig& cfg, const UtilitySpec& spec, double rate_scale);
}  // namespace detail

}  // namespace mwmr
