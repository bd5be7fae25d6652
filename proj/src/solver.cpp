#include "mwmr/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mwmr/errors.hpp"

namespace mwmr {

void SolverParams::validate() const {
    if (!(step_constant > 0.0)) throw InvalidInput("step constant d must be > 0");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidInput("epsilon must lie in (0, 1)");
    if (max_iterations < 1) throw InvalidInput("max_iterations must be >= 1");
    if (!(initial_rate_fraction > 0.0 && initial_rate_fraction <= 1.0)) {
        throw InvalidInput("initial_rate_fraction must lie in (0, 1]");
    }
    if (!(lambda_floor >= 0.0)) throw InvalidInput("lambda_floor must be >= 0");
    if (fixed_iterations && *fixed_iterations < 1) throw InvalidInput("fixed_iterations must be >= 1");
}

double step_size(int m, double d) {
    return d / std::sqrt(static_cast<double>(m));
}

namespace detail {

kernels::DualProblem make_problem(const TrafficMatrix& traffic, std::span<const NodeState> nodes,
                                  const CrossbarConfig& cfg, const UtilitySpec& spec, double rate_scale) {
    const std::size_t n = traffic.size();
    if (nodes.size() != n || cfg.n_nodes != n) throw DimensionMismatch("solver: sizes differ from N");
    kernels::DualProblem p;
    p.n_nodes = n;
    p.alpha = spec.alpha;
    const auto offsets = traffic.receiver_offsets();
    p.offsets.assign(offsets.begin(), offsets.end());
    p.weight.reserve(traffic.active_count());
    for (const auto& c : traffic.connections()) p.weight.push_back(c.weight);
    const auto inv = traffic.inverse_weights();
    p.inv_weight.assign(inv.begin(), inv.end());
    p.receiver_cap.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        p.receiver_cap[k] = receiver_capacity(nodes[k], cfg.slot_length) / rate_scale;
    }
    p.total_cap = cfg.total_capacity() / rate_scale;
    return p;
}

}  // namespace detail

namespace {

bool has_senders(const kernels::DualProblem& p, std::size_t k) {
    return p.offsets[k + 1] > p.offsets[k];
}

void dual_step(const kernels::DualProblem& p, const kernels::ColumnSums& sums, const DualVector& in,
               double gamma, double floor, DualVector& out) {
    out.lambda.resize(p.n_nodes);
    for (std::size_t k = 0; k < p.n_nodes; ++k) {
        if (!has_senders(p, k)) {
            out.lambda[k] = 0.0;
            continue;
        }
        const double scale = sums.curvature[k];
        if (scale == 0.0) throw DegenerateScaling("zero scaling term for receiver with senders");
        const double next = in.lambda[k] + gamma * (p.receiver_cap[k] - sums.load[k]) / scale;
        out.lambda[k] = std::max(std::max(next, 0.0), floor);
    }
    if (sums.total_curvature == 0.0) {
        out.lambda0 = std::max(in.lambda0, 0.0);
        return;
    }
    const double next0 = in.lambda0 + gamma * (p.total_cap - sums.total_load) / sums.total_curvature;
    out.lambda0 = std::max(next0, 0.0);
}

// Largest multiplier change relative to the largest price lambda_k + lambda_0.
// Rates depend only on those sums, so the rates can settle while lambda_k and
// lambda_0 still trade value; that state is not optimal.
double dual_drift(const DualVector& a, const DualVector& b) {
    double change = std::abs(a.lambda0 - b.lambda0);
    double price = b.lambda0;
    for (std::size_t k = 0; k < b.lambda.size(); ++k) {
        change = std::max(change, std::abs(a.lambda[k] - b.lambda[k]));
        price = std::max(price, b.lambda[k] + b.lambda0);
    }
    return price > 0.0 ? change / price : change;
}

double entry_utility(double x, double w, double alpha) {
    if (alpha == 1.0) return w * std::log(x);
    return w * std::pow(x, 1.0 - alpha) / (1.0 - alpha);
}

double lagrangian(const kernels::DualProblem& p, std::span<const double> x, const kernels::ColumnSums& sums,
                  const DualVector& lambda) {
    double value = 0.0;
    for (std::size_t e = 0; e < p.entries(); ++e) value += entry_utility(x[e], p.weight[e], p.alpha);
    value -= lambda.lambda0 * (sums.total_load - p.total_cap);
    for (std::size_t k = 0; k < p.n_nodes; ++k) {
        value -= lambda.lambda[k] * (sums.load[k] - p.receiver_cap[k]);
    }
    return value;
}

RateAllocation scatter(const TrafficMatrix& traffic, std::span<const double> flat, double scale) {
    RateAllocation x(traffic.size());
    auto values = x.values();
    const auto dense = traffic.dense_index();
    for (std::size_t e = 0; e < flat.size(); ++e) values[dense[e]] = flat[e] * scale;
    return x;
}

// Rescales rates into every violated receiver, then into the total pool.
bool project_feasible(RateAllocation& x, const TrafficMatrix& traffic, std::span<const NodeState> nodes,
                      const CrossbarConfig& cfg) {
    constexpr double kShrink = 1.0 - 4.0 * std::numeric_limits<double>::epsilon();
    bool changed = false;
    const auto conns = traffic.connections();
    const auto offsets = traffic.receiver_offsets();
    for (std::size_t k = 0; k < traffic.size(); ++k) {
        const double cap = receiver_capacity(nodes[k], cfg.slot_length);
        for (int pass = 0; pass < 3; ++pass) {
            double load = 0.0;
            for (std::size_t e = offsets[k]; e < offsets[k + 1]; ++e) load += x(conns[e].sender, k);
            if (load <= cap) break;
            const double ratio = (cap / load) * kShrink;
            for (std::size_t e = offsets[k]; e < offsets[k + 1]; ++e) x(conns[e].sender, k) *= ratio;
            changed = true;
        }
    }
    const double cap = cfg.total_capacity();
    for (int pass = 0; pass < 3; ++pass) {
        double total = 0.0;
        for (const auto& c : conns) total += x(c.sender, c.receiver);
        if (total <= cap) break;
        const double ratio = (cap / total) * kShrink;
        for (const auto& c : conns) x(c.sender, c.receiver) *= ratio;
        changed = true;
    }
    return changed;
}

}  // namespace

RateAllocation primal_update(const DualVector& lambda, const TrafficMatrix& traffic, const UtilitySpec& spec,
                             double lambda_floor) {
    spec.validate();
    const std::size_t n = traffic.size();
    if (lambda.size() != n) throw DimensionMismatch("dual vector size differs from N");
    RateAllocation x(n);
    const auto conns = traffic.connections();
    const auto offsets = traffic.receiver_offsets();
    for (std::size_t k = 0; k < n; ++k) {
        if (offsets[k + 1] == offsets[k]) continue;
        const double sum = lambda.lambda[k] + lambda.lambda0;
        if (!(sum > 0.0) && !(lambda_floor > 0.0)) {
            throw DegenerateDual("lambda_k + lambda_0 = 0 for a receiver with senders");
        }
        const double mu = std::max(sum, lambda_floor);
        for (std::size_t e = offsets[k]; e < offsets[k + 1]; ++e) {
            x(conns[e].sender, k) = kernels::inverse_marginal(conns[e].weight, mu, spec.alpha);
        }
    }
    return x;
}

DualVector dual_update(const DualVector& lambda, const RateAllocation& x, const TrafficMatrix& traffic,
                       std::span<const NodeState> nodes, const CrossbarConfig& cfg, const UtilitySpec& spec,
                       double gamma, double lambda_floor) {
    spec.validate();
    if (lambda.size() != traffic.size() || x.size() != traffic.size()) {
        throw DimensionMismatch("dual update: sizes differ from N");
    }
    const auto p = detail::make_problem(traffic, nodes, cfg, spec, 1.0);
    std::vector<double> flat(p.entries());
    const auto dense = traffic.dense_index();
    const auto values = x.values();
    for (std::size_t e = 0; e < flat.size(); ++e) flat[e] = values[dense[e]];
    kernels::ColumnSums sums;
    kernels::serial::column_sums(p, flat, sums);
    DualVector out;
    dual_step(p, sums, lambda, gamma, lambda_floor, out);
    return out;
}

SolveResult solve_iterative(const TrafficMatrix& traffic, std::span<const NodeState> nodes,
                            const CrossbarConfig& cfg, const UtilitySpec& spec, const SolverParams& params) {
    cfg.validate();
    spec.validate();
    params.validate();
    if (traffic.empty()) throw InvalidInput("traffic matrix has no active connections");

    // Work in units of one wavelength so the dual floor and epsilon are
    // independent of the absolute bit rate.
    const double scale = cfg.wavelength_rate;
    const auto p = detail::make_problem(traffic, nodes, cfg, spec, scale);
    const kernels::Backend backend = params.backend;

    std::vector<double> x(p.entries());
    for (std::size_t k = 0; k < p.n_nodes; ++k) {
        const std::size_t degree = p.offsets[k + 1] - p.offsets[k];
        if (degree == 0) continue;
        if (!(p.receiver_cap[k] > 0.0)) {
            throw InvalidInput("receiver " + std::to_string(k) + " has senders but zero capacity");
        }
        const double seed = params.initial_rate_fraction * p.receiver_cap[k] / static_cast<double>(degree);
        for (std::size_t e = p.offsets[k]; e < p.offsets[k + 1]; ++e) x[e] = seed;
    }

    DualVector lambda;
    lambda.lambda0 = params.lambda_floor;
    lambda.lambda.assign(p.n_nodes, 0.0);
    for (std::size_t k = 0; k < p.n_nodes; ++k) {
        if (has_senders(p, k)) lambda.lambda[k] = params.lambda_floor;
    }

    SolveResult result;
    std::vector<double> next(p.entries());
    DualVector next_lambda;
    kernels::ColumnSums sums;
    kernels::column_sums(backend, p, x, sums);

    const int limit = params.fixed_iterations.value_or(params.max_iterations);
    for (int m = 1; m <= limit; ++m) {
        const double gamma = step_size(m, params.step_constant);
        dual_step(p, sums, lambda, gamma, params.lambda_floor, next_lambda);
        const double drift = dual_drift(lambda, next_lambda);
        std::swap(lambda, next_lambda);
        kernels::primal_update(backend, p, lambda.lambda0, lambda.lambda, params.lambda_floor, next);
        const double dx = kernels::max_abs_diff(backend, next, x);
        std::swap(x, next);
        kernels::column_sums(backend, p, x, sums);
        result.iterations = m;

        if (params.record_trace) {
            IterationRecord rec;
            rec.m = m;
            rec.gamma = gamma;
            rec.max_dx = dx * scale;
            rec.lambda0 = lambda.lambda0;
            rec.max_lambda_k = lambda.lambda.empty()
                                   ? 0.0
                                   : *std::max_element(lambda.lambda.begin(), lambda.lambda.end());
            rec.dual_value = lagrangian(p, x, sums, lambda);
            result.trace.push_back(rec);
        }
        if (dx <= params.epsilon && drift <= params.epsilon) {
            result.converged = true;
            if (!params.fixed_iterations) break;
        } else {
            result.converged = false;
        }
    }

    result.x = scatter(traffic, x, scale);
    result.projected = project_feasible(result.x, traffic, nodes, cfg);

    // lambda in solver units prices y = x / R; convert back to per bit/s.
    const double to_native = std::pow(scale, -spec.alpha);
    result.lambda.lambda0 = lambda.lambda0 * to_native;
    result.lambda.lambda.resize(p.n_nodes);
    for (std::size_t k = 0; k < p.n_nodes; ++k) result.lambda.lambda[k] = lambda.lambda[k] * to_native;
    result.objective = total_utility(result.x, traffic, spec);
    return result;
}

double KktResiduals::max_scaled() const noexcept {
    return std::max({scaled_stationarity, scaled_feasibility, scaled_complementarity, dual_feasibility});
}

KktResiduals kkt_residuals(const RateAllocation& x, const DualVector& lambda, const TrafficMatrix& traffic,
                           std::span<const NodeState> nodes, const CrossbarConfig& cfg, const UtilitySpec& spec) {
    const std::size_t n = traffic.size();
    if (x.size() != n || lambda.size() != n || nodes.size() != n) {
        throw DimensionMismatch("kkt: sizes differ from N");
    }
    KktResiduals r;
    double price_scale = 0.0;
    std::vector<double> load(n, 0.0);
    double total = 0.0;
    for (const auto& c : traffic.connections()) {
        const double v = x(c.sender, c.receiver);
        const double marginal = marginal_utility(v, spec, c.weight);
        const double gap = std::abs(marginal - lambda.lambda[c.receiver] - lambda.lambda0);
        r.stationarity = std::max(r.stationarity, gap);
        r.scaled_stationarity = std::max(r.scaled_stationarity, gap / marginal);
        price_scale = std::max(price_scale, marginal);
        load[c.receiver] += v;
        total += v;
    }
    for (const auto& v : x.values()) {
        if (v < 0.0) r.feasibility = std::max(r.feasibility, -v);
    }

    auto account = [&](double multiplier, double lhs, double rhs) {
        const double slack = rhs - lhs;
        r.feasibility = std::max(r.feasibility, -slack);
        if (rhs > 0.0) r.scaled_feasibility = std::max(r.scaled_feasibility, -slack / rhs);
        r.dual_feasibility = std::max(r.dual_feasibility, -multiplier);
        r.complementarity = std::max(r.complementarity, std::abs(multiplier * slack));
        if (rhs > 0.0 && price_scale > 0.0) {
            r.scaled_complementarity =
                std::max(r.scaled_complementarity, (multiplier / price_scale) * (std::abs(slack) / rhs));
        }
    };
    const auto offsets = traffic.receiver_offsets();
    for (std::size_t k = 0; k < n; ++k) {
        if (offsets[k + 1] == offsets[k]) continue;
        account(lambda.lambda[k], load[k], receiver_capacity(nodes[k], cfg.slot_length));
    }
    account(lambda.lambda0, total, cfg.total_capacity());
    return r;
}

void write_iteration_trace(std::ostream& os, std::span<const IterationRecord> trace) {
    os << "m,gamma,max_dx,lambda0,max_lambda_k\n";
    os.precision(17);
    for (const auto& r : trace) {
        os << r.m << ',' << r.gamma << ',' << r.max_dx << ',' << r.lambda0 << ',' << r.max_lambda_k << '\n';
    }
}

}  // namespace mwmr
