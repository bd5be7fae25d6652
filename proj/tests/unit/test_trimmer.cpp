#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "mwmr/convergence.hpp"
#include "mwmr/errors.hpp"
#include "mwmr/solver.hpp"
#include "mwmr/trimmer.hpp"

using namespace mwmr;
using testutil::capped_nodes;
using testutil::unit_crossbar;

namespace {

bool whole_multiple(double v, double r) {
    const double q = v / r;
    return q == std::floor(q);
}

}  // namespace

TEST_CASE("trim leaves channel-granular input unchanged") {
    const double R = 10e9;
    const auto cfg = unit_crossbar(3, 100, R);
    const Connection c[] = {{0, 2, 1.0}, {1, 2, 1.0}};
    TrafficMatrix a(3, c);
    RateAllocation x(3);
    x(0, 2) = 3 * R;
    x(1, 2) = 5 * R;
    const auto out = trim(x, a, capped_nodes(3, 20 * R), cfg, 1);
    CHECK(out.x == x);
    CHECK(out.residual_start == 0.0);
    CHECK(out.increments_applied == 0);
    CHECK(out.rng_seed == 1);
}

TEST_CASE("one residual channel goes to either sender with equal odds") {
    const double R = 10e9;
    const auto cfg = unit_crossbar(3, 100, R);
    const Connection c[] = {{0, 2, 1.0}, {1, 2, 1.0}};
    TrafficMatrix a(3, c);
    const auto nodes = capped_nodes(3, 4 * R);
    RateAllocation x(3);
    x(0, 2) = 2.5 * R;
    x(1, 2) = 1.5 * R;
    int first = 0;
    const int seeds = 10000;
    for (int s = 0; s < seeds; ++s) {
        const auto out = trim(x, a, nodes, cfg, static_cast<std::uint64_t>(s));
        CHECK(out.residual_start == doctest::Approx(R));
        CHECK(out.increments_applied == 1);
        const bool a_first = out.x(0, 2) == 3 * R && out.x(1, 2) == 1 * R;
        const bool b_first = out.x(0, 2) == 2 * R && out.x(1, 2) == 2 * R;
        CHECK((a_first || b_first));
        first += a_first;
    }
    CHECK(std::abs(static_cast<double>(first) / seeds - 0.5) <= 0.02);
}

TEST_CASE("capacity guard strands the residual") {
    const double R = 10e9;
    const Connection c[] = {{0, 1, 1.0}};
    RateAllocation x(2);
    x(0, 1) = 2.5 * R;
    const auto out = trim(x, TrafficMatrix(2, c), capped_nodes(2, 2.5 * R), unit_crossbar(2, 100, R), 9);
    CHECK(out.x(0, 1) == 2 * R);
    CHECK(out.increments_applied == 0);
    CHECK(out.residual_left == doctest::Approx(0.5 * R));
}

TEST_CASE("trim rejects mismatched sizes") {
    const Connection c[] = {{0, 1, 1.0}};
    CHECK_THROWS_AS(trim(RateAllocation(3), TrafficMatrix(2, c), capped_nodes(2, 1.0), unit_crossbar(2, 10), 0),
                    DimensionMismatch);
}

TEST_CASE("trim properties on solver output") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const auto inst = random_instance(16, 0.05 + 0.015 * static_cast<double>(seed), seed + 100);
        const auto sol = solve_iterative(inst.traffic, inst.nodes, inst.cfg, {1.0});
        REQUIRE(check_feasible(sol.x, inst.traffic, inst.nodes, inst.cfg).ok);
        const double R = inst.cfg.wavelength_rate;
        const auto out = trim(sol.x, inst.traffic, inst.nodes, inst.cfg, seed);
        const auto again = trim(sol.x, inst.traffic, inst.nodes, inst.cfg, seed);
        CHECK(out.x == again.x);
        CHECK(out.increments_applied == again.increments_applied);
        CHECK(check_feasible(out.x, inst.traffic, inst.nodes, inst.cfg).ok);
        CHECK(static_cast<double>(out.increments_applied) <= out.residual_start / R + 1e-9);
        for (std::size_t i = 0; i < out.x.values().size(); ++i) {
            CHECK(whole_multiple(out.x.values()[i], R));
            CHECK(std::abs(out.x.values()[i] - sol.x.values()[i]) < R);
        }
        // mass conservation up to the stranded residual
        const double removed = sol.x.total() - out.x.total();
        CHECK(removed == doctest::Approx(out.residual_left).epsilon(1e-9).scale(R));
    }
}
