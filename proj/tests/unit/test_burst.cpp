#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "mwmr/burst.hpp"
#include "mwmr/convergence.hpp"
#include "mwmr/errors.hpp"
#include "mwmr/solver.hpp"

using namespace mwmr;
using testutil::capped_nodes;
using testutil::unit_crossbar;

TEST_CASE("burst solver examples") {
    SUBCASE("single connection") {
        const Connection c[] = {{0, 1, 1.0}};
        const auto b = solve_burst(TrafficMatrix(2, c), capped_nodes(2, 10.0), unit_crossbar(2, 100));
        CHECK(b.x(0, 1) == doctest::Approx(10.0));
        CHECK(b.surplus == doctest::Approx(90.0));
        CHECK(b.regime == BurstRegime::under_utilized);
    }
    SUBCASE("weights 1 and 3") {
        const Connection c[] = {{0, 2, 1.0}, {1, 2, 3.0}};
        const auto b = solve_burst(TrafficMatrix(3, c), capped_nodes(3, 8.0), unit_crossbar(3, 1000));
        CHECK(b.x(0, 2) == doctest::Approx(2.0));
        CHECK(b.x(1, 2) == doctest::Approx(6.0));
    }
    SUBCASE("fully utilized caps every rate") {
        const Connection c[] = {{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}};
        const auto b = solve_burst(TrafficMatrix(3, c), capped_nodes(3, 50.0), unit_crossbar(3, 100));
        CHECK(b.surplus == doctest::Approx(-50.0));
        CHECK(b.regime == BurstRegime::fully_utilized);
        CHECK(b.x(0, 1) == doctest::Approx(100.0 / 3.0));
        CHECK(b.x(1, 2) == doctest::Approx(100.0 / 3.0));
        CHECK(b.x(2, 0) == doctest::Approx(100.0 / 3.0));
    }
    SUBCASE("zero-capacity receiver gives zero rates") {
        std::vector<NodeState> nodes{{0.0, 0.0}, {5.0, 0.0}};
        const Connection c[] = {{1, 0, 1.0}, {0, 1, 1.0}};
        const auto b = solve_burst(TrafficMatrix(2, c), nodes, unit_crossbar(2, 100));
        CHECK(b.x(1, 0) == 0.0);
        CHECK(b.x(0, 1) == doctest::Approx(5.0));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(solve_burst(TrafficMatrix(2), capped_nodes(2, 1.0), unit_crossbar(2, 10)), InvalidInput);
    }
}

TEST_CASE("burst surplus matches the allocation") {
    const auto inst = random_instance(16, 0.2, 3);
    CHECK(burst_surplus(inst.traffic, inst.nodes, inst.cfg) ==
          doctest::Approx(solve_burst(inst.traffic, inst.nodes, inst.cfg).surplus));
}

TEST_CASE("burst properties on random instances") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::size_t> channels(5, 400);
    for (int trial = 0; trial < 300; ++trial) {
        auto inst = testutil::small_instance(rng, 6, 12, channels(rng));
        const auto b = solve_burst(inst.traffic, inst.nodes, inst.cfg);
        CHECK((b.surplus >= 0) == (b.regime == BurstRegime::under_utilized));
        CHECK(check_feasible(b.x, inst.traffic, inst.nodes, inst.cfg, 1e-12).ok);
        CHECK(b.x.total() <= inst.cfg.total_capacity() * (1 + 1e-12));
        if (b.surplus >= 0) {
            // ratios within each receiver follow the weights exactly
            for (const auto& p : inst.traffic.connections()) {
                for (const auto& q : inst.traffic.connections()) {
                    if (p.receiver != q.receiver) continue;
                    CHECK(b.x(p.sender, p.receiver) / p.weight ==
                          doctest::Approx(b.x(q.sender, q.receiver) / q.weight).epsilon(1e-12));
                }
            }
            const auto it = solve_iterative(inst.traffic, inst.nodes, inst.cfg, {1.0});
            for (const auto& p : inst.traffic.connections()) {
                CHECK(it.x(p.sender, p.receiver) == doctest::Approx(b.x(p.sender, p.receiver)).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("proportional shares never exceed the receiver capacity, even by rounding") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> w(0.0, 1.0), cap(1e9, 1e12);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t n = 2 + trial % 9;
        std::vector<Connection> conns;
        for (std::size_t s = 1; s < n; ++s) conns.push_back({s, 0, 1.0 - w(rng)});
        std::vector<NodeState> nodes(n, NodeState{cap(rng), 0.0});
        const TrafficMatrix a(n, conns);
        const auto b = solve_burst(a, nodes, unit_crossbar(n, 1u << 20, 1e7));
        double load = 0.0;
        for (const auto& c : a.connections()) load += b.x(c.sender, c.receiver);
        CHECK(load <= nodes[0].drain_rate);
    }
}
