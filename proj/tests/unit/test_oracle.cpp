#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "mwmr/bruteforce.hpp"
#include "mwmr/errors.hpp"

using namespace mwmr;
using testutil::capped_nodes;
using testutil::unit_crossbar;

TEST_CASE("brute force on a single connection") {
    const Connection c[] = {{0, 1, 1.0}};
    for (int res : {11, 20, 40}) {
        const auto r = solve_bruteforce(TrafficMatrix(2, c), capped_nodes(2, 10.0), unit_crossbar(2, 100), {1.0}, res);
        CHECK(r.x(0, 1) == doctest::Approx(10.0));
        CHECK(r.grid_step == doctest::Approx(10.0 / res));
    }
}

TEST_CASE("brute force on the weighted pair") {
    const Connection c[] = {{0, 2, 1.0}, {1, 2, 3.0}};
    const auto r = solve_bruteforce(TrafficMatrix(3, c), capped_nodes(3, 8.0), unit_crossbar(3, 1000), {1.0});
    CHECK(std::abs(r.x(0, 2) - 2.0) <= r.grid_step);
    CHECK(std::abs(r.x(1, 2) - 6.0) <= r.grid_step);
    CHECK(r.objective == doctest::Approx(std::log(2.0) + 3 * std::log(6.0)).epsilon(1e-6));
}

TEST_CASE("brute force edge cases") {
    const auto r = solve_bruteforce(TrafficMatrix(3), capped_nodes(3, 8.0), unit_crossbar(3, 10), {1.0});
    CHECK(r.x.total() == 0.0);

    std::vector<Connection> many;
    for (std::size_t s = 1; s < 10; ++s) many.push_back({s, 0, 1.0});
    CHECK_THROWS_AS(solve_bruteforce(TrafficMatrix(10, many), capped_nodes(10, 8.0), unit_crossbar(10, 10), {1.0}),
                    InstanceTooLarge);
    CHECK(auto_resolution(1) == 40);
    CHECK(auto_resolution(6) <= 11);
    CHECK(std::pow(auto_resolution(6), 6) <= 2e6);
}
