#include <doctest.h>

#include <sstream>
#include <vector>

#include "bufq/errors.hpp"
#include "bufq/queue_sim.hpp"
#include "bufq/stats.hpp"

using namespace bufq;

namespace {

SimConfig explicit_config(std::vector<double> gaps, std::vector<double> services, std::size_t n) {
    SimConfig c;
    c.arrivals = std::move(gaps);
    c.service = std::move(services);
    c.n = n;
    return c;
}

}  // namespace

TEST_CASE("hand trace: arrivals at 0,1,2,3") {
    const auto t = simulate(explicit_config({1, 1, 1}, {2.5, 1.0}, 1));
    REQUIRE(t.departures() == 2);
    CHECK(t.admitted == std::vector<std::size_t>{0, 3});
    CHECK(t.idle == std::vector<double>{0.5});
    CHECK(t.inter_departures == std::vector<double>{2.5, 1.5});
    CHECK(t.departure_epochs == std::vector<double>{2.5, 4.0});
    CHECK(t.service == std::vector<double>{2.5, 1.0});

    std::ostringstream csv;
    write_trace_csv(csv, t);
    CHECK(csv.str() ==
          "i,k,service,idle_before,inter_departure,departure_epoch\n"
          "0,0,2.5,,2.5,2.5\n"
          "1,3,1,0.5,1.5,4\n");
}

TEST_CASE("no drops when the next arrival comes late") {
    const auto t = simulate(explicit_config({10}, {2.5, 1.0}, 1));
    CHECK(t.admitted == std::vector<std::size_t>{0, 1});
    CHECK(t.idle == std::vector<double>{7.5});
}

TEST_CASE("an arrival exactly at a departure epoch is dropped") {
    const auto t = simulate(explicit_config({2.5, 0.5}, {2.5, 1.0}, 1));
    CHECK(t.admitted == std::vector<std::size_t>{0, 2});
    CHECK(t.idle == std::vector<double>{0.5});
}

TEST_CASE("exhaustion and bad input") {
    CHECK_THROWS_AS(simulate(explicit_config({1}, {2.5, 1.0}, 1)), ArrivalsExhausted);
    CHECK_THROWS_AS(simulate(explicit_config({1, 1, 1}, {2.5}, 1)), std::invalid_argument);
    CHECK_THROWS_AS(simulate(explicit_config({1, 1, 1}, {2.5, -1.0}, 1)), std::invalid_argument);
    CHECK_THROWS_AS(simulate(explicit_config({1, -1, 1}, {2.5, 1.0}, 1)), std::invalid_argument);
}

TEST_CASE("admitted indices") {
    const std::vector<double> epochs{0, 1, 2, 3};
    const auto k = admitted_indices(epochs, std::vector<double>{2.5, 4.0});
    // (0, 3); nothing in the list exceeds epoch 4
    CHECK(k == std::vector<std::size_t>{0, 3});
    const auto k2 = admitted_indices(std::vector<double>{0, 1, 2, 3, 4.5}, std::vector<double>{2.5, 4.0});
    CHECK(k2 == std::vector<std::size_t>{0, 3, 4});
    CHECK(admitted_indices(std::vector<double>{0}, std::vector<double>{2.5}) == std::vector<std::size_t>{0});
    CHECK(admitted_indices(std::vector<double>{0, 2.5, 3}, std::vector<double>{2.5}) ==
          std::vector<std::size_t>{0, 2});
}

TEST_CASE("random traces satisfy the recursion") {
    for (auto [lambda, svc] : {std::pair{0.5, ServiceModel::exponential(1.0)},
                               {2.0, ServiceModel::erlang(2, 2.0)},
                               {1.0, ServiceModel::uniform(0.5, 1.5)},
                               {0.3, ServiceModel::deterministic(1.0)}}) {
        SimConfig c;
        c.arrivals = ArrivalModel::poisson(lambda);
        c.service = svc;
        c.n = 2000;
        c.seed = 99;
        const auto t = simulate(c);
        REQUIRE(t.departures() == c.n + 1);
        REQUIRE(t.idle.size() == c.n);
        CHECK(t.admitted[0] == 0);
        CHECK(t.inter_departures[0] == t.service[0]);

        double epoch = 0;
        for (std::size_t i = 0; i <= c.n; ++i) {
            epoch += t.inter_departures[i];
            CHECK(t.departure_epochs[i] == epoch);
            if (i == 0) continue;
            CHECK(t.admitted[i] > t.admitted[i - 1]);
            CHECK(t.inter_departures[i] == t.idle[i - 1] + t.service[i]);
            CHECK(t.idle[i - 1] > 0);
            // W from the arrival epochs alone
            CHECK(t.arrival_epochs[t.admitted[i]] - t.departure_epochs[i - 1] == t.idle[i - 1]);
            // everything between two admissions was dropped
            CHECK(t.arrival_epochs[t.admitted[i] - 1] <= t.departure_epochs[i - 1]);
        }
        const std::vector<double> prev(t.departure_epochs.begin(), t.departure_epochs.end() - 1);
        const auto k = admitted_indices(t.arrival_epochs, prev);
        CHECK(k == t.admitted);
    }
}

TEST_CASE("Poisson arrivals give exponential idle times") {
    SimConfig c;
    c.arrivals = ArrivalModel::poisson(0.4);
    c.service = ServiceModel::uniform(0.0, 2.0);
    c.n = 200000;
    const auto t = simulate(c);
    const auto s = summarize(t.idle);
    CHECK(std::abs(s.mean - 2.5) < 3 * s.std_error);
    CHECK(s.std_dev == doctest::Approx(2.5).epsilon(0.01));
}

TEST_CASE("seeded simulation is reproducible and seed-sensitive") {
    SimConfig c;
    c.arrivals = ArrivalModel::poisson(1.0);
    c.service = ServiceModel::exponential(1.0);
    c.n = 50;
    const auto a = simulate(c);
    const auto b = simulate(c);
    CHECK(a.inter_departures == b.inter_departures);
    c.seed += 1;
    CHECK(simulate(c).inter_departures != a.inter_departures);
}
