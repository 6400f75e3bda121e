#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bufq/coding.hpp"
#include "bufq/queue_sim.hpp"

using namespace bufq;

namespace {

std::vector<double> take(CodewordStream s, std::size_t count) {
    std::vector<double> v(count);
    for (auto& x : v) x = s.next();
    return v;
}

QueueTrace transmit(const Codebook& book, std::size_t u, const ServiceModel& service, std::size_t n, Rng& rng) {
    return run_queue(encode(book, u).packets(), [&]() -> std::optional<double> { return service.sample(rng); }, n);
}

}  // namespace

TEST_CASE("codewords") {
    const Codebook book(4, 17, ArrivalModel::poisson(0.5));
    SUBCASE("packet zero and positivity") {
        const auto w = take(encode(book, 2), 200);
        CHECK(w[0] == 0.0);
        for (std::size_t j = 1; j < w.size(); ++j) CHECK(w[j] > 0);
    }
    SUBCASE("determinism") {
        CHECK(take(encode(book, 3), 100) == take(encode(book, 3), 100));
        const Codebook again(4, 17, ArrivalModel::poisson(0.5));
        CHECK(take(encode(again, 3), 100) == take(encode(book, 3), 100));
    }
    SUBCASE("distinct messages and seeds differ") {
        CHECK(take(encode(book, 1), 100) != take(encode(book, 2), 100));
        const Codebook other(4, 18, ArrivalModel::poisson(0.5));
        CHECK(take(encode(other, 1), 100) != take(encode(book, 1), 100));
    }
    SUBCASE("M = 1 is the u = 1 codeword") {
        const Codebook single(1, 17, ArrivalModel::poisson(0.5));
        CHECK(take(encode(single, 1), 50) == take(encode(book, 1), 50));
    }
    SUBCASE("index range") {
        CHECK_THROWS_AS(encode(book, 0), std::out_of_range);
        CHECK_THROWS_AS(encode(book, 5), std::out_of_range);
        CHECK_THROWS_AS(Codebook(0, 1, ArrivalModel::poisson(1.0)), std::invalid_argument);
    }
    SUBCASE("packets() starts at A_1") {
        auto src = encode(book, 2).packets();
        CHECK(*src() == book.inter_arrival(2, 1));
        CHECK(*src() == book.inter_arrival(2, 2));
    }
}

TEST_CASE("codeword gaps follow the arrival law") {
    const Codebook book(1, 5, ArrivalModel::poisson(2.0));
    auto s = encode(book, 1);
    s.next();
    double sum = 0;
    const int count = 200000;
    for (int j = 0; j < count; ++j) sum += s.next();
    // mean 0.5, standard error 0.5 / sqrt(count)
    CHECK(std::abs(sum / count - 0.5) < 3 * 0.5 / std::sqrt(double(count)));
}

TEST_CASE("idle reconstruction") {
    SUBCASE("hand trace codeword (0,1,1,1), d_0 = 2.5") {
        const Codebook unit_gaps(1, 0, ArrivalModel::renewal(ServiceModel::deterministic(1.0)));
        const std::vector<double> d{2.5};
        CHECK(reconstruct_idle(unit_gaps, 1, d) == 0.5);
    }
    SUBCASE("d_0 before the first packet") {
        const Codebook book(3, 9, ArrivalModel::poisson(0.5));
        const double a1 = book.inter_arrival(2, 1);
        const std::vector<double> d{0.5 * a1};
        CHECK(reconstruct_idle(book, 2, d) == a1 - 0.5 * a1);
    }
    SUBCASE("true message reproduces the simulator exactly") {
        Rng rng(3);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const Codebook book(8, seed, ArrivalModel::poisson(0.45));
            const auto service = seed % 2 ? ServiceModel::exponential(1.0) : ServiceModel::uniform(0.2, 1.8);
            const auto trace = transmit(book, 1 + seed % 8, service, 300, rng);
            IdleReconstructor r(book, 1 + seed % 8);
            for (std::size_t i = 0; i < 300; ++i) CHECK(r.push(trace.inter_departures[i]) == trace.idle[i]);
            const std::vector<double> prefix(trace.inter_departures.begin(), trace.inter_departures.begin() + 120);
            CHECK(reconstruct_idle(book, 1 + seed % 8, prefix) == trace.idle[119]);
        }
    }
    CHECK_THROWS_AS(reconstruct_idle(Codebook(1, 0, ArrivalModel::poisson(1.0)), 1, {}), std::invalid_argument);
}

TEST_CASE("maximum-likelihood decoding") {
    const auto exp1 = ServiceModel::exponential(1.0);
    SUBCASE("single hypothesis") {
        const Codebook book(1, 2, ArrivalModel::poisson(0.5));
        const std::vector<double> d{1.0, 7.0, 0.2};
        const auto r = ml_decode(book, d, exp1);
        REQUIRE(r.chosen);
        CHECK(*r.chosen == 1);
    }
    SUBCASE("sharply peaked service recovers the message") {
        const auto narrow = ServiceModel::uniform(1.0 - 1e-6, 1.0 + 1e-6);
        Rng rng(8);
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const Codebook book(2, seed, ArrivalModel::poisson(0.5));
            const std::size_t u = 1 + seed % 2;
            const auto trace = transmit(book, u, narrow, 6, rng);
            const auto r = ml_decode(book, trace.inter_departures, narrow);
            REQUIRE(r.chosen);
            CHECK(*r.chosen == u);
        }
    }
    SUBCASE("identical codewords tie and resolve to the smallest index") {
        const Codebook book(3, 0, ArrivalModel::renewal(ServiceModel::deterministic(1.0)));
        const std::vector<double> d{2.5, 1.5, 1.2};
        const auto r = ml_decode(book, d, exp1);
        REQUIRE(r.chosen);
        CHECK(*r.chosen == 1);
        CHECK(r.ties_broken);
        CHECK(r.scores[0] == r.scores[2]);
    }
    SUBCASE("impossible residuals eliminate hypotheses") {
        const Codebook book(2, 0, ArrivalModel::renewal(ServiceModel::deterministic(1.0)));
        // w_0 = 0.5, so d_1 = 0.4 leaves a negative service time for every u
        const std::vector<double> d{2.5, 0.4};
        const auto r = ml_decode(book, d, exp1);
        CHECK(r.failed());
        CHECK(r.scores[0] == -std::numeric_limits<double>::infinity());
    }
    SUBCASE("score is the service log-likelihood of the residuals") {
        const Codebook book(2, 4, ArrivalModel::poisson(0.5));
        Rng rng(1);
        const auto trace = transmit(book, 2, exp1, 10, rng);
        const auto r = ml_decode(book, trace.inter_departures, exp1);
        double expected = 0;
        for (std::size_t i = 1; i <= 10; ++i) expected += -trace.service[i];
        CHECK(r.scores[1] == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK_THROWS_AS(ml_decode(Codebook(1, 0, ArrivalModel::poisson(1.0)), std::vector<double>{1.0}, exp1),
                    std::invalid_argument);
}
