#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bufq/distributions.hpp"
#include "bufq/queue_sim.hpp"

namespace bufq {

// M random codewords of iid inter-arrival times. A_{u,j} is a pure function
// of (seed, u, j): the hash of the triple is mapped to (0, 1) and pushed
// through the inverse CDF of the inter-arrival law, so codewords are
// infinite and never stored. Messages are numbered 1..M.
class Codebook {
public:
    Codebook(std::size_t messages, std::uint64_t seed, ArrivalModel law);

    std::size_t size() const noexcept { return messages_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const ArrivalModel& law() const noexcept { return law_; }

    // A_{u,0} = 0 (packet zero); A_{u,j} > 0 for j >= 1.
    double inter_arrival(std::size_t u, std::size_t j) const;

private:
    std::size_t messages_;
    std::uint64_t seed_;
    ArrivalModel law_;
};

// Lazy codeword for message u: yields A_0 = 0, then A_{u,1}, A_{u,2}, ...
class CodewordStream {
public:
    CodewordStream(const Codebook& book, std::size_t u);

    double next();
    std::size_t position() const noexcept { return j_; }

    // The codeword packets A_{u,1}, A_{u,2}, ... as an arrival source for the
    // queue (packet zero is implicit there).
    InterArrivalSource packets() const;

private:
    const Codebook* book_;
    std::size_t u_;
    std::size_t j_ = 0;
};

// Throws std::out_of_range unless 1 <= u <= M.
CodewordStream encode(const Codebook& book, std::size_t u);

// Incremental w_{i-1}(u, d^{i-1}): feed d_0, d_1, ... one at a time; each call
// returns the idle time that follows that departure under hypothesis u.
class IdleReconstructor {
public:
    IdleReconstructor(const Codebook& book, std::size_t u);

    double push(double departure);

private:
    AdmissionCursor cursor_;
    double elapsed_ = 0.0;
};

// w_{i-1} for departures d_0 .. d_{i-1}; requires at least one departure.
double reconstruct_idle(const Codebook& book, std::size_t u, std::span<const double> departures);

struct DecodeResult {
    std::optional<std::size_t> chosen;  // empty when every hypothesis is impossible
    std::vector<double> scores;         // scores[u - 1]
    bool ties_broken = false;

    bool failed() const noexcept { return !chosen.has_value(); }
};

// Maximum-likelihood decoding from inter-departures d_0 .. d_n: message u
// scores sum_{i=1..n} log f_S(d_i - w_{i-1}(u, d^{i-1})). A nonpositive or
// otherwise impossible residual eliminates u. Ties go to the smallest index.
// With M = 1 the only message is chosen whatever its score.
DecodeResult ml_decode(const Codebook& book, std::span<const double> departures, const ServiceModel& service);

}  // namespace bufq
