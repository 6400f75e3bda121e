#include "bufq/coding.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bufq {

namespace {

void check_message(const Codebook& book, std::size_t u) {
    if (u < 1 || u > book.size()) {
        throw std::out_of_range("message index " + std::to_string(u) + " outside 1.." + std::to_string(book.size()));
    }
}

}  // namespace

Codebook::Codebook(std::size_t messages, std::uint64_t seed, ArrivalModel law)
    : messages_(messages), seed_(seed), law_(law) {
    if (messages < 1) throw std::invalid_argument("a codebook needs at least one message");
}

double Codebook::inter_arrival(std::size_t u, std::size_t j) const {
    check_message(*this, u);
    if (j == 0) return 0.0;
    const std::uint64_t bits = splitmix64(splitmix64(splitmix64(seed_) ^ u) ^ j);
    return law_.quantile(open_unit(bits));
}

CodewordStream::CodewordStream(const Codebook& book, std::size_t u) : book_(&book), u_(u) { check_message(book, u); }

double CodewordStream::next() { return book_->inter_arrival(u_, j_++); }

InterArrivalSource CodewordStream::packets() const {
    return [book = book_, u = u_, j = std::size_t{1}]() mutable -> std::optional<double> {
        return book->inter_arrival(u, j++);
    };
}

CodewordStream encode(const Codebook& book, std::size_t u) { return CodewordStream(book, u); }

IdleReconstructor::IdleReconstructor(const Codebook& book, std::size_t u)
    : cursor_(CodewordStream(book, u).packets()) {}

double IdleReconstructor::push(double departure) {
    elapsed_ += departure;
    // codeword sources never run dry
    return cursor_.first_after(elapsed_)->epoch - elapsed_;
}

double reconstruct_idle(const Codebook& book, std::size_t u, std::span<const double> departures) {
    if (departures.empty()) throw std::invalid_argument("reconstruct_idle needs at least d_0");
    IdleReconstructor r(book, u);
    double w = 0.0;
    for (double d : departures) w = r.push(d);
    return w;
}

DecodeResult ml_decode(const Codebook& book, std::span<const double> departures, const ServiceModel& service) {
    if (departures.size() < 2) throw std::invalid_argument("decoding needs d_0 and at least one codeword departure");

    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    DecodeResult result;
    result.scores.assign(book.size(), neg_inf);

    for (std::size_t u = 1; u <= book.size(); ++u) {
        IdleReconstructor idle(book, u);
        double score = 0.0;
        for (std::size_t i = 1; i < departures.size(); ++i) {
            const double w = idle.push(departures[i - 1]);
            const double residual = departures[i] - w;
            const double lp = residual > 0 ? service.log_pdf(residual) : neg_inf;
            if (!(lp > neg_inf)) {
                score = neg_inf;
                break;
            }
            score += lp;
        }
        result.scores[u - 1] = score;
    }

    // one message: nothing to decide, even on departures it cannot explain
    if (book.size() == 1) {
        result.chosen = 1;
        return result;
    }

    double best = neg_inf;
    for (std::size_t u = 1; u <= book.size(); ++u) {
        const double s = result.scores[u - 1];
        if (s > best) {
            best = s;
            result.chosen = u;
            result.ties_broken = false;
        } else if (s == best && result.chosen) {
            result.ties_broken = true;
        }
    }
    return result;
}

}  // namespace bufq
