#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace bufq {

// Neumaier-compensated running sum; order-independent to ~1 ulp of the
// total for the trial counts used here.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            carry_ += (sum_ - t) + x;
        } else {
            carry_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

struct SampleSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double std_dev = 0.0;    // unbiased sample standard deviation
    double std_error = 0.0;  // std_dev / sqrt(count)
};

inline SampleSummary summarize(std::span<const double> xs) {
    SampleSummary s;
    s.count = xs.size();
    if (xs.empty()) return s;
    CompensatedSum sum;
    for (double x : xs) sum.add(x);
    s.mean = sum.value() / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        CompensatedSum sq;
        for (double x : xs) sq.add((x - s.mean) * (x - s.mean));
        s.std_dev = std::sqrt(sq.value() / static_cast<double>(xs.size() - 1));
        s.std_error = s.std_dev / std::sqrt(static_cast<double>(xs.size()));
    }
    return s;
}

}  // namespace bufq
