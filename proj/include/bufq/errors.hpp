#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace bufq {

// Adaptive quadrature missed its error target.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double achieved_error)
        : std::runtime_error(format(what, achieved_error)), achieved_error_(achieved_error) {}

    double achieved_error() const noexcept { return achieved_error_; }

private:
    static std::string format(const std::string& what, double err) {
        char buf[64];
        std::snprintf(buf, sizeof buf, " (achieved error estimate %.3g)", err);
        return what + buf;
    }

    double achieved_error_;
};

// The law has no differential entropy (point mass).
class UndefinedEntropyError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A finite explicit arrival sequence ran out before the requested departures.
class ArrivalsExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace bufq
