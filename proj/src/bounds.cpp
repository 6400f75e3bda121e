#include "bufq/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bufq/errors.hpp"
#include "bufq/parallel.hpp"
#include "bufq/quadrature.hpp"

namespace bufq {

namespace {

void require_rate(double r, const char* what) {
    if (!(r > 0) || !std::isfinite(r)) throw std::invalid_argument(what);
}

}  // namespace

double rate_R(double lambda, double mu) {
    require_rate(lambda, "arrival rate must be positive and finite");
    require_rate(mu, "service rate must be positive and finite");
    return (hypoexp_entropy(lambda, mu) - 1.0 + std::log(mu)) / (1.0 / lambda + 1.0 / mu);
}

double normalized_rate(double rho, double mu) { return per_mean_service(rate_R(rho * mu, mu), 1.0 / mu); }

double c_upper(double a, const ServiceModel& service) {
    if (!(a >= 0)) throw std::invalid_argument("c_upper needs a >= 0");
    // h(S) = -inf for a point mass: the relaxation is vacuous
    if (service.is_point_mass()) return std::numeric_limits<double>::infinity();
    return 1.0 + std::log(a + service.mean()) - service.entropy();
}

double universal_bound(const ServiceModel& service) {
    if (service.is_point_mass()) return std::numeric_limits<double>::infinity();
    const double h = service.entropy();
    const double mean = service.mean();
    if (h < std::log(mean)) return (1.0 + std::log(mean) - h) / mean;
    return 1.0 / std::exp(h);
}

double universal_bound_at(double lambda, const ServiceModel& service) {
    require_rate(lambda, "arrival rate must be positive and finite");
    return c_upper(1.0 / lambda, service) / (1.0 / lambda + service.mean());
}

double cas_bound(const ArrivalModel& arrivals, const ServiceModel& service) {
    if (!arrivals.is_poisson()) {
        throw std::invalid_argument("the idle-time law is only available for Poisson arrivals");
    }
    const double lambda = arrivals.rate();
    if (service.is_point_mass()) return std::numeric_limits<double>::infinity();
    const double h_d = DepartureModel::convolution(lambda, service).entropy();
    return (h_d - service.entropy()) / (1.0 / lambda + service.mean());
}

double g_rho(double rho) {
    if (!(rho > 0) || !std::isfinite(rho)) throw std::invalid_argument("rho must be positive and finite");
    if (std::abs(rho - 1.0) < erlang_switch) throw std::domain_error("G(rho) is undefined at rho = 1");

    const quad::Options opts{1e-12, 1e-12, 8000};
    quad::Result r;
    double sign = 1.0;
    if (rho < 1.0) {
        // y = -t, t > 0: e^{-t rho/(1-rho)} (1 - e^{-t}) (t + log(1 - e^{-t})),
        // integrated from y = 0 down to -inf, hence the sign flip
        const double k = rho / (1.0 - rho);
        auto f = [k](double t) {
            const double one_minus = -std::expm1(-t);
            return std::exp(-k * t) * one_minus * (t + std::log(one_minus));
        };
        r = quad::integrate_to_infinity(f, 0.0, std::max(1.0, 1.0 / k), opts);
        sign = -1.0;
    } else {
        const double decay = 1.0 / (rho - 1.0);
        auto f = [decay](double y) {
            const double m1 = std::expm1(-y);
            return std::exp(-decay * y) * m1 * std::log(-m1);
        };
        r = quad::integrate_to_infinity(f, 0.0, std::max(1.0, rho - 1.0), opts);
    }
    if (!r.converged) throw ConvergenceError("G(rho) quadrature", r.abs_error);
    return sign * r.value;
}

double hypoexp_entropy_rewritten(double lambda, double mu) {
    require_rate(lambda, "arrival rate must be positive and finite");
    require_rate(mu, "service rate must be positive and finite");
    const double rho = lambda / mu;
    const double ratio = rho / (1.0 - rho);
    return -std::log(mu) + (1.0 + 1.0 / rho) - std::log(std::abs(ratio)) +
           rho / ((1.0 - rho) * (1.0 - rho)) * g_rho(rho);
}

double rate_R_rewritten(double rho, double mu) {
    require_rate(mu, "service rate must be positive and finite");
    const double ratio = rho / (1.0 - rho);
    return mu * (1.0 - rho * std::log(std::abs(ratio)) + ratio * ratio * g_rho(rho)) / (1.0 + rho);
}

BoundCurve sweep(std::span<const double> rho_grid, double mu, const ServiceModel& service, unsigned threads) {
    require_rate(mu, "service rate must be positive and finite");
    for (double rho : rho_grid) require_rate(rho, "rho grid must be positive");

    BoundCurve curve;
    curve.mu = mu;
    curve.service = service.name();
    curve.rows.resize(rho_grid.size());
    const double mean = service.mean();
    parallel_for(rho_grid.size(), threads, [&](std::size_t i) {
        const double rho = rho_grid[i];
        const double lambda = rho * mu;
        curve.rows[i] = BoundRow{
            rho,
            normalized_rate(rho, mu),
            per_mean_service(universal_bound_at(lambda, service), mean),
            per_mean_service(cas_bound(ArrivalModel::poisson(lambda), service), mean),
        };
    });
    return curve;
}

OptimumReport maximize_rate(double mu, double lo, double hi, double tol) {
    require_rate(mu, "service rate must be positive and finite");
    if (!(lo > 0) || !(hi > lo)) throw std::invalid_argument("bracket must satisfy 0 < lo < hi");
    if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");

    constexpr double step = 0.01;
    auto f = [mu](double rho) { return normalized_rate(rho, mu); };

    const auto cells = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    std::size_t best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i <= cells; ++i) {
        const double v = f(lo + static_cast<double>(i) * step);
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }
    if (best == 0 || best == cells) {
        throw std::runtime_error("rate maximum is not interior to the bracket");
    }

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo + static_cast<double>(best - 1) * step;
    double b = lo + static_cast<double>(best + 1) * step;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double rho_star = 0.5 * (a + b);
    return {rho_star, f(rho_star), lo, hi, tol};
}

}  // namespace bufq
