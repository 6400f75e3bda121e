#pragma once

// Converse bounds and the M/M/1 rate function. Every bound returns nats per
// unit time; per_mean_service() converts to nats per mean service time,
// the unit used in reported curves.

#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "bufq/distributions.hpp"

namespace bufq {

// Maximum rate of the work-conserving exponential-server queue, in nats per
// mean service time. Only used as an external reference line.
inline constexpr double work_conserving_reference = 1.0 / std::numbers::e;

inline double per_mean_service(double rate_per_time, double mean_service) { return rate_per_time * mean_service; }

// R(lambda, mu) = (h_hypo(lambda, mu) - 1 + log mu) / (1/lambda + 1/mu).
double rate_R(double lambda, double mu);

// R(rho * mu, mu) / mu; depends on rho only.
double normalized_rate(double rho, double mu = 1.0);

// c(a) <= log e + log(a + E[S]) - h(S). +inf for a point mass.
double c_upper(double a, const ServiceModel& service);

// Closed-form universal bound, the supremum over lambda of
// c_upper(1/lambda) / (1/lambda + E[S]):
//   mu [log e + log(1/mu) - h(S)]   if h(S) < log(1/mu)
//   (log e) / exp(h(S))             otherwise,
// and +inf for a point mass.
double universal_bound(const ServiceModel& service);

// The same relaxation before the supremum, at one arrival rate.
double universal_bound_at(double lambda, const ServiceModel& service);

// [h(W + S) - h(S)] / (1/lambda + E[S]) with W ~ Exp(lambda), valid for
// Poisson arrivals only (std::invalid_argument otherwise). h(W + S) comes
// from the numerical convolution, never from the hypoexponential closed
// form. A point-mass service makes the mutual information, and the bound,
// +inf.
double cas_bound(const ArrivalModel& arrivals, const ServiceModel& service);

// Oriented integral of e^{-y/(rho-1)} (e^{-y} - 1) log|e^{-y} - 1| dy from 0
// to (rho - 1) * inf, i.e. along the image of x in (0, inf) under
// y = (lambda - mu) x. For rho < 1 this is the real branch y < 0.
// Undefined at rho = 1 (std::domain_error).
double g_rho(double rho);

// h_hypo rebuilt from g_rho:
//   -log mu + (1 + 1/rho) - log|rho/(1-rho)| + rho/(1-rho)^2 G(rho).
double hypoexp_entropy_rewritten(double lambda, double mu);

// mu [1 - rho log|rho/(1-rho)| + (rho/(1-rho))^2 G(rho)] / (1 + rho).
double rate_R_rewritten(double rho, double mu);

struct BoundRow {
    double rho;
    double rate_R_norm;
    double universal_norm;  // universal_bound_at(rho * mu)
    double cas_norm;
};

struct BoundCurve {
    double mu = 1.0;
    std::string service;
    std::vector<BoundRow> rows;
};

BoundCurve sweep(std::span<const double> rho_grid, double mu, const ServiceModel& service, unsigned threads = 1);

struct OptimumReport {
    double rho_star;
    double value;  // max_rho R / mu
    double bracket_lo;
    double bracket_hi;
    double tolerance;
};

// Scans [lo, hi] on a 0.01 grid in rho, then golden-section refines the best
// cell to `tol` in rho. Throws std::runtime_error if the best grid point sits
// on the bracket edge.
OptimumReport maximize_rate(double mu, double lo = 0.01, double hi = 10.0, double tol = 1e-6);

}  // namespace bufq
