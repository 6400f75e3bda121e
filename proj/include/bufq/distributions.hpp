#pragma once

// Service, inter-arrival and inter-departure laws. Durations are in abstract
// time units; log-densities and entropies are in nats.

#include <string>
#include <utility>
#include <variant>

#include "bufq/random.hpp"

namespace bufq {

// Relative distance |lambda - mu| / mu below which the hypoexponential
// density is replaced by its Erlang-2 limit.
inline constexpr double erlang_switch = 1e-9;

// Quantile level that truncates the hypoexponential entropy integral.
inline constexpr double entropy_truncation_mass = 1e-12;

// Absolute error target for entropy quadratures.
inline constexpr double entropy_abs_tol = 1e-8;

class ServiceModel {
public:
    struct Exponential {
        double rate;
    };
    struct Deterministic {
        double duration;
    };
    struct Erlang {
        int shape;
        double rate;
    };
    struct Uniform {
        double lo;
        double hi;
    };
    using Kind = std::variant<Exponential, Deterministic, Erlang, Uniform>;

    // Factories validate parameters and throw std::invalid_argument.
    static ServiceModel exponential(double rate);
    static ServiceModel deterministic(double duration);
    static ServiceModel erlang(int shape, double rate);
    static ServiceModel uniform(double lo, double hi);

    const Kind& kind() const noexcept { return kind_; }
    std::string name() const;

    double mean() const noexcept;
    bool is_point_mass() const noexcept { return std::holds_alternative<Deterministic>(kind_); }
    bool is_exponential() const noexcept { return std::holds_alternative<Exponential>(kind_); }

    // Closed support [lo, hi]; hi is +inf for unbounded laws.
    std::pair<double, double> support() const noexcept;

    double sample(Rng& rng) const;

    // Log-density with respect to Lebesgue measure; -inf outside the support.
    // A point mass has no density: it reports +inf on its atom (matched to a
    // relative 1e-9) and -inf elsewhere.
    double log_pdf(double x) const noexcept;
    double pdf(double x) const noexcept;

    // Inverse CDF for p in (0, 1).
    double quantile(double p) const;

    // Differential entropy. Closed form for exponential and uniform laws,
    // quadrature for Erlang; throws UndefinedEntropyError for a point mass.
    double entropy() const;

private:
    explicit ServiceModel(Kind k) : kind_(k) {}
    Kind kind_;
};

class ArrivalModel {
public:
    static ArrivalModel poisson(double rate);
    static ArrivalModel renewal(ServiceModel inter_arrival);

    bool is_poisson() const noexcept { return poisson_; }
    const ServiceModel& inter_arrival() const noexcept { return law_; }
    double rate() const noexcept { return 1.0 / law_.mean(); }
    std::string name() const;

    double sample(Rng& rng) const { return law_.sample(rng); }
    double quantile(double p) const { return law_.quantile(p); }

private:
    ArrivalModel(ServiceModel law, bool poisson) : law_(law), poisson_(poisson) {}
    ServiceModel law_;
    bool poisson_;
};

// Law of D = W + S with W ~ Exp(lambda) independent of S.
class DepartureModel {
public:
    static DepartureModel hypoexponential(double lambda, double mu);
    static DepartureModel convolution(double lambda, ServiceModel service);

    bool is_hypoexponential() const noexcept { return hypo_; }
    double idle_rate() const noexcept { return lambda_; }
    const ServiceModel& service() const noexcept { return service_; }

    double mean() const noexcept { return 1.0 / lambda_ + service_.mean(); }
    double sample(Rng& rng) const;
    double log_pdf(double d) const;
    double pdf(double d) const;
    double entropy() const;

private:
    DepartureModel(double lambda, ServiceModel service, bool hypo)
        : lambda_(lambda), service_(service), hypo_(hypo) {}
    double convolution_pdf(double d) const;

    double lambda_;
    ServiceModel service_;
    bool hypo_;
};

double hypoexp_log_pdf(double lambda, double mu, double d) noexcept;
double hypoexp_survival(double lambda, double mu, double d) noexcept;

// h(W + S) for W ~ Exp(lambda), S ~ Exp(mu), by adaptive quadrature on
// [0, Q] (Q the 1 - 1e-12 quantile) plus an exponential-tail correction.
// Throws ConvergenceError if the error estimate exceeds 1e-8.
double hypoexp_entropy(double lambda, double mu);

}  // namespace bufq
