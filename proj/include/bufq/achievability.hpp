#pragma once

// Monte Carlo information density for Poisson-driven bufferless queues and
// the operational encode -> queue -> decode experiment.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bufq/distributions.hpp"
#include "bufq/random.hpp"

namespace bufq {

// T_n = E[S_0] + n (1/lambda + E[S]).
double expected_decode_time(double lambda, const ServiceModel& service, std::size_t n);

// The inter-departure law under Poisson(lambda) arrivals: hypoexponential for
// exponential service, numerical convolution otherwise.
DepartureModel departure_law(double lambda, const ServiceModel& service);

struct InfoDensitySample {
    double total;       // sum_{i=1..n} [log f_S(S_i) - log f_D(D_i)]
    double normalized;  // total / T_n
};

// One trace of n codeword departures under Poisson(lambda) arrivals. Returns
// nullopt when a sampled D_i has zero modelled density (a trial failure).
// A point-mass service yields +inf.
std::optional<InfoDensitySample> info_density_trial(double lambda, const ServiceModel& service,
                                                    const DepartureModel& departures, std::size_t n, Rng& rng);

std::optional<InfoDensitySample> info_density_trial(double lambda, const ServiceModel& service, std::size_t n,
                                                    Rng& rng);

struct InfoDensityConfig {
    double lambda = 1.0;
    ServiceModel service = ServiceModel::exponential(1.0);
    std::size_t n = 1000;
    std::size_t trials = 100;
    std::uint64_t seed = default_seed;
    std::optional<double> target;  // defaults to rate_R(lambda, 1/E[S])
    std::optional<double> gamma;   // defaults to 0.05 * target
    unsigned threads = 1;
};

struct InfoDensityReport {
    double lambda = 0.0;
    double mu = 0.0;  // 1 / E[S]
    std::string service;
    std::size_t n = 0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    double decode_time = 0.0;            // T_n
    std::vector<double> normalized;      // per successful trial, in trial order
    std::size_t failures = 0;
    double mean = 0.0;
    double std_error = 0.0;
    double mean_total = 0.0;             // mean of the unnormalized density
    double std_error_total = 0.0;
    double target = 0.0;
    double gamma = 0.0;
    double tail_fraction = 0.0;          // P[i/T_n <= target - gamma]
    bool unbounded = false;              // point-mass service: density is +inf
};

InfoDensityReport estimate_info_density(const InfoDensityConfig& config);

struct TailRow {
    std::size_t n;
    double mean;
    double std_error;
    double tail_fraction;
    std::size_t failures;
};

// Tail fraction P[i/T_n <= target - gamma] along an increasing n schedule.
std::vector<TailRow> empirical_liminf(double lambda, const ServiceModel& service,
                                      std::span<const std::size_t> n_schedule, std::size_t trials, double target,
                                      double gamma, std::uint64_t seed = default_seed, unsigned threads = 1);

struct DecodeRow {
    std::size_t messages;
    std::size_t n;
    std::size_t trials;
    std::size_t errors;
    std::size_t failures;         // trials where every hypothesis was eliminated
    std::size_t idle_mismatches;  // trials where reconstruct_idle(true u) != simulated W
    double error_rate;
    double operating_rate;        // log(M) / T_n, nats per unit time
};

// For each (M, n): fresh random codebook per trial (exponential(lambda)
// inter-arrivals), uniform message, queue simulation, ML decoding.
std::vector<DecodeRow> decode_rate_experiment(std::span<const std::size_t> messages, double lambda,
                                              const ServiceModel& service, std::span<const std::size_t> n_schedule,
                                              std::size_t trials, std::uint64_t seed = default_seed,
                                              unsigned threads = 1);

std::vector<DecodeRow> decode_rate_experiment(std::span<const std::size_t> messages, double lambda, double mu,
                                              std::span<const std::size_t> n_schedule, std::size_t trials,
                                              std::uint64_t seed = default_seed, unsigned threads = 1);

}  // namespace bufq
