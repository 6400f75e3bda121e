#include "bufq/achievability.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "bufq/bounds.hpp"
#include "bufq/coding.hpp"
#include "bufq/parallel.hpp"
#include "bufq/queue_sim.hpp"
#include "bufq/stats.hpp"

namespace bufq {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

void require_rate(double r, const char* what) {
    if (!(r > 0) || !std::isfinite(r)) throw std::invalid_argument(what);
}

}  // namespace

double expected_decode_time(double lambda, const ServiceModel& service, std::size_t n) {
    require_rate(lambda, "arrival rate must be positive and finite");
    return service.mean() + static_cast<double>(n) * (1.0 / lambda + service.mean());
}

DepartureModel departure_law(double lambda, const ServiceModel& service) {
    if (const auto* e = std::get_if<ServiceModel::Exponential>(&service.kind())) {
        return DepartureModel::hypoexponential(lambda, e->rate);
    }
    return DepartureModel::convolution(lambda, service);
}

std::optional<InfoDensitySample> info_density_trial(double lambda, const ServiceModel& service,
                                                    const DepartureModel& departures, std::size_t n, Rng& rng) {
    require_rate(lambda, "arrival rate must be positive and finite");
    if (n < 1) throw std::invalid_argument("n must be at least 1");

    const auto arrivals = ArrivalModel::poisson(lambda);
    const QueueTrace trace = run_queue([&]() -> std::optional<double> { return arrivals.sample(rng); },
                                       [&]() -> std::optional<double> { return service.sample(rng); }, n);

    const double t_n = expected_decode_time(lambda, service, n);
    if (service.is_point_mass()) return InfoDensitySample{inf, inf};

    // S_i equals D_i - W_{i-1}; the sampled value is used directly.
    CompensatedSum total;
    for (std::size_t i = 1; i <= n; ++i) {
        const double log_fs = service.log_pdf(trace.service[i]);
        const double log_fd = departures.log_pdf(trace.inter_departures[i]);
        if (!(log_fd > -inf) || !(log_fs > -inf)) return std::nullopt;
        total.add(log_fs - log_fd);
    }
    return InfoDensitySample{total.value(), total.value() / t_n};
}

std::optional<InfoDensitySample> info_density_trial(double lambda, const ServiceModel& service, std::size_t n,
                                                    Rng& rng) {
    return info_density_trial(lambda, service, departure_law(lambda, service), n, rng);
}

InfoDensityReport estimate_info_density(const InfoDensityConfig& config) {
    require_rate(config.lambda, "arrival rate must be positive and finite");
    if (config.n < 1) throw std::invalid_argument("n must be at least 1");
    if (config.trials < 1) throw std::invalid_argument("trials must be at least 1");

    InfoDensityReport report;
    report.lambda = config.lambda;
    report.mu = 1.0 / config.service.mean();
    report.service = config.service.name();
    report.n = config.n;
    report.trials = config.trials;
    report.seed = config.seed;
    report.decode_time = expected_decode_time(config.lambda, config.service, config.n);
    report.target = config.target ? *config.target : rate_R(config.lambda, report.mu);
    report.gamma = config.gamma ? *config.gamma : 0.05 * report.target;
    if (!(report.gamma > 0)) throw std::invalid_argument("gamma must be positive");

    const DepartureModel law = departure_law(config.lambda, config.service);
    std::vector<std::optional<InfoDensitySample>> samples(config.trials);
    parallel_for(config.trials, config.threads, [&](std::size_t t) {
        Rng rng(derive_seed(config.seed, t));
        samples[t] = info_density_trial(config.lambda, config.service, law, config.n, rng);
    });

    std::vector<double> totals;
    std::size_t in_tail = 0;
    for (const auto& s : samples) {
        if (!s) {
            ++report.failures;
            continue;
        }
        report.normalized.push_back(s->normalized);
        totals.push_back(s->total);
        if (s->normalized <= report.target - report.gamma) ++in_tail;
        if (std::isinf(s->normalized)) report.unbounded = true;
    }

    const std::size_t ok = report.normalized.size();
    if (ok > 0) report.tail_fraction = static_cast<double>(in_tail) / static_cast<double>(ok);
    if (report.unbounded) {
        report.mean = report.mean_total = inf;
        report.std_error = report.std_error_total = 0.0;
    } else {
        const auto per_time = summarize(report.normalized);
        const auto raw = summarize(totals);
        report.mean = per_time.mean;
        report.std_error = per_time.std_error;
        report.mean_total = raw.mean;
        report.std_error_total = raw.std_error;
    }
    return report;
}

std::vector<TailRow> empirical_liminf(double lambda, const ServiceModel& service,
                                      std::span<const std::size_t> n_schedule, std::size_t trials, double target,
                                      double gamma, std::uint64_t seed, unsigned threads) {
    if (!(gamma > 0)) throw std::invalid_argument("gamma must be positive");
    std::vector<TailRow> rows;
    rows.reserve(n_schedule.size());
    for (std::size_t i = 0; i < n_schedule.size(); ++i) {
        if (i > 0 && n_schedule[i] <= n_schedule[i - 1]) throw std::invalid_argument("n schedule must increase");
        InfoDensityConfig cfg;
        cfg.lambda = lambda;
        cfg.service = service;
        cfg.n = n_schedule[i];
        cfg.trials = trials;
        cfg.seed = derive_seed(seed, n_schedule[i]);
        cfg.target = target;
        cfg.gamma = gamma;
        cfg.threads = threads;
        const auto r = estimate_info_density(cfg);
        rows.push_back({r.n, r.mean, r.std_error, r.tail_fraction, r.failures});
    }
    return rows;
}

std::vector<DecodeRow> decode_rate_experiment(std::span<const std::size_t> messages, double lambda,
                                              const ServiceModel& service, std::span<const std::size_t> n_schedule,
                                              std::size_t trials, std::uint64_t seed, unsigned threads) {
    require_rate(lambda, "arrival rate must be positive and finite");
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");

    std::vector<DecodeRow> rows;
    for (std::size_t m : messages) {
        if (m < 1) throw std::invalid_argument("message counts must be at least 1");
        for (std::size_t n : n_schedule) {
            if (n < 1) throw std::invalid_argument("n must be at least 1");
            const std::uint64_t cell_seed = derive_seed(derive_seed(seed, m), n);

            struct Outcome {
                bool error = false;
                bool failure = false;
                bool mismatch = false;
            };
            std::vector<Outcome> outcomes(trials);
            parallel_for(trials, threads, [&](std::size_t t) {
                const std::uint64_t trial_seed = derive_seed(cell_seed, t);
                const Codebook book(m, derive_seed(trial_seed, 1), ArrivalModel::poisson(lambda));
                Rng rng(derive_seed(trial_seed, 2));
                const std::size_t u = 1 + static_cast<std::size_t>(rng() % m);

                const QueueTrace trace = run_queue(encode(book, u).packets(),
                                                   [&]() -> std::optional<double> { return service.sample(rng); }, n);
                const DecodeResult decoded = ml_decode(book, trace.inter_departures, service);

                Outcome& o = outcomes[t];
                o.failure = decoded.failed();
                o.error = decoded.failed() || *decoded.chosen != u;

                IdleReconstructor idle(book, u);
                for (std::size_t i = 0; i < n; ++i) {
                    if (idle.push(trace.inter_departures[i]) != trace.idle[i]) {
                        o.mismatch = true;
                        break;
                    }
                }
            });

            DecodeRow row{m, n, trials, 0, 0, 0, 0.0, 0.0};
            for (const auto& o : outcomes) {
                row.errors += o.error;
                row.failures += o.failure;
                row.idle_mismatches += o.mismatch;
            }
            row.error_rate = static_cast<double>(row.errors) / static_cast<double>(trials);
            row.operating_rate = std::log(static_cast<double>(m)) / expected_decode_time(lambda, service, n);
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<DecodeRow> decode_rate_experiment(std::span<const std::size_t> messages, double lambda, double mu,
                                              std::span<const std::size_t> n_schedule, std::size_t trials,
                                              std::uint64_t seed, unsigned threads) {
    return decode_rate_experiment(messages, lambda, ServiceModel::exponential(mu), n_schedule, trials, seed, threads);
}

}  // namespace bufq
