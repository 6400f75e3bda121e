#include "bufq/queue_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "bufq/errors.hpp"

namespace bufq {

AdmissionCursor::AdmissionCursor(InterArrivalSource next, std::vector<double>* epoch_log)
    : next_(std::move(next)), log_(epoch_log) {
    if (log_) log_->push_back(0.0);
}

std::optional<Admission> AdmissionCursor::first_after(double t) {
    while (epoch_ <= t) {
        const auto a = next_();
        if (!a) return std::nullopt;
        epoch_ += *a;
        ++index_;
        if (log_) log_->push_back(epoch_);
    }
    return Admission{index_, epoch_};
}

QueueTrace run_queue(InterArrivalSource arrivals, ServiceSource service, std::size_t n) {
    if (n < 1) throw std::invalid_argument("n must be at least 1");

    QueueTrace trace;
    trace.admitted.reserve(n + 1);
    trace.service.reserve(n + 1);
    trace.idle.reserve(n);
    trace.inter_departures.reserve(n + 1);
    trace.departure_epochs.reserve(n + 1);

    AdmissionCursor cursor(std::move(arrivals), &trace.arrival_epochs);
    auto next_service = [&service] {
        const auto s = service();
        if (!s) throw std::invalid_argument("service sequence is shorter than n + 1");
        if (!(*s > 0) || !std::isfinite(*s)) throw std::invalid_argument("service times must be positive");
        return *s;
    };

    const double s0 = next_service();
    double now = 0.0 + s0;
    trace.admitted.push_back(0);
    trace.service.push_back(s0);
    trace.inter_departures.push_back(s0);
    trace.departure_epochs.push_back(now);

    for (std::size_t i = 1; i <= n; ++i) {
        const auto next = cursor.first_after(now);
        if (!next) {
            throw ArrivalsExhausted("arrival sequence exhausted after " + std::to_string(i) + " of " +
                                    std::to_string(n + 1) + " departures");
        }
        const double w = next->epoch - now;
        const double s = next_service();
        const double d = w + s;
        now += d;
        trace.admitted.push_back(next->index);
        trace.idle.push_back(w);
        trace.service.push_back(s);
        trace.inter_departures.push_back(d);
        trace.departure_epochs.push_back(now);
    }
    return trace;
}

namespace {

std::function<std::optional<double>()> from_list(const std::vector<double>& values, const char* what) {
    for (double v : values) {
        if (!(v > 0) || !std::isfinite(v)) throw std::invalid_argument(what);
    }
    return [&values, i = std::size_t{0}]() mutable -> std::optional<double> {
        if (i == values.size()) return std::nullopt;
        return values[i++];
    };
}

}  // namespace

QueueTrace simulate(const SimConfig& config) {
    Rng arrival_rng(derive_seed(config.seed, 1));
    Rng service_rng(derive_seed(config.seed, 2));

    InterArrivalSource arrivals;
    if (const auto* model = std::get_if<ArrivalModel>(&config.arrivals)) {
        arrivals = [model, &arrival_rng]() -> std::optional<double> { return model->sample(arrival_rng); };
    } else {
        arrivals = from_list(std::get<std::vector<double>>(config.arrivals),
                             "explicit inter-arrival times must be positive");
    }

    ServiceSource service;
    if (const auto* model = std::get_if<ServiceModel>(&config.service)) {
        service = [model, &service_rng]() -> std::optional<double> { return model->sample(service_rng); };
    } else {
        service = from_list(std::get<std::vector<double>>(config.service),
                            "explicit service times must be positive");
    }

    return run_queue(std::move(arrivals), std::move(service), config.n);
}

std::vector<std::size_t> admitted_indices(std::span<const double> arrival_epochs,
                                          std::span<const double> departure_epochs) {
    std::vector<std::size_t> k{0};
    for (double t : departure_epochs) {
        const auto it = std::upper_bound(arrival_epochs.begin(), arrival_epochs.end(), t);
        if (it == arrival_epochs.end()) break;
        k.push_back(static_cast<std::size_t>(it - arrival_epochs.begin()));
    }
    return k;
}

void write_trace_csv(std::ostream& out, const QueueTrace& trace) {
    out << "i,k,service,idle_before,inter_departure,departure_epoch\n";
    char buf[256];
    for (std::size_t i = 0; i < trace.departures(); ++i) {
        char idle[32] = "";
        if (i > 0) std::snprintf(idle, sizeof idle, "%.17g", trace.idle[i - 1]);
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%s,%.17g,%.17g\n", i, trace.admitted[i], trace.service[i], idle,
                      trace.inter_departures[i], trace.departure_epochs[i]);
        out << buf;
    }
}

}  // namespace bufq
