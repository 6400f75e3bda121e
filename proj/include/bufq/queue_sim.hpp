#pragma once

// Bufferless single-server queue: an arrival that finds the server busy is
// dropped; the first arrival strictly after a departure starts the next
// service.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "bufq/distributions.hpp"
#include "bufq/random.hpp"

namespace bufq {

struct QueueTrace {
    std::vector<double> arrival_epochs;    // every arrival generated, epoch 0 first
    std::vector<std::size_t> admitted;     // k_0 = 0, k_1, ..., k_n
    std::vector<double> service;           // S_0 .. S_n
    std::vector<double> idle;              // W_0 .. W_{n-1}
    std::vector<double> inter_departures;  // D_0 .. D_n
    std::vector<double> departure_epochs;  // running sums of D

    std::size_t departures() const noexcept { return inter_departures.size(); }
};

struct Admission {
    std::size_t index;
    double epoch;
};

// Next inter-arrival time A_1, A_2, ...; nullopt once a finite sequence ends.
using InterArrivalSource = std::function<std::optional<double>()>;

// Walks an arrival sequence (packet 0 at epoch 0, epochs accumulated from the
// inter-arrivals in order) and finds the first arrival strictly after a
// given epoch. The simulator and the decoder both go through this class, so
// they produce bit-identical epochs and idle times.
class AdmissionCursor {
public:
    explicit AdmissionCursor(InterArrivalSource next, std::vector<double>* epoch_log = nullptr);

    // First arrival with epoch > t; nullopt when the source runs dry.
    // Successive calls must use nondecreasing t.
    std::optional<Admission> first_after(double t);

private:
    InterArrivalSource next_;
    std::vector<double>* log_;
    std::size_t index_ = 0;
    double epoch_ = 0.0;
};

// Next service time S_0, S_1, ...; nullopt once an explicit list ends.
using ServiceSource = std::function<std::optional<double>()>;

// Core recursion: D_0 = S_0, W_{i-1} = (epoch of k_i) - (departure epoch i-1),
// D_i = W_{i-1} + S_i for i = 1..n. Throws ArrivalsExhausted if the arrival
// source ends first.
QueueTrace run_queue(InterArrivalSource arrivals, ServiceSource service, std::size_t n);

struct SimConfig {
    // A model, or explicit inter-arrivals A_1, A_2, ... (A_0 = 0 is implied).
    std::variant<ArrivalModel, std::vector<double>> arrivals = ArrivalModel::poisson(1.0);
    // A model, or explicit service times S_0, S_1, ...
    std::variant<ServiceModel, std::vector<double>> service = ServiceModel::exponential(1.0);
    std::size_t n = 1;
    std::uint64_t seed = default_seed;
};

// Simulates n + 1 departures. Random parts draw from streams derived from the
// seed (one for arrivals, one for services).
QueueTrace simulate(const SimConfig& config);

// k_0 = 0 and, for every departure epoch t_{i-1} that some later arrival
// exceeds, the first arrival index with epoch > t_{i-1}. Both inputs must be
// nondecreasing.
std::vector<std::size_t> admitted_indices(std::span<const double> arrival_epochs,
                                          std::span<const double> departure_epochs);

// CSV with header i,k,service,idle_before,inter_departure,departure_epoch.
// idle_before is W_{i-1}, empty for i = 0.
void write_trace_csv(std::ostream& out, const QueueTrace& trace);

}  // namespace bufq
