#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "bufq/achievability.hpp"
#include "bufq/bounds.hpp"
#include "bufq/errors.hpp"
#include "bufq/queue_sim.hpp"
#include "bufq/random.hpp"

namespace bufq::cli {

namespace {

using json = nlohmann::ordered_json;
using Config = std::vector<std::pair<std::string, std::string>>;

struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json jnum(double x) {
    if (std::isfinite(x)) return x;
    return num(x);
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(v[i]);
    }
    return s;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    if (!text.empty() && text.back() == sep) parts.emplace_back();
    return parts;
}

double to_double(const std::string& s, const std::string& field) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ValidationError(field + ": '" + s + "' is not a number");
    }
    if (used != s.size()) throw ValidationError(field + ": '" + s + "' is not a number");
    return v;
}

void positive(double v, const std::string& field) {
    if (!(v > 0) || !std::isfinite(v)) throw ValidationError(field + " must be positive and finite");
}

void at_least_one(std::size_t v, const std::string& field) {
    if (v < 1) throw ValidationError(field + " must be at least 1");
}

struct Common {
    std::uint64_t seed = default_seed;
    unsigned threads = 1;
    std::string out;
    std::string format = "csv";
};

void add_common(CLI::App* cmd, Common& c, bool random) {
    if (random) {
        cmd->add_option("--seed", c.seed, "master seed")->capture_default_str();
        cmd->add_option("--threads", c.threads, "worker threads, 0 = all cores")->capture_default_str();
    }
    cmd->add_option("--out", c.out, "output file");
    cmd->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

void write_config_comment(std::ostream& os, const std::string& command, const Config& cfg) {
    os << "# bufq " << command;
    for (const auto& [k, v] : cfg) os << ' ' << k << '=' << v;
    os << '\n';
}

json config_json(const std::string& command, const Config& cfg) {
    json j;
    j["command"] = command;
    for (const auto& [k, v] : cfg) j[k] = v;
    return j;
}

class Sink {
public:
    Sink(std::ostream& fallback, std::ostream& err, const std::string& command, const Common& c) : os_(&fallback) {
        std::string path = c.out;
        if (path.empty()) {
            if (const char* dir = std::getenv(output_dir_env); dir && *dir) {
                path = (std::filesystem::path(dir) / (command + "." + c.format)).string();
            }
        }
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw ValidationError("--out: cannot open '" + path + "'");
            os_ = &file_;
            err << "wrote " << path << '\n';
        }
    }
    std::ostream& stream() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_;
};

// bounds ---------------------------------------------------------------

struct BoundsArgs {
    double mu = 1.0;
    std::string rho = "0.01:10:200";
    std::string service = "exponential";
    Common common;
};

void run_bounds(const BoundsArgs& a, std::ostream& out, std::ostream& err) {
    positive(a.mu, "--mu");
    const auto grid = parse_grid(a.rho);
    for (double r : grid) positive(r, "--rho");
    const ServiceModel service = parse_service(a.service, a.mu);

    const BoundCurve curve = sweep(grid, a.mu, service, a.common.threads);
    const Config cfg{{"mu", num(a.mu)}, {"rho", a.rho}, {"service", service.name()}};
    const std::string reference = "external reference: work-conserving exponential server, 1/e nats per mean service time";

    Sink sink(out, err, "bounds", a.common);
    auto& os = sink.stream();
    if (a.common.format == "json") {
        json j;
        j["config"] = config_json("bounds", cfg);
        j["units"] = "nats per mean service time";
        j["reference"] = {{"label", reference}, {"value", work_conserving_reference}};
        j["universal_bound"] = jnum(per_mean_service(universal_bound(service), service.mean()));
        json rows = json::array();
        for (const auto& r : curve.rows) {
            rows.push_back({{"rho", jnum(r.rho)},
                            {"rate_R_norm", jnum(r.rate_R_norm)},
                            {"universal_norm", jnum(r.universal_norm)},
                            {"cas_norm", jnum(r.cas_norm)}});
        }
        j["rows"] = std::move(rows);
        os << j.dump(2) << '\n';
        return;
    }
    write_config_comment(os, "bounds", cfg);
    os << "# units: nats per mean service time\n";
    os << "# " << reference << " = " << num(work_conserving_reference) << '\n';
    os << "rho,rate_R_norm,universal_norm,cas_norm\n";
    for (const auto& r : curve.rows) {
        os << num(r.rho) << ',' << num(r.rate_R_norm) << ',' << num(r.universal_norm) << ',' << num(r.cas_norm)
           << '\n';
    }
}

// optimum --------------------------------------------------------------

struct OptimumArgs {
    double mu = 1.0;
    std::string bracket = "0.01:10";
    double tol = 1e-6;
    Common common;
};

void run_optimum(const OptimumArgs& a, std::ostream& out, std::ostream& err) {
    positive(a.mu, "--mu");
    positive(a.tol, "--tol");
    const auto parts = split(a.bracket, ':');
    if (parts.size() != 2) throw ValidationError("--bracket: expected lo:hi");
    const double lo = to_double(parts[0], "--bracket");
    const double hi = to_double(parts[1], "--bracket");
    positive(lo, "--bracket lo");
    if (!(hi > lo) || !std::isfinite(hi)) throw ValidationError("--bracket: hi must exceed lo");

    OptimumReport r;
    try {
        r = maximize_rate(a.mu, lo, hi, a.tol);
    } catch (const std::runtime_error& e) {
        if (dynamic_cast<const ConvergenceError*>(&e)) throw;
        throw ValidationError(std::string("--bracket: ") + e.what());
    }
    const Config cfg{{"mu", num(a.mu)}, {"bracket", a.bracket}, {"tol", num(a.tol)}};

    Sink sink(out, err, "optimum", a.common);
    auto& os = sink.stream();
    if (a.common.format == "json") {
        json j;
        j["config"] = config_json("optimum", cfg);
        j["rho_star"] = jnum(r.rho_star);
        j["lambda_star"] = jnum(r.rho_star * a.mu);
        j["value"] = jnum(r.value);
        j["bracket_lo"] = jnum(r.bracket_lo);
        j["bracket_hi"] = jnum(r.bracket_hi);
        j["tolerance"] = jnum(r.tolerance);
        os << j.dump(2) << '\n';
        return;
    }
    write_config_comment(os, "optimum", cfg);
    os << "rho_star,lambda_star,value,bracket_lo,bracket_hi,tolerance\n";
    os << num(r.rho_star) << ',' << num(r.rho_star * a.mu) << ',' << num(r.value) << ',' << num(r.bracket_lo) << ','
       << num(r.bracket_hi) << ',' << num(r.tolerance) << '\n';
}

// simulate -------------------------------------------------------------

struct SimulateArgs {
    std::string fixture;
    double lambda = 1.0;
    double mu = 1.0;
    std::string service = "exponential";
    std::optional<std::size_t> n;
    Common common;
};

SimConfig load_fixture(const std::string& path, std::optional<std::size_t> n) {
    std::ifstream in(path);
    if (!in) throw ValidationError("--fixture: cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError("--fixture: " + std::string(e.what()));
    }
    std::vector<double> epochs;
    std::vector<double> services;
    try {
        epochs = j.at("arrival_epochs").get<std::vector<double>>();
        services = j.at("service_times").get<std::vector<double>>();
    } catch (const json::exception&) {
        throw ValidationError("--fixture: needs numeric arrays 'arrival_epochs' and 'service_times'");
    }
    if (epochs.empty() || epochs.front() != 0.0) throw ValidationError("arrival_epochs: must start at 0");
    std::vector<double> gaps;
    for (std::size_t i = 1; i < epochs.size(); ++i) {
        if (!(epochs[i] > epochs[i - 1])) throw ValidationError("arrival_epochs: must be strictly increasing");
        gaps.push_back(epochs[i] - epochs[i - 1]);
    }
    if (services.size() < 2) throw ValidationError("service_times: need S_0 and at least S_1");
    for (double s : services) positive(s, "service_times");

    SimConfig cfg;
    cfg.arrivals = std::move(gaps);
    cfg.n = n ? *n : services.size() - 1;
    cfg.service = std::move(services);
    return cfg;
}

void run_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
    SimConfig sim;
    Config cfg;
    if (!a.fixture.empty()) {
        sim = load_fixture(a.fixture, a.n);
        cfg = {{"fixture", std::filesystem::path(a.fixture).filename().string()}, {"n", std::to_string(sim.n)}};
    } else {
        positive(a.lambda, "--lambda");
        positive(a.mu, "--mu");
        if (!a.n) throw ValidationError("--n is required without --fixture");
        at_least_one(*a.n, "--n");
        const ServiceModel service = parse_service(a.service, a.mu);
        sim.arrivals = ArrivalModel::poisson(a.lambda);
        sim.service = service;
        sim.n = *a.n;
        sim.seed = a.common.seed;
        cfg = {{"lambda", num(a.lambda)},
               {"mu", num(a.mu)},
               {"service", service.name()},
               {"n", std::to_string(sim.n)},
               {"seed", std::to_string(sim.seed)}};
    }
    at_least_one(sim.n, "--n");

    QueueTrace trace;
    try {
        trace = simulate(sim);
    } catch (const ArrivalsExhausted& e) {
        throw ValidationError(std::string("arrival_epochs: ") + e.what());
    }

    Sink sink(out, err, "simulate", a.common);
    auto& os = sink.stream();
    if (a.common.format == "json") {
        json j;
        j["config"] = config_json("simulate", cfg);
        json rows = json::array();
        for (std::size_t i = 0; i < trace.departures(); ++i) {
            json r;
            r["i"] = i;
            r["k"] = trace.admitted[i];
            r["service"] = jnum(trace.service[i]);
            r["idle_before"] = i == 0 ? json(nullptr) : jnum(trace.idle[i - 1]);
            r["inter_departure"] = jnum(trace.inter_departures[i]);
            r["departure_epoch"] = jnum(trace.departure_epochs[i]);
            rows.push_back(std::move(r));
        }
        j["rows"] = std::move(rows);
        os << j.dump(2) << '\n';
        return;
    }
    write_config_comment(os, "simulate", cfg);
    write_trace_csv(os, trace);
}

// infodensity ----------------------------------------------------------

struct InfoArgs {
    std::optional<double> lambda;
    double mu = 1.0;
    std::string service = "exponential";
    std::vector<std::size_t> n{1000, 10000, 100000};
    std::size_t trials = 100;
    std::optional<double> gamma;
    std::optional<double> target;
    Common common;
};

double default_lambda(double mu) { return maximize_rate(mu).rho_star * mu; }

void run_infodensity(const InfoArgs& a, std::ostream& out, std::ostream& err) {
    positive(a.mu, "--mu");
    if (a.lambda) positive(*a.lambda, "--lambda");
    if (a.n.empty()) throw ValidationError("--n: empty schedule");
    for (std::size_t n : a.n) at_least_one(n, "--n");
    at_least_one(a.trials, "--trials");
    if (a.gamma) positive(*a.gamma, "--gamma");
    if (a.target && !std::isfinite(*a.target)) throw ValidationError("--target must be finite");

    const ServiceModel service = parse_service(a.service, a.mu);
    const double lambda = a.lambda ? *a.lambda : default_lambda(a.mu);

    std::vector<InfoDensityReport> reports;
    for (std::size_t i = 0; i < a.n.size(); ++i) {
        InfoDensityConfig c;
        c.lambda = lambda;
        c.service = service;
        c.n = a.n[i];
        c.trials = a.trials;
        c.seed = derive_seed(a.common.seed, a.n[i]);
        c.target = a.target;
        c.gamma = a.gamma;
        c.threads = a.common.threads;
        reports.push_back(estimate_info_density(c));
    }
    const Config cfg{{"lambda", num(lambda)},
                     {"mu", num(a.mu)},
                     {"service", service.name()},
                     {"n", join(a.n)},
                     {"trials", std::to_string(a.trials)},
                     {"target", num(reports.front().target)},
                     {"gamma", num(reports.front().gamma)},
                     {"seed", std::to_string(a.common.seed)}};

    Sink sink(out, err, "infodensity", a.common);
    auto& os = sink.stream();
    if (a.common.format == "json") {
        json j;
        j["config"] = config_json("infodensity", cfg);
        j["units"] = "nats per unit time";
        json rows = json::array();
        for (const auto& r : reports) {
            json row;
            row["n"] = r.n;
            row["trials"] = r.trials;
            row["failures"] = r.failures;
            row["decode_time"] = jnum(r.decode_time);
            row["mean"] = jnum(r.mean);
            row["std_error"] = jnum(r.std_error);
            row["mean_total"] = jnum(r.mean_total);
            row["std_error_total"] = jnum(r.std_error_total);
            row["target"] = jnum(r.target);
            row["gamma"] = jnum(r.gamma);
            row["tail_fraction"] = jnum(r.tail_fraction);
            row["unbounded"] = r.unbounded;
            json samples = json::array();
            for (double v : r.normalized) samples.push_back(jnum(v));
            row["normalized"] = std::move(samples);
            rows.push_back(std::move(row));
        }
        j["rows"] = std::move(rows);
        os << j.dump(2) << '\n';
        return;
    }
    write_config_comment(os, "infodensity", cfg);
    os << "# units: nats per unit time\n";
    os << "n,trials,failures,decode_time,mean,std_error,target,gamma,tail_fraction,unbounded\n";
    for (const auto& r : reports) {
        os << r.n << ',' << r.trials << ',' << r.failures << ',' << num(r.decode_time) << ',' << num(r.mean) << ','
           << num(r.std_error) << ',' << num(r.target) << ',' << num(r.gamma) << ',' << num(r.tail_fraction) << ','
           << (r.unbounded ? 1 : 0) << '\n';
    }
}

// decode ---------------------------------------------------------------

struct DecodeArgs {
    std::optional<double> lambda;
    double mu = 1.0;
    std::string service = "exponential";
    std::vector<std::size_t> messages{16};
    std::vector<std::size_t> n{1, 2, 5, 10, 20, 50};
    std::size_t trials = 500;
    Common common;
};

void run_decode(const DecodeArgs& a, std::ostream& out, std::ostream& err) {
    positive(a.mu, "--mu");
    if (a.lambda) positive(*a.lambda, "--lambda");
    if (a.messages.empty()) throw ValidationError("--messages: empty list");
    for (std::size_t m : a.messages) at_least_one(m, "--messages");
    if (a.n.empty()) throw ValidationError("--n: empty schedule");
    for (std::size_t n : a.n) at_least_one(n, "--n");
    at_least_one(a.trials, "--trials");

    const ServiceModel service = parse_service(a.service, a.mu);
    const double lambda = a.lambda ? *a.lambda : default_lambda(a.mu);
    const auto rows =
        decode_rate_experiment(a.messages, lambda, service, a.n, a.trials, a.common.seed, a.common.threads);
    const Config cfg{{"lambda", num(lambda)},
                     {"mu", num(a.mu)},
                     {"service", service.name()},
                     {"messages", join(a.messages)},
                     {"n", join(a.n)},
                     {"trials", std::to_string(a.trials)},
                     {"seed", std::to_string(a.common.seed)}};

    Sink sink(out, err, "decode", a.common);
    auto& os = sink.stream();
    if (a.common.format == "json") {
        json j;
        j["config"] = config_json("decode", cfg);
        json arr = json::array();
        for (const auto& r : rows) {
            arr.push_back({{"messages", r.messages},
                           {"n", r.n},
                           {"trials", r.trials},
                           {"errors", r.errors},
                           {"failures", r.failures},
                           {"idle_mismatches", r.idle_mismatches},
                           {"error_rate", jnum(r.error_rate)},
                           {"operating_rate", jnum(r.operating_rate)}});
        }
        j["rows"] = std::move(arr);
        os << j.dump(2) << '\n';
        return;
    }
    write_config_comment(os, "decode", cfg);
    os << "messages,n,trials,errors,failures,idle_mismatches,error_rate,operating_rate\n";
    for (const auto& r : rows) {
        os << r.messages << ',' << r.n << ',' << r.trials << ',' << r.errors << ',' << r.failures << ','
           << r.idle_mismatches << ',' << num(r.error_rate) << ',' << num(r.operating_rate) << '\n';
    }
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 3 && parts.size() != 4) throw ValidationError("--rho: expected lo:hi:count[:log]");
    const double lo = to_double(parts[0], "--rho");
    const double hi = to_double(parts[1], "--rho");
    const double count_d = to_double(parts[2], "--rho");
    const bool log_spaced = parts.size() == 4;
    if (log_spaced && parts[3] != "log") throw ValidationError("--rho: spacing must be 'log'");
    if (!(count_d >= 1) || count_d != std::floor(count_d) || count_d > 1e7) {
        throw ValidationError("--rho: count must be a positive integer");
    }
    if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo) throw ValidationError("--rho: need lo <= hi");
    if (log_spaced && !(lo > 0)) throw ValidationError("--rho: log spacing needs lo > 0");

    const auto count = static_cast<std::size_t>(count_d);
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        grid[i] = log_spaced ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) : lo + t * (hi - lo);
    }
    grid.back() = hi;
    grid.front() = lo;
    return grid;
}

ServiceModel parse_service(const std::string& text, double mu) {
    positive(mu, "--mu");
    const auto parts = split(text, ':');
    const std::string& kind = parts.empty() ? text : parts[0];
    try {
        if (kind == "exponential" && parts.size() == 1) return ServiceModel::exponential(mu);
        if (kind == "deterministic" && parts.size() == 1) return ServiceModel::deterministic(1.0 / mu);
        if (kind == "erlang" && parts.size() == 2) {
            const double k = to_double(parts[1], "--service");
            if (!(k >= 1) || k != std::floor(k) || k > 1e6) throw ValidationError("--service: Erlang shape must be a positive integer");
            return ServiceModel::erlang(static_cast<int>(k), k * mu);
        }
        if (kind == "uniform" && parts.size() == 1) return ServiceModel::uniform(0.0, 2.0 / mu);
        if (kind == "uniform" && parts.size() == 3) {
            return ServiceModel::uniform(to_double(parts[1], "--service"), to_double(parts[2], "--service"));
        }
    } catch (const ValidationError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ValidationError(std::string("--service: ") + e.what());
    }
    throw ValidationError("--service: unknown service '" + text +
                          "' (exponential | deterministic | erlang:K | uniform[:LO:HI])");
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bufferless timing-queue channel: bounds, simulation, information density, decoding"};
    app.require_subcommand(1);

    BoundsArgs bounds;
    auto* b = app.add_subcommand("bounds", "rate and converse-bound curves over a rho grid");
    b->add_option("--mu", bounds.mu, "service rate")->capture_default_str();
    b->add_option("--rho", bounds.rho, "grid lo:hi:count[:log]")->capture_default_str();
    b->add_option("--service", bounds.service, "service law")->capture_default_str();
    add_common(b, bounds.common, false);
    b->add_option("--threads", bounds.common.threads, "worker threads, 0 = all cores")->capture_default_str();

    OptimumArgs optimum;
    auto* o = app.add_subcommand("optimum", "maximize R / mu over rho");
    o->add_option("--mu", optimum.mu, "service rate")->capture_default_str();
    o->add_option("--bracket", optimum.bracket, "rho search bracket lo:hi")->capture_default_str();
    o->add_option("--tol", optimum.tol, "tolerance in rho")->capture_default_str();
    add_common(o, optimum.common, false);

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "simulate the bufferless queue and emit the trace");
    s->add_option("--fixture", sim.fixture, "JSON with arrival_epochs and service_times");
    s->add_option("--lambda", sim.lambda, "Poisson arrival rate")->capture_default_str();
    s->add_option("--mu", sim.mu, "service rate")->capture_default_str();
    s->add_option("--service", sim.service, "service law")->capture_default_str();
    s->add_option("--n", sim.n, "codeword departures after D_0");
    add_common(s, sim.common, true);

    InfoArgs info;
    auto* i = app.add_subcommand("infodensity", "Monte Carlo information density");
    i->add_option("--lambda", info.lambda, "Poisson arrival rate (default: rate-optimal)");
    i->add_option("--mu", info.mu, "service rate")->capture_default_str();
    i->add_option("--service", info.service, "service law")->capture_default_str();
    i->add_option("--n", info.n, "comma-separated n schedule")->delimiter(',')->capture_default_str();
    i->add_option("--trials", info.trials, "trials per n")->capture_default_str();
    i->add_option("--gamma", info.gamma, "tail margin (default 0.05 * target)");
    i->add_option("--target", info.target, "rate target (default R(lambda, 1/E[S]))");
    add_common(i, info.common, true);

    DecodeArgs dec;
    auto* d = app.add_subcommand("decode", "encode, queue and ML-decode random codebooks");
    d->add_option("--lambda", dec.lambda, "codebook arrival rate (default: rate-optimal)");
    d->add_option("--mu", dec.mu, "service rate")->capture_default_str();
    d->add_option("--service", dec.service, "service law")->capture_default_str();
    d->add_option("--messages", dec.messages, "comma-separated codebook sizes")->delimiter(',')->capture_default_str();
    d->add_option("--n", dec.n, "comma-separated codeword lengths")->delimiter(',')->capture_default_str();
    d->add_option("--trials", dec.trials, "trials per cell")->capture_default_str();
    add_common(d, dec.common, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (*b) run_bounds(bounds, out, err);
        else if (*o) run_optimum(optimum, out, err);
        else if (*s) run_simulate(sim, out, err);
        else if (*i) run_infodensity(info, out, err);
        else if (*d) run_decode(dec, out, err);
    } catch (const ConvergenceError& e) {
        err << "error: numerical non-convergence: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace bufq::cli
