#include "bufq/distributions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "bufq/errors.hpp"
#include "bufq/quadrature.hpp"

namespace bufq {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

std::string fmt(const char* pattern, double a, double b = 0.0) {
    char buf[96];
    std::snprintf(buf, sizeof buf, pattern, a, b);
    return buf;
}

// -f log f for a log-density value; zero where the density vanishes.
double entropy_integrand(double log_f) {
    if (!(log_f > -inf)) return 0.0;
    return -std::exp(log_f) * log_f;
}

}  // namespace

// --- ServiceModel ------------------------------------------------------------

ServiceModel ServiceModel::exponential(double rate) {
    require(rate > 0 && std::isfinite(rate), "exponential rate must be positive and finite");
    return ServiceModel(Exponential{rate});
}

ServiceModel ServiceModel::deterministic(double duration) {
    require(duration > 0 && std::isfinite(duration), "deterministic duration must be positive and finite");
    return ServiceModel(Deterministic{duration});
}

ServiceModel ServiceModel::erlang(int shape, double rate) {
    require(shape >= 1, "erlang shape must be at least 1");
    require(rate > 0 && std::isfinite(rate), "erlang rate must be positive and finite");
    return ServiceModel(Erlang{shape, rate});
}

ServiceModel ServiceModel::uniform(double lo, double hi) {
    require(lo >= 0 && std::isfinite(lo), "uniform lower end must be nonnegative");
    require(hi > lo && std::isfinite(hi), "uniform upper end must exceed the lower end");
    return ServiceModel(Uniform{lo, hi});
}

std::string ServiceModel::name() const {
    return std::visit(
        [](const auto& k) -> std::string {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                return fmt("exponential(rate=%.17g)", k.rate);
            } else if constexpr (std::is_same_v<T, Deterministic>) {
                return fmt("deterministic(duration=%.17g)", k.duration);
            } else if constexpr (std::is_same_v<T, Erlang>) {
                return fmt("erlang(shape=%.17g,rate=%.17g)", k.shape, k.rate);
            } else {
                return fmt("uniform(lo=%.17g,hi=%.17g)", k.lo, k.hi);
            }
        },
        kind_);
}

double ServiceModel::mean() const noexcept {
    return std::visit(
        [](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                return 1.0 / k.rate;
            } else if constexpr (std::is_same_v<T, Deterministic>) {
                return k.duration;
            } else if constexpr (std::is_same_v<T, Erlang>) {
                return k.shape / k.rate;
            } else {
                return 0.5 * (k.lo + k.hi);
            }
        },
        kind_);
}

std::pair<double, double> ServiceModel::support() const noexcept {
    return std::visit(
        [](const auto& k) -> std::pair<double, double> {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Deterministic>) {
                return {k.duration, k.duration};
            } else if constexpr (std::is_same_v<T, Uniform>) {
                return {k.lo, k.hi};
            } else {
                return {0.0, inf};
            }
        },
        kind_);
}

double ServiceModel::sample(Rng& rng) const {
    return std::visit(
        [&rng](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                return -std::log(uniform_open(rng)) / k.rate;
            } else if constexpr (std::is_same_v<T, Deterministic>) {
                return k.duration;
            } else if constexpr (std::is_same_v<T, Erlang>) {
                double s = 0.0;
                for (int i = 0; i < k.shape; ++i) s -= std::log(uniform_open(rng));
                return s / k.rate;
            } else {
                return k.lo + uniform_open(rng) * (k.hi - k.lo);
            }
        },
        kind_);
}

double ServiceModel::log_pdf(double x) const noexcept {
    return std::visit(
        [x](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                return x < 0 ? -inf : std::log(k.rate) - k.rate * x;
            } else if constexpr (std::is_same_v<T, Deterministic>) {
                return std::abs(x - k.duration) <= 1e-9 * k.duration ? inf : -inf;
            } else if constexpr (std::is_same_v<T, Erlang>) {
                if (x < 0) return -inf;
                if (x == 0) return k.shape == 1 ? std::log(k.rate) : -inf;
                return k.shape * std::log(k.rate) + (k.shape - 1) * std::log(x) - k.rate * x -
                       std::lgamma(static_cast<double>(k.shape));
            } else {
                return (x < k.lo || x > k.hi) ? -inf : -std::log(k.hi - k.lo);
            }
        },
        kind_);
}

double ServiceModel::pdf(double x) const noexcept { return std::exp(log_pdf(x)); }

double ServiceModel::quantile(double p) const {
    require(p > 0 && p < 1, "quantile level must lie in (0, 1)");
    return std::visit(
        [p](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                return -std::log1p(-p) / k.rate;
            } else if constexpr (std::is_same_v<T, Deterministic>) {
                return k.duration;
            } else if constexpr (std::is_same_v<T, Erlang>) {
                return boost::math::gamma_p_inv(static_cast<double>(k.shape), p) / k.rate;
            } else {
                return k.lo + p * (k.hi - k.lo);
            }
        },
        kind_);
}

double ServiceModel::entropy() const {
    if (const auto* e = std::get_if<Exponential>(&kind_)) return 1.0 + std::log(1.0 / e->rate);
    if (const auto* u = std::get_if<Uniform>(&kind_)) return std::log(u->hi - u->lo);
    if (is_point_mass()) throw UndefinedEntropyError("a deterministic service time has no differential entropy");

    const auto& k = std::get<Erlang>(kind_);
    auto integrand = [this](double x) { return entropy_integrand(log_pdf(x)); };
    const auto r = quad::integrate_to_infinity(integrand, 0.0, k.shape / k.rate, {1e-11, 1e-13, 4000});
    if (!r.converged || r.abs_error > entropy_abs_tol) throw ConvergenceError("erlang entropy quadrature", r.abs_error);
    return r.value;
}

// --- ArrivalModel ------------------------------------------------------------

ArrivalModel ArrivalModel::poisson(double rate) { return {ServiceModel::exponential(rate), true}; }

ArrivalModel ArrivalModel::renewal(ServiceModel inter_arrival) {
    return {inter_arrival, inter_arrival.is_exponential()};
}

std::string ArrivalModel::name() const {
    return poisson_ ? fmt("poisson(rate=%.17g)", rate()) : "renewal(" + law_.name() + ")";
}

// --- hypoexponential ---------------------------------------------------------

double hypoexp_log_pdf(double lambda, double mu, double d) noexcept {
    if (!(d > 0)) return -inf;
    if (std::abs(lambda - mu) < erlang_switch * mu) {
        return 2.0 * std::log(mu) + std::log(d) - mu * d;
    }
    const double a = std::min(lambda, mu);
    const double b = std::max(lambda, mu);
    // a b/(b-a) e^{-a d} (1 - e^{-(b-a) d})
    return std::log(a * b / (b - a)) - a * d + std::log(-std::expm1(-(b - a) * d));
}

double hypoexp_survival(double lambda, double mu, double d) noexcept {
    if (d <= 0) return 1.0;
    if (std::abs(lambda - mu) < erlang_switch * mu) {
        return std::exp(-mu * d) * (1.0 + mu * d);
    }
    const double a = std::min(lambda, mu);
    const double b = std::max(lambda, mu);
    return std::exp(-a * d) * (1.0 + a * (-std::expm1(-(b - a) * d)) / (b - a));
}

double hypoexp_entropy(double lambda, double mu) {
    require(lambda > 0 && std::isfinite(lambda), "arrival rate must be positive and finite");
    require(mu > 0 && std::isfinite(mu), "service rate must be positive and finite");

    const double a = std::min(lambda, mu);
    const double b = std::max(lambda, mu);

    // Q with survival(Q) = 1e-12, by bracketing then bisection
    double lo = 0.0;
    double hi = 1.0 / a;
    while (hypoexp_survival(lambda, mu, hi) > entropy_truncation_mass) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (hypoexp_survival(lambda, mu, mid) > entropy_truncation_mass ? lo : hi) = mid;
    }
    const double q = hi;

    std::vector<double> points{0.0, q};
    for (double p : {1.0 / b, 10.0 / b, 1.0 / a}) {
        if (p > 0 && p < q) points.push_back(p);
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    auto integrand = [&](double d) { return entropy_integrand(hypoexp_log_pdf(lambda, mu, d)); };
    const auto r = quad::integrate(integrand, std::span<const double>(points), {1e-10, 1e-13, 8000});
    if (!r.converged || r.abs_error > entropy_abs_tol) {
        throw ConvergenceError("hypoexponential entropy quadrature", r.abs_error);
    }

    // Beyond Q the density decays like f(Q) e^{-a (d - Q)}.
    const double log_fq = hypoexp_log_pdf(lambda, mu, q);
    const double tail = std::exp(log_fq) / a * (1.0 - log_fq);
    return r.value + tail;
}

// --- DepartureModel ----------------------------------------------------------

DepartureModel DepartureModel::hypoexponential(double lambda, double mu) {
    require(lambda > 0 && std::isfinite(lambda), "arrival rate must be positive and finite");
    return {lambda, ServiceModel::exponential(mu), true};
}

DepartureModel DepartureModel::convolution(double lambda, ServiceModel service) {
    require(lambda > 0 && std::isfinite(lambda), "arrival rate must be positive and finite");
    return {lambda, service, false};
}

double DepartureModel::sample(Rng& rng) const {
    const double w = -std::log(uniform_open(rng)) / lambda_;
    return w + service_.sample(rng);
}

double DepartureModel::log_pdf(double d) const {
    if (hypo_) return hypoexp_log_pdf(lambda_, std::get<ServiceModel::Exponential>(service_.kind()).rate, d);

    const auto& kind = service_.kind();
    if (const auto* det = std::get_if<ServiceModel::Deterministic>(&kind)) {
        return d > det->duration ? std::log(lambda_) - lambda_ * (d - det->duration) : -inf;
    }
    if (const auto* u = std::get_if<ServiceModel::Uniform>(&kind)) {
        if (!(d > u->lo)) return -inf;
        const double top = std::min(d, u->hi);
        return -std::log(u->hi - u->lo) - lambda_ * (d - top) + std::log(-std::expm1(-lambda_ * (top - u->lo)));
    }
    return convolution_pdf(d);
}

double DepartureModel::pdf(double d) const { return std::exp(log_pdf(d)); }

// log of lambda * int_0^d e^{-lambda (d - s)} f_S(s) ds for the exponential and
// Erlang families, integrated around the exponent's maximum so large d does
// not underflow. Returns the log-density.
double DepartureModel::convolution_pdf(double d) const {
    if (!(d > 0)) return -inf;

    int shape = 1;
    double rate = 0.0;
    if (const auto* e = std::get_if<ServiceModel::Exponential>(&service_.kind())) {
        rate = e->rate;
    } else {
        const auto& er = std::get<ServiceModel::Erlang>(service_.kind());
        shape = er.shape;
        rate = er.rate;
    }

    // exponent g(s) = log lambda - lambda (d - s) + log f_S(s); maximized at
    // s* = (shape - 1) / (rate - lambda) clipped to [0, d]
    double peak = d;
    if (rate > lambda_) peak = std::min(d, (shape - 1) / (rate - lambda_));
    auto exponent = [&](double s) { return std::log(lambda_) - lambda_ * (d - s) + service_.log_pdf(s); };
    double g_max = exponent(peak);
    if (!(g_max > -inf)) g_max = std::max(exponent(0.5 * d), exponent(d));
    if (!(g_max > -inf)) return -inf;

    auto integrand = [&](double s) {
        const double g = exponent(s);
        return g > -inf ? std::exp(g - g_max) : 0.0;
    };
    // the peak can be far narrower than [0, d]; without cuts at its scale
    // the first Kronrod panel may not sample it at all
    const double slope = std::abs(rate - lambda_);
    const double width = slope > 0 ? std::min(d, 1.0 / slope) : d;
    std::vector<double> points{0.0, d};
    if (peak > 0 && peak < d) points.push_back(peak);
    for (double m : {1.0, 4.0, 16.0, 64.0}) {
        for (double p : {peak - m * width, peak + m * width}) {
            if (p > 0 && p < d) points.push_back(p);
        }
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    const auto r = quad::integrate(integrand, std::span<const double>(points), {1e-300, 1e-11, 2000});
    if (!r.converged) throw ConvergenceError("departure density convolution", r.abs_error);
    if (!(r.value > 0)) return -inf;
    return g_max + std::log(r.value);
}

double DepartureModel::entropy() const {
    if (hypo_) return hypoexp_entropy(lambda_, std::get<ServiceModel::Exponential>(service_.kind()).rate);

    const auto [s_lo, s_hi] = service_.support();
    const double s_top = std::isfinite(s_hi) ? s_hi : service_.quantile(1.0 - 1e-14);
    const double upper = s_top + 33.0 / lambda_;  // e^{-33} < 1e-14

    std::vector<double> points{s_lo, upper};
    for (double m : {1.0, 4.0, 16.0, 64.0}) {
        if (s_lo + m / lambda_ < upper) points.push_back(s_lo + m / lambda_);
    }
    if (std::isfinite(s_hi) && s_hi > s_lo) points.push_back(s_hi);
    if (!std::isfinite(s_hi)) points.push_back(s_lo + service_.mean());
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    auto integrand = [this](double d) { return entropy_integrand(log_pdf(d)); };
    const auto r = quad::integrate(integrand, std::span<const double>(points), {1e-10, 1e-13, 8000});
    if (!r.converged || r.abs_error > entropy_abs_tol) {
        throw ConvergenceError("inter-departure entropy quadrature", r.abs_error);
    }
    return r.value;
}

}  // namespace bufq
