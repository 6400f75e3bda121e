#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <array>
#include <cmath>
#include <numbers>

#include "bufq/quadrature.hpp"

using namespace bufq;

TEST_CASE("closed-form integrals") {
    const double pi = std::numbers::pi;
    auto r = quad::integrate([](double x) { return std::sin(x); }, 0.0, pi);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-13));

    r = quad::integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(2.0 / 3.0).epsilon(1e-11));

    // integrable endpoint singularity
    r = quad::integrate([](double x) { return x > 0 ? std::log(x) : 0.0; }, 0.0, 1.0);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(-1.0).epsilon(1e-9));

    r = quad::integrate_to_infinity([](double x) { return std::exp(-x); }, 0.0, 1.0);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));

    r = quad::integrate_to_infinity([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 1.0);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(pi / 2).epsilon(1e-9));
}

TEST_CASE("agrees with boost on a peaked integrand") {
    auto f = [](double x) { return std::exp(-50.0 * (x - 0.3) * (x - 0.3)) * std::cos(7.0 * x); };
    const double oracle = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -2.0, 3.0, 15, 1e-14);
    const auto r = quad::integrate(f, -2.0, 3.0);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(oracle).epsilon(1e-11));
}

TEST_CASE("breakpoints resolve a kink") {
    auto f = [](double x) { return std::abs(x - 0.37); };
    const double exact = 0.5 * (0.37 * 0.37 + 0.63 * 0.63);
    const std::array<double, 3> pts{0.0, 0.37, 1.0};
    const auto r = quad::integrate(f, std::span<const double>(pts));
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(exact).epsilon(1e-14));
}

TEST_CASE("semi-infinite log integrand matches tanh-sinh") {
    auto f = [](double t) {
        const double one_minus = -std::expm1(-t);
        return std::exp(-t) * one_minus * std::log(one_minus);
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    const double oracle = ts.integrate([&](double u) { return f(u / (1 - u)) / ((1 - u) * (1 - u)); }, 0.0, 1.0);
    const auto r = quad::integrate_to_infinity(f, 0.0, 1.0);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("interval budget exhaustion is reported") {
    auto f = [](double x) { return std::sin(1.0 / (x + 1e-6)); };
    const auto r = quad::integrate(f, 0.0, 1.0, {1e-15, 1e-15, 10});
    CHECK_FALSE(r.converged);
    CHECK(r.abs_error > 0);
}

TEST_CASE("reversed and empty intervals") {
    auto f = [](double x) { return x * x; };
    CHECK(quad::integrate(f, 0.0, 0.0).value == 0.0);
    CHECK(quad::integrate(f, 1.0, 0.0).value == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
}
