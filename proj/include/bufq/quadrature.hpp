#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature, QUADPACK QAG style.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace bufq::quad {

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_intervals = 4000;
};

struct Result {
    double value = 0.0;
    double abs_error = 0.0;
    int evaluations = 0;
    bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;
};

inline bool by_error(const Panel& x, const Panel& y) { return x.error < y.error; }

template <class F>
Panel gauss_kronrod15(F& f, double a, double b) {
    constexpr double epmach = std::numeric_limits<double>::epsilon();
    constexpr double uflow = std::numeric_limits<double>::min();

    const double centr = 0.5 * (a + b);
    const double hlgth = 0.5 * (b - a);
    const double fc = f(centr);
    double resg = fc * wg[3];
    double resk = fc * wgk[7];
    double resabs = std::abs(resk);
    std::array<double, 7> fv1{}, fv2{};

    for (int j = 0; j < 3; ++j) {
        const int jtw = 2 * j + 1;
        const double absc = hlgth * xgk[jtw];
        const double f1 = f(centr - absc);
        const double f2 = f(centr + absc);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += wg[j] * (f1 + f2);
        resk += wgk[jtw] * (f1 + f2);
        resabs += wgk[jtw] * (std::abs(f1) + std::abs(f2));
    }
    for (int j = 0; j < 4; ++j) {
        const int jtwm1 = 2 * j;
        const double absc = hlgth * xgk[jtwm1];
        const double f1 = f(centr - absc);
        const double f2 = f(centr + absc);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += wgk[jtwm1] * (f1 + f2);
        resabs += wgk[jtwm1] * (std::abs(f1) + std::abs(f2));
    }

    const double reskh = resk * 0.5;
    double resasc = wgk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j) {
        resasc += wgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
    }

    const double result = resk * hlgth;
    resabs *= std::abs(hlgth);
    resasc *= std::abs(hlgth);
    double abserr = std::abs((resk - resg) * hlgth);
    if (resasc != 0.0 && abserr != 0.0) {
        abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
    }
    if (resabs > uflow / (50.0 * epmach)) {
        abserr = std::max(epmach * 50.0 * resabs, abserr);
    }
    return {a, b, result, abserr};
}

template <class F>
Result adapt(F& f, std::vector<Panel> heap, const Options& opt) {
    std::make_heap(heap.begin(), heap.end(), by_error);
    Result r;
    r.evaluations = static_cast<int>(heap.size()) * 15;

    auto totals = [&] {
        double v = 0.0, e = 0.0;
        for (const auto& p : heap) {
            v += p.value;
            e += p.error;
        }
        r.value = v;
        r.abs_error = e;
    };

    totals();
    for (int iter = 1;; ++iter) {
        if (!std::isfinite(r.value) || !std::isfinite(r.abs_error)) {
            r.converged = false;
            return r;
        }
        if (r.abs_error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(r.value))) {
            r.converged = true;
            return r;
        }
        if (static_cast<int>(heap.size()) >= opt.max_intervals) {
            r.converged = false;
            return r;
        }
        std::pop_heap(heap.begin(), heap.end(), by_error);
        const Panel worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(worst.a < mid && mid < worst.b)) {
            // interval exhausted at machine resolution
            heap.push_back(worst);
            std::push_heap(heap.begin(), heap.end(), by_error);
            totals();
            r.converged = r.abs_error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(r.value));
            return r;
        }
        heap.push_back(gauss_kronrod15(f, worst.a, mid));
        std::push_heap(heap.begin(), heap.end(), by_error);
        heap.push_back(gauss_kronrod15(f, mid, worst.b));
        std::push_heap(heap.begin(), heap.end(), by_error);
        r.evaluations += 30;
        r.value += heap[heap.size() - 1].value + heap[heap.size() - 2].value - worst.value;
        r.abs_error += heap[heap.size() - 1].error + heap[heap.size() - 2].error - worst.error;
        // the running sums drift; refresh them periodically
        if (iter % 128 == 0) totals();
        if (r.abs_error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(r.value))) totals();
    }
}

}  // namespace detail

// Integral of f over [a, b].
template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
    if (a == b) return {0.0, 0.0, 0, true};
    std::vector<detail::Panel> heap{detail::gauss_kronrod15(f, a, b)};
    return detail::adapt(f, std::move(heap), opt);
}

// Integral over [points.front(), points.back()] with the interior points as
// initial breakpoints (kinks, jumps, scale changes). Points must be sorted.
template <class F>
Result integrate(F&& f, std::span<const double> points, const Options& opt = {}) {
    std::vector<detail::Panel> heap;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (points[i + 1] > points[i]) heap.push_back(detail::gauss_kronrod15(f, points[i], points[i + 1]));
    }
    if (heap.empty()) return {0.0, 0.0, 0, true};
    return detail::adapt(f, std::move(heap), opt);
}

// Integral over [a, inf) through x = a + scale * t / (1 - t). `scale` should
// be of the order of the integrand's decay length.
template <class F>
Result integrate_to_infinity(F&& f, double a, double scale, const Options& opt = {}) {
    auto g = [&](double t) {
        const double u = 1.0 - t;
        const double x = a + scale * t / u;
        if (!std::isfinite(x)) return 0.0;
        const double fx = f(x);
        return fx == 0.0 ? 0.0 : fx * scale / (u * u);
    };
    constexpr std::array<double, 5> cuts = {0.0, 0.25, 0.5, 0.75, 1.0};
    return integrate(g, std::span<const double>(cuts), opt);
}

}  // namespace bufq::quad
