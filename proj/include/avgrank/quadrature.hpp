#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature. The interval with the
// largest error estimate is bisected until the summed estimate meets the
// target or the subdivision budget runs out. Node sets are fixed, so results
// are reproducible bit for bit.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

namespace avgrank {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    std::size_t max_intervals = std::size_t{1} << 15;
};

template <class V>
struct QuadratureResult {
    V value{};
    double error = 0.0;
    std::size_t intervals = 0;
    bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082,
                                              0.279705391489276667901467771423780,
                                              0.381830050505118944950369775488975,
                                              0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <class V>
struct Piece {
    double a, b;
    V value;
    double error;
    bool operator<(const Piece& o) const {
        if (error != o.error) return error < o.error;
        return a > o.a;  // deterministic tie-break
    }
};

template <class V, class F>
Piece<V> gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const V fc = f(c);
    V kron = fc * kWgk[7];
    V gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[static_cast<std::size_t>(j)];
        const V f1 = f(c - dx);
        const V f2 = f(c + dx);
        kron += (f1 + f2) * kWgk[static_cast<std::size_t>(j)];
        if (j % 2 == 1) gauss += (f1 + f2) * kWg[static_cast<std::size_t>(j / 2)];
    }
    return Piece<V>{a, b, kron * h, magnitude((kron - gauss) * h)};
}

}  // namespace detail

/// Integrates f over [a, b], splitting first at the given interior
/// breakpoints (kinks of piecewise weights).
template <class V, class F>
QuadratureResult<V> integrate(F&& f, double a, double b, const std::vector<double>& breakpoints = {},
                              QuadratureOptions opts = {}) {
    QuadratureResult<V> out;
    if (!(b > a)) {
        out.converged = true;
        return out;
    }
    std::vector<double> cuts{a};
    for (double x : breakpoints)
        if (x > a && x < b) cuts.push_back(x);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<detail::Piece<V>> heap;  // max-heap on error
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        heap.push_back(detail::gk15<V>(f, cuts[i], cuts[i + 1]));
        std::push_heap(heap.begin(), heap.end());
    }
    // left-to-right, matching the final sum below
    auto summed_error = [&heap] {
        std::vector<std::pair<double, double>> by_a;
        by_a.reserve(heap.size());
        for (const auto& p : heap) by_a.emplace_back(p.a, p.error);
        std::sort(by_a.begin(), by_a.end());
        double e = 0.0;
        for (const auto& [a, err] : by_a) e += err;
        return e;
    };
    // the running total drifts by rounding; re-sum before trusting it
    double total_error = summed_error();
    bool exhausted = false;
    while (total_error > opts.abs_tol && heap.size() < opts.max_intervals && !exhausted) {
        while (total_error > opts.abs_tol && heap.size() < opts.max_intervals) {
            std::pop_heap(heap.begin(), heap.end());
            const auto worst = heap.back();
            const double mid = 0.5 * (worst.a + worst.b);
            if (!(mid > worst.a && mid < worst.b)) {  // interval exhausted in floating point
                std::push_heap(heap.begin(), heap.end());
                exhausted = true;
                break;
            }
            heap.pop_back();
            const auto left = detail::gk15<V>(f, worst.a, mid);
            const auto right = detail::gk15<V>(f, mid, worst.b);
            total_error += left.error + right.error - worst.error;
            heap.push_back(left);
            std::push_heap(heap.begin(), heap.end());
            heap.push_back(right);
            std::push_heap(heap.begin(), heap.end());
        }
        total_error = summed_error();
    }

    // sum left to right so the result does not depend on heap layout
    auto pieces = std::move(heap);
    std::sort(pieces.begin(), pieces.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
    V value{};
    double err = 0.0;
    for (const auto& p : pieces) {
        value += p.value;
        err += p.error;
    }
    out.value = value;
    out.error = err;
    out.intervals = pieces.size();
    out.converged = err <= opts.abs_tol;
    return out;
}

}  // namespace avgrank
