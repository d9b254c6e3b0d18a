#include "avgrank/weights.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace avgrank {

std::string to_string(Smoothness s) {
    switch (s) {
    case Smoothness::triangular: return "triangular";
    case Smoothness::c3: return "C3";
    case Smoothness::c_infinity: return "C-infinity";
    }
    return "?";
}

SmoothWeight::SmoothWeight(std::string name, double lo, double hi, Smoothness smoothness,
                           std::function<double(double)> body, std::vector<double> breakpoints)
    : name_(std::move(name)), lo_(lo), hi_(hi), smoothness_(smoothness), body_(std::move(body)),
      breakpoints_(std::move(breakpoints)) {
    if (!(lo < hi)) throw std::invalid_argument("SmoothWeight: empty support");
}

double sinc_pi(double t) {
    const double x = std::numbers::pi * t;
    if (std::abs(t) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

double h(double t) { return std::max(1.0 - std::abs(t), 0.0); }

double h_hat(double t) {
    const double s = sinc_pi(t);
    return s * s;
}

double h_X(double t, double X) {
    if (!(X >= 2.0)) throw std::invalid_argument("h_X: X must be >= 2");
    return h(t / std::log(X));
}

SmoothWeight triangle_weight() {
    return SmoothWeight("h", -1.0, 1.0, Smoothness::triangular, [](double x) { return h(x); }, {0.0});
}

namespace {

double bump_unit(double u) {
    const double q = 1.0 - u * u;
    return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

// 0 for x <= 0, 1 for x >= 1, smooth in between
double smooth_step(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / x);
    const double b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

}  // namespace

SmoothWeight bump(double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    return SmoothWeight("bump[" + std::to_string(lo) + "," + std::to_string(hi) + "]", lo, hi,
                        Smoothness::c_infinity, [=](double x) { return bump_unit((x - mid) / half); });
}

SmoothWeight even_bump(double lo, double hi) {
    if (!(0.0 < lo && lo < hi)) throw std::invalid_argument("even_bump: need 0 < lo < hi");
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    return SmoothWeight("even_bump[" + std::to_string(lo) + "," + std::to_string(hi) + "]", -hi, hi,
                        Smoothness::c_infinity, [=](double x) { return bump_unit((std::abs(x) - mid) / half); },
                        {-lo, lo});
}

SmoothWeight c3_bump(double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    return SmoothWeight("c3_bump[" + std::to_string(lo) + "," + std::to_string(hi) + "]", lo, hi, Smoothness::c3,
                        [=](double x) {
                            const double u = (x - mid) / half;
                            const double q = std::max(1.0 - u * u, 0.0);
                            return (q * q) * (q * q);
                        });
}

SmoothWeight plateau() {
    return SmoothWeight("plateau[0.5,2.5]", 0.5, 2.5, Smoothness::c_infinity,
                        [](double x) { return smooth_step(2.0 * (x - 0.5)) * smooth_step(2.0 * (2.5 - x)); },
                        {1.0, 2.0});
}

SmoothWeight twist_weight(int delta) {
    if (delta == 1) return bump(1.0, 2.0);
    if (delta == -1) return bump(-2.0, -1.0);
    throw std::invalid_argument("twist_weight: delta must be +1 or -1");
}

std::complex<double> fourier_numeric(const SmoothWeight& weight, double t, QuadratureOptions opts) {
    const double w = -2.0 * std::numbers::pi * t;
    auto integrand = [&](double x) { return weight(x) * std::polar(1.0, w * x); };
    const auto res = integrate<std::complex<double>>(integrand, weight.lo(), weight.hi(), weight.breakpoints(), opts);
    if (!res.converged)
        throw QuadratureFailure("quadrature failure: error estimate " + std::to_string(res.error) + " for " +
                                weight.name() + " at t = " + std::to_string(t));
    return res.value;
}

double integral(const SmoothWeight& weight, QuadratureOptions opts) {
    const auto res = integrate<double>([&](double x) { return weight(x); }, weight.lo(), weight.hi(),
                                       weight.breakpoints(), opts);
    if (!res.converged) throw QuadratureFailure("quadrature failure: " + weight.name());
    return res.value;
}

double kernel_k(double t, double X) {
    if (X < 2.0) throw std::invalid_argument("kernel_k: X must be >= 2");
    const double L = std::log(X);
    const double a = 1.0 - 1.0 / X;
    const double at = std::abs(t);
    if (at <= a) return 1.0 / (L * L);
    if (at < 1.0) return X * (1.0 - at) / (L * L);
    return 0.0;
}

double kernel_k_hat(double t, double X) {
    if (X < 2.0) throw std::invalid_argument("kernel_k_hat: X must be >= 2");
    const double L = std::log(X);
    const double a = 1.0 - 1.0 / X;
    // sin^2(pi t) - sin^2(pi a t) = sin(pi (1 - a) t) sin(pi (1 + a) t)
    return (1.0 + a) * sinc_pi((1.0 - a) * t) * sinc_pi((1.0 + a) * t) / (L * L);
}

SmoothWeight kernel_k_weight(double X) {
    const double a = 1.0 - 1.0 / X;
    return SmoothWeight("k[X=" + std::to_string(X) + "]", -1.0, 1.0, Smoothness::triangular,
                        [X](double x) { return kernel_k(x, X); }, {-a, 0.0, a});
}

}  // namespace avgrank
