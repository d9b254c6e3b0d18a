#include <cmath>
#include <numbers>

#include "avgrank/weights.hpp"
#include "doctest.h"

using namespace avgrank;

TEST_CASE("h, h_hat, h_X") {
    CHECK(h(0.0) == 1.0);
    CHECK(h(0.5) == 0.5);
    CHECK(h(2.0) == 0.0);
    CHECK(h(-0.25) == 0.75);

    CHECK(h_hat(0.0) == 1.0);
    CHECK(std::abs(h_hat(1.0)) < 1e-30);
    CHECK(h_hat(0.5) == doctest::Approx(4.0 / (std::numbers::pi * std::numbers::pi)).epsilon(1e-15));
    CHECK(h_hat(0.5) == doctest::Approx(0.405285).epsilon(1e-6));

    for (const double X : {2.0, 10.0, 1e6}) {
        const double L = std::log(X);
        CHECK(h_X(0.0, X) == 1.0);
        CHECK(h_X(L, X) == 0.0);
        CHECK(h_X(0.5 * L, X) == doctest::Approx(0.5).epsilon(1e-15));
    }
    CHECK_THROWS_AS(h_X(0.0, 1.5), std::invalid_argument);
}

TEST_CASE("sinc_pi series branch is continuous") {
    for (const double t : {1e-4, 9.99e-5, 1.0001e-4, 5e-5, 1e-8}) {
        const double direct = std::sin(std::numbers::pi * t) / (std::numbers::pi * t);
        CHECK(sinc_pi(t) == doctest::Approx(direct).epsilon(1e-14));
    }
    CHECK(sinc_pi(0.0) == 1.0);
}

TEST_CASE("Fejer positivity") {
    for (int i = 0; i < 10000; ++i) {
        const double t = -50.0 + 100.0 * (i + 0.5) / 10000.0;
        CHECK(h_hat(t) >= 0.0);
    }
}

TEST_CASE("bump") {
    const auto w = bump(1.0, 2.0);
    CHECK(w(1.5) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(w(1.0) == 0.0);
    CHECK(w(2.0) == 0.0);
    for (const double d : {0.01, 0.1, 0.3, 0.49}) CHECK(w(1.0 + d) == doctest::Approx(w(2.0 - d)).epsilon(1e-12));
    CHECK_THROWS_AS(bump(2.0, 1.0), std::invalid_argument);
    // int_{-1}^{1} exp(-1/(1-u^2)) du, 30-digit quadrature
    CHECK(integral(bump(-1.0, 1.0)) == doctest::Approx(0.443993816168079437823).epsilon(1e-10));
    CHECK(integral(w) == doctest::Approx(0.5 * 0.443993816168079437823).epsilon(1e-10));
}

TEST_CASE("weights are nonnegative and vanish outside their support") {
    const std::vector<SmoothWeight> all{triangle_weight(), bump(1.0, 2.0), even_bump(), c3_bump(1.0, 2.0),
                                        plateau(),         twist_weight(1), twist_weight(-1), kernel_k_weight(10.0)};
    for (const auto& w : all) {
        for (int i = 0; i <= 20000; ++i) {
            const double x = -4.0 + 8.0 * i / 20000.0;
            const double v = w(x);
            CHECK(v >= 0.0);
            if (x <= w.lo() || x >= w.hi()) CHECK(v == 0.0);
        }
    }
}

TEST_CASE("even_bump and plateau shapes") {
    const auto w = even_bump();
    CHECK(w(0.0) == 0.0);
    CHECK(w(0.25) == 0.0);
    CHECK(w(-0.25) == 0.0);
    CHECK(w(0.75) == doctest::Approx(std::exp(-1.0)));
    CHECK(w(-0.75) == w(0.75));

    const auto p = plateau();
    for (double x = 1.0; x <= 2.0; x += 0.01) CHECK(p(x) == doctest::Approx(1.0).epsilon(1e-15));
    for (int i = 1; i < 200; ++i) CHECK(p(0.5 + 0.01 * i) > 0.0);
    CHECK(p(0.5) == 0.0);
    CHECK(p(2.5) == 0.0);
}

TEST_CASE("fourier_numeric") {
    const auto tri = triangle_weight();
    CHECK(fourier_numeric(tri, 0.5).real() == doctest::Approx(0.405285).epsilon(1e-6));
    CHECK(std::abs(fourier_numeric(tri, 0.5).real() - h_hat(0.5)) < 1e-10);
    const auto b = bump(1.0, 2.0);
    const auto z0 = fourier_numeric(b, 0.0);
    CHECK(z0.real() > 0.0);
    CHECK(z0.imag() == 0.0);
    CHECK(z0.real() == doctest::Approx(integral(b)).epsilon(1e-12));
    for (int i = 0; i < 100; ++i) {
        const double t = -7.3 + 0.147 * i;
        CHECK(std::abs(fourier_numeric(tri, t).real() - h_hat(t)) < 1e-8);
        CHECK(std::abs(fourier_numeric(tri, t).imag()) < 1e-8);
    }
}

TEST_CASE("C3 weight transform decays like |x|^-3") {
    // |w^(x)| <= ||w'''||_1 / (2 pi |x|)^3; on [1, 2] the chain rule gives a factor 2^3
    const auto w = c3_bump(1.0, 2.0);
    const auto third = [](double u) { return std::abs(144.0 * u - 480.0 * u * u * u + 336.0 * std::pow(u, 5)); };
    const auto norm_u = integrate<double>(third, -1.0, 1.0, {0.0}).value;
    const double C = norm_u * 8.0 * 0.5 / std::pow(2.0 * std::numbers::pi, 3);
    for (const double x : {10.0, 20.0, 40.0, -10.0, -40.0}) CHECK(std::abs(fourier_numeric(w, x)) <= C / std::pow(std::abs(x), 3));
}

TEST_CASE("quadrature reports failure") {
    const auto b = bump(1.0, 2.0);
    CHECK_THROWS_AS(fourier_numeric(b, 300.0, {1e-20, 4}), QuadratureFailure);
    const auto res = integrate<double>([](double x) { return x * x; }, 0.0, 3.0);
    CHECK(res.converged);
    CHECK(res.value == doctest::Approx(9.0).epsilon(1e-14));
}

TEST_CASE("kernel k") {
    for (const double X : {10.0, 100.0, 1000.0}) {
        const double L = std::log(X);
        CHECK(kernel_k(0.0, X) == 1.0 / (L * L));
        CHECK(kernel_k(1.0, X) == 0.0);
        CHECK(kernel_k(1.5, X) == 0.0);
        CHECK(kernel_k(-2.0, X) == 0.0);
        for (int i = 0; i <= 1000; ++i) {
            const double t = i / 1000.0;
            CHECK(kernel_k(t, X) == kernel_k(-t, X));
            const double scaled = kernel_k(t, X) * L * L;
            CHECK(scaled >= 0.0);
            CHECK(scaled <= 1.0 + 1e-15);
        }
    }
    CHECK_THROWS_AS(kernel_k(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("kernel k transform") {
    // 30-digit quadrature of 2 int_0^1 k(x) cos(2 pi x t) dx
    CHECK(kernel_k_hat(0.0, 10.0) == doctest::Approx(0.358362224322066465517925576934).epsilon(1e-12));
    CHECK(kernel_k_hat(0.7, 10.0) == doctest::Approx(-0.0732297527458307700590871321268).epsilon(1e-12));
    CHECK(kernel_k_hat(2.3, 10.0) == doctest::Approx(0.0219253281591635633011314860285).epsilon(1e-12));
    CHECK(kernel_k_hat(0.0, 100.0) == doctest::Approx(0.0938343192632779297869305129076).epsilon(1e-12));
    CHECK(kernel_k_hat(0.7, 100.0) == doctest::Approx(-0.020240078030077645530692339751).epsilon(1e-12));
    CHECK(kernel_k_hat(2.3, 100.0) == doctest::Approx(0.00633024138656735494119781283918).epsilon(1e-12));
    for (const double X : {10.0, 100.0}) {
        const auto kw = kernel_k_weight(X);
        for (int i = 0; i < 50; ++i) {
            const double t = -6.0 + 0.2449 * i;
            CHECK(std::abs(fourier_numeric(kw, t).real() - kernel_k_hat(t, X)) < 1e-8);
        }
        // series branch near 0
        CHECK(kernel_k_hat(1e-6, X) == doctest::Approx(kernel_k_hat(0.0, X)).epsilon(1e-9));
    }
}
