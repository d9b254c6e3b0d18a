#include <cmath>

#include "avgrank/oracles.hpp"
#include "doctest.h"

using namespace avgrank;

TEST_CASE("gcd_sum_S") {
    CHECK(gcd_sum_S(1, 1).S == 3);
    CHECK(gcd_sum_S(2, 2).S == 29);
    CHECK(gcd_sum_S(2, 2).bound_ratio ==
          doctest::Approx(29.0 / (std::pow(2.0, 1.01) * 2 * (4 + 2))).epsilon(1e-14));
    for (i64 U = 1; U <= 30; U += 3)
        for (i64 V = 1; V <= 30; V += 4) {
            const u64 s = gcd_sum_S(U, V).S;
            CHECK(gcd_sum_S_by_v(U, V) == s);
            CHECK(gcd_sum_S(U + 1, V).S >= s);
            CHECK(gcd_sum_S(U, V + 1).S >= s);
        }
    double worst = 0.0;
    for (const i64 U : {2, 4, 8, 16, 32})
        for (const i64 V : {2, 4, 8, 16, 32}) worst = std::max(worst, gcd_sum_S(U, V).bound_ratio);
    CHECK(worst < 10.0);
    CHECK_THROWS_AS(gcd_sum_S(0, 3), std::invalid_argument);
}

TEST_CASE("exponent helpers") {
    for (const i64 p : {2, 3, 5, 101}) {
        CHECK(delta_of(p) == p);
        CHECK(f_of(p) == 1);
        CHECK(g_of(p) == Rational(1, p));
        CHECK(delta_of(p * p) == p);
        CHECK(f_of(p * p) == p);
        CHECK(g_of(p * p) == Rational(1, p));
        CHECK(beta_of(p) == p);
        CHECK(beta_of(p * p * p * p) == p * p);
    }
    CHECK(delta_of(1) == 1);
    CHECK(f_of(1) == 1);
    CHECK(g_of(1) == Rational(1));
    CHECK(beta_of(1) == 1);
    CHECK(gamma_of(1, 1) == 1);
    CHECK(gamma_of(32, 2) == 4);  // 2^max(5 - 3, 0)
    CHECK_THROWS_AS(gamma_of(12, 5), std::invalid_argument);

    for (i64 d = 1; d <= 10000; ++d) {
        const i64 dl = delta_of(d);
        CHECK(dl * dl >= d);
        CHECK(d >= dl);
        CHECK(f_of(d) * dl == d);
    }
    // g(d) >= d / (delta beta^2 gamma) for every alpha | d
    for (i64 d = 1; d <= 2000; ++d)
        for (i64 alpha = 1; alpha <= d; ++alpha) {
            if (d % alpha != 0) continue;
            const i64 b = beta_of(alpha);
            CHECK(g_of(d) >= Rational(d, delta_of(d) * b * b * gamma_of(d, alpha)));
        }
}

TEST_CASE("Rational") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
    CHECK(Rational(2, 3) * Rational(3, 4) == Rational(1, 2));
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(to_string(Rational(7, 3)) == "7/3");
    CHECK(to_string(Rational(4, 2)) == "2");
    CHECK_THROWS(Rational(1, 0));
}

TEST_CASE("floor_inequality") {
    CHECK(floor_inequality(0, 0));
    CHECK(floor_inequality(5, 2));
    for (int e = 0; e <= 200; ++e)
        for (int f = 0; f <= e; ++f) CHECK(floor_inequality(e, f));
    CHECK_THROWS_AS(floor_inequality(2, 3), std::invalid_argument);
    CHECK_THROWS_AS(floor_inequality(2, -1), std::invalid_argument);
}

TEST_CASE("dirichlet_tail_check") {
    const auto t2 = dirichlet_tail_check(2);
    CHECK(t2.sum_f == 5);
    REQUIRE(t2.sum_g_exact.has_value());
    CHECK(*t2.sum_g_exact == Rational(7, 3));
    CHECK(static_cast<double>(t2.sum_g) == doctest::Approx(7.0 / 3.0).epsilon(1e-15));

    u64 prev = 0;
    for (i64 U = 2; U <= 1024; U *= 2) {
        const auto t = dirichlet_tail_check(U);
        CHECK(t.sum_f > prev);
        prev = t.sum_f;
        CHECK(t.ratio_f <= t.euler_f);
        CHECK(t.ratio_g <= t.euler_g);
    }
    CHECK_THROWS_AS(dirichlet_tail_check(1), std::invalid_argument);
}

TEST_CASE("ramanujan_exponential_oracle") {
    CHECK(std::abs(ramanujan_exponential_oracle(7, 1) - std::complex<double>(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(ramanujan_exponential_oracle(2, 4) - std::complex<double>(-2.0, 0.0)) < 1e-12);
    for (i64 b = 1; b <= 200; ++b)
        for (i64 a = -200; a <= 200; a += 7) {
            const auto z = ramanujan_exponential_oracle(a, b);
            CHECK(std::abs(z.imag()) < 1e-6);
            CHECK(std::abs(z.real() - static_cast<double>(ramanujan_sum(a, b))) < 1e-6);
        }
}
