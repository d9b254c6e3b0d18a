#include <cmath>

#include "avgrank/curves.hpp"
#include "avgrank/twists.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace avgrank;
using testsupport::primes_in;
using testsupport::short_model_trace;

TEST_CASE("discriminant") {
    CHECK(discriminant(1, 0) == -64);
    CHECK(discriminant(0, 0) == 0);
    CHECK(discriminant(-3, 2) == 0);
    CHECK(discriminant(2, 2) == -2240);
    const i64 big = i64{1} << 40;
    CHECK(to_string(discriminant(big, big)) ==
          to_string(-16 * (4 * static_cast<i128>(big) * big * big + 27 * static_cast<i128>(big) * big)));
    CHECK_THROWS_AS(discriminant(INT64_MAX, 0), std::overflow_error);
    CHECK(to_string(-i128{1234567890123456789} * 1000) == "-1234567890123456789000");
}

TEST_CASE("is_minimal") {
    CHECK_FALSE(is_minimal(16, 64));
    CHECK(is_minimal(1, 1));
    CHECK(is_minimal(16, 32));
    CHECK_FALSE(is_minimal(0, 0));
    CHECK_FALSE(is_minimal(0, 64));
    CHECK_FALSE(is_minimal(81, 0));
    CHECK(is_minimal(0, 1));
}

TEST_CASE("sigma_p examples") {
    CHECK(sigma_p(1, 0, 5) == 2);
    CHECK(sigma_p(0, 0, 5) == 0);
    CHECK(sigma_p_charsum(1, 0, 5) == 2);
    CHECK_THROWS_AS(sigma_p(1, 0, 3), std::invalid_argument);
    CHECK_THROWS_AS(sigma_p(1, 0, 9), std::invalid_argument);
    CHECK_THROWS_AS(sigma_p_charsum(1, 0, 2), std::invalid_argument);
}

TEST_CASE("sigma_p against point counting and Hasse") {
    for (const i64 p : primes_in(4.0, 47.0))
        for (i64 r = -10; r <= 10; ++r)
            for (i64 s = -10; s <= 10; ++s) {
                const int sig = sigma_p(r, s, p);
                CHECK(sig == short_model_trace(r, s, p));
                CHECK(static_cast<double>(std::abs(sig)) <= 2.0 * std::sqrt(static_cast<double>(p)));
            }
}

TEST_CASE("character-sum route agrees with sigma_p") {
    for (const i64 p : {5, 7, 11, 13})
        for (i64 r = -5; r <= 5; ++r)
            for (i64 s = -5; s <= 5; ++s) CHECK(sigma_p_charsum(r, s, p) == sigma_p(r, s, p));
}

TEST_CASE("batch evaluator matches sigma_p") {
    for (const i64 p : {5, 7, 101, 211}) {
        const SigmaEvaluator ev(p);
        for (i64 r = -12; r <= 12; ++r)
            for (i64 s = -12; s <= 12; ++s) CHECK(ev(r, s) == sigma_p(r, s, p));
    }
}

TEST_CASE("sigma_p depends only on (r, s) mod p") {
    for (const i64 p : {5, 7, 13, 31})
        for (i64 r = -3; r <= 3; ++r)
            for (i64 s = -3; s <= 3; ++s)
                for (const auto& [u, v] : {std::pair<i64, i64>{1, 0}, {0, 1}, {-2, 3}, {5, -7}})
                    CHECK(sigma_p(r + p * u, s + p * v, p) == sigma_p(r, s, p));
}

TEST_CASE("singular curves have |sigma_p| <= 1") {
    // delta = 0 exactly on (-3 t^2, 2 t^3)
    for (i64 t = -6; t <= 6; ++t) {
        const i64 r = -3 * t * t, s = 2 * t * t * t;
        REQUIRE(discriminant(r, s) == 0);
        for (const i64 p : primes_in(4.0, 97.0)) CHECK(std::abs(sigma_p(r, s, p)) <= 1);
    }
}

TEST_CASE("ap") {
    const auto t = ap(Curve(1, 0), 5);
    CHECK(t.ap == 2);
    CHECK_FALSE(t.bad);
    CHECK(ap(Curve(2, 2), 5).bad);
    CHECK(ap(Curve(2, 2), 7).bad);
    CHECK_FALSE(ap(Curve(2, 2), 11).bad);
    CHECK_THROWS_AS(ap(Curve(0, 0), 5), std::invalid_argument);
    CHECK_THROWS_AS(ap(Curve(16, 64), 5), NonMinimalCurveError);
    CHECK_THROWS_AS(ap(Curve(1, 0), 3), std::invalid_argument);
}

TEST_CASE("ap of 37a and 11a against their long Weierstrass models") {
    // 37a: y^2 + y = x^3 - x; 11a: y^2 + y = x^3 - x^2 - 10x - 20
    const auto e37 = curve_37a().curve;
    const auto e11 = curve_11a().curve;
    for (const i64 p : primes_in(4.0, 200.0)) {
        if (p != 37) CHECK(ap(e37, p).ap == testsupport::long_model_trace(0, 0, 1, -1, 0, p));
        if (p != 11) CHECK(ap(e11, p).ap == testsupport::long_model_trace(0, -1, 1, -10, -20, p));
    }
    CHECK(ap(e37, 5).ap == -2);
    CHECK(ap(e37, 7).ap == -1);
    CHECK(ap(e37, 11).ap == -5);
    CHECK(ap(e37, 13).ap == -2);
    CHECK(ap(e37, 17).ap == 0);
    CHECK(ap(e11, 5).ap == 1);
    CHECK(ap(e11, 7).ap == -2);
    CHECK(ap(e11, 13).ap == 4);
    CHECK(ap(e37, 37).bad);
    CHECK(ap(e11, 11).bad);
}

TEST_CASE("c_pk") {
    CHECK(c_pk({5, 2, false}, 1) == doctest::Approx(-0.4).epsilon(1e-15));
    CHECK(c_pk({5, 2, false}, 2) == doctest::Approx(0.12).epsilon(1e-15));
    CHECK(c_pk({7, 1, true}, 2) == doctest::Approx(-1.0 / 98.0).epsilon(1e-15));
    CHECK_THROWS_AS(c_pk({5, 2, false}, 3), std::invalid_argument);
    for (const i64 p : primes_in(4.0, 97.0))
        for (int a = -static_cast<int>(2 * std::sqrt(p)); a <= static_cast<int>(2 * std::sqrt(p)); ++a) {
            const TraceData t{p, a, false};
            const double pd = static_cast<double>(p);
            CHECK(c_pk(t, 1) * -pd == doctest::Approx(a).epsilon(1e-14));
            CHECK(-2.0 * pd * pd * c_pk(t, 2) + 2.0 * pd == doctest::Approx(a * a).epsilon(1e-14));
        }
}

TEST_CASE("conductor_surrogate") {
    CHECK(conductor_surrogate(Curve(1, 0)) == 256);
    CHECK(conductor_surrogate(Curve(2, 2)) == 8960);
    CHECK_THROWS_AS(conductor_surrogate(Curve(0, 0)), std::invalid_argument);
    // 3 | delta: (0, 1) has delta = -432 = -2^4 3^3
    CHECK(conductor_surrogate(Curve(0, 1)) == 256 * 243);
    // p | r and p | delta: (5, 5), delta = -16 (500 + 675) = -2^4 5^2 47
    CHECK(conductor_surrogate(Curve(5, 5)) == 256 * 25 * 47);
    const std::vector<i64> support{5, 7};
    CHECK(conductor_surrogate(Curve(2, 2), support) == 8960);
    const std::vector<i64> too_small{5};
    CHECK_THROWS_AS(conductor_surrogate(Curve(2, 2), too_small), std::invalid_argument);
    CHECK(log_conductor_surrogate(Curve(2, 2)) == doctest::Approx(std::log(8960.0)));
}

TEST_CASE("star_map") {
    const auto a = star_map(16, 64);
    CHECK(a.minimal == Curve(1, 1));
    CHECK(a.d == 2);
    const auto b = star_map(1, 1);
    CHECK(b.minimal == Curve(1, 1));
    CHECK(b.d == 1);
    const auto c = star_map(81 * 16, 729 * 64);
    CHECK(c.minimal == Curve(1, 1));
    CHECK(c.d == 6);
    CHECK_THROWS_AS(star_map(0, 0), std::invalid_argument);
    // r = 0 or s = 0 only constrain the other coefficient
    CHECK(star_map(0, 64).d == 2);
    CHECK(star_map(0, 64).minimal == Curve(0, 1));
    for (i64 r = -40; r <= 40; ++r)
        for (i64 s = -40; s <= 40; ++s) {
            if (r == 0 && s == 0) continue;
            const auto sm = star_map(r, s);
            CHECK(star_map(sm.minimal.r, sm.minimal.s).d == 1);
            const i64 d2 = sm.d * sm.d;
            CHECK(sm.minimal.r * d2 * d2 == r);
            CHECK(sm.minimal.s * d2 * d2 * d2 == s);
        }
}
