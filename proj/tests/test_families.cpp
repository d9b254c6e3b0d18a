#include <cmath>
#include <set>

#include "avgrank/families.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace avgrank;
using testsupport::primes_in;
using testsupport::short_model_trace;

TEST_CASE("root_floor") {
    CHECK(root_floor(64, 3) == 4);
    CHECK(root_floor(63.999, 3) == 3);
    CHECK(root_floor(1e4, 2) == 100);
    CHECK(root_floor(1e6, 3) == 100);
    CHECK(root_floor(0.5, 2) == 0);
}

TEST_CASE("enumerate_D and enumerate_C") {
    CHECK(count(enumerate_D(64)) == 150);
    CHECK(count(enumerate_D(1)) == 8);
    CHECK(count(enumerate_C(64)) == 150);
    for (const auto& c : enumerate_D(1e3)) CHECK_FALSE(c.singular());

    std::set<std::pair<i64, i64>> D, C;
    for (const auto& c : enumerate_D(2e5)) D.insert({c.r, c.s});
    for (const auto& c : enumerate_C(2e5)) C.insert({c.r, c.s});
    CHECK(D.count({1, 1}) == 1);
    CHECK(C.count({1, 1}) == 1);
    CHECK(D.count({16, 64}) == 1);  // |r| <= 58, |s| <= 447
    CHECK(C.count({16, 64}) == 0);
    for (const auto& key : C) CHECK(D.count(key) == 1);
    // every excluded nonsingular pair is divisible by some p^4, p^6
    for (const auto& [r, s] : D)
        if (!C.count({r, s})) CHECK(star_map(r, s).d > 1);
}

TEST_CASE("weight_wT") {
    const FamilyParams params{1e6};
    CHECK(weight_wT(0, 700, params) == 0.0);
    CHECK(weight_wT(101, 700, params) == 0.0);
    CHECK(weight_wT(75, 750, params) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(weight_wT(-75, -750, params) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    // |delta| <= 496 T wherever the weight is nonzero
    for (const auto& c : enumerate_D(1e5))
        if (weight_wT(c, FamilyParams{1e5}) != 0.0) CHECK(static_cast<double>(c.delta < 0 ? -c.delta : c.delta) <= 496e5);
}

TEST_CASE("S_T") {
    CHECK(S_T(FamilyParams{1.0}) == 0.0);
    const FamilyParams p4{1e4}, p5{1e5};
    const double s4 = S_T(p4), s5 = S_T(p5);
    CHECK(s4 > 0.0);
    FamilyParams all_nonsingular{1e4};
    all_nonsingular.minimal_only = false;
    CHECK(s4 <= weighted_count(all_nonsingular));
    CHECK(weighted_count(p4) == s4);
    const double ratio4 = s4 / std::pow(1e4, 5.0 / 6.0);
    const double ratio5 = s5 / std::pow(1e5, 5.0 / 6.0);
    CHECK(std::abs(ratio5 / ratio4 - 1.0) < 0.05);
    CHECK(S_T(p4, 3) == s4);
}

TEST_CASE("U1 and U2 by hand") {
    const auto primes = sieve_primes(200);
    const Curve e(1, 0);
    CHECK(U1(e, 4.0, primes) == 0.0);
    CHECK(U2(e, 24.0, primes) == 0.0);

    const double X = 10.0;
    const double a5 = short_model_trace(1, 0, 5), a7 = short_model_trace(1, 0, 7);
    const double l5 = std::log(5.0), l7 = std::log(7.0);
    const double expected = -(l5 / 5 * h(l5 / std::log(X)) * a5 + l7 / 7 * h(l7 / std::log(X)) * a7);
    CHECK(U1(e, X, primes) == doctest::Approx(expected).epsilon(1e-14));

    const double c25 = 0.12;
    CHECK(U2(e, 30.0, primes) == doctest::Approx(c25 * 2 * l5 * h(2 * l5 / std::log(30.0))).epsilon(1e-14));
}

TEST_CASE("U2 bound over a family") {
    const auto primes = sieve_primes(10000);
    for (const double X : {1e2, 1e4}) {
        double cap = 0.0;
        for (const i64 p : primes_in(4.0, std::sqrt(X))) cap += 2.0 * std::log(static_cast<double>(p)) / p;
        for (const auto& c : enumerate_C(1e3)) CHECK(std::abs(U2(c, X, primes)) <= cap);
    }
}

TEST_CASE("ExplicitFormula agrees with the direct sums") {
    const auto primes = sieve_primes(400);
    const ExplicitFormula f(400.0);
    for (const auto& c : enumerate_C(2e3)) {
        const auto t = f.evaluate(c);
        CHECK(t.U1 == doctest::Approx(U1(c, 400.0, primes)).epsilon(1e-12));
        CHECK(t.U2 == doctest::Approx(U2(c, 400.0, primes)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(f.evaluate(Curve(16, 64)), NonMinimalCurveError);
}

TEST_CASE("rank_bound") {
    const auto primes = sieve_primes(300);
    const Curve e(1, 0);
    const ExplicitFormula f256(256.0);
    const auto rec = rank_bound_record(e, 1.0, f256, 3.0);
    CHECK(rec.logN_term == 1.0);
    CHECK(rec.bound == doctest::Approx(1.0 + rec.U1_term + rec.U2_term + 3.0 / std::log(256.0)).epsilon(1e-15));

    // logN + C0 part falls with X
    CHECK(std::log(256.0) / std::log(300.0) + 1 / std::log(300.0) < 1.0 + 1 / std::log(256.0));

    // term-by-term oracle at X = 100 with traces from point counting
    const double X = 100.0, L = std::log(X);
    double u1 = 0.0, u2 = 0.0;
    for (const i64 p : primes_in(4.0, X)) {
        const double lp = std::log(static_cast<double>(p));
        const double a = short_model_trace(1, 0, p);
        u1 -= lp / p * h(lp / L) * a;
        if (p * p <= X) u2 += -(a * a - 2.0 * p) / (2.0 * p * p) * 2 * lp * h(2 * lp / L);
    }
    const double expected = std::log(256.0) / L + 2.0 / L * (u1 + u2);
    CHECK(rank_bound(e, X, 0.0, primes) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(rank_bound_record(e, 1.0, ExplicitFormula(X), 0.0).bound == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("average_rank_experiment") {
    FamilyParams params{1e4};
    std::vector<RankBoundRecord> rows;
    const auto sum = average_rank_experiment(params, default_X(1e4), 0.0, 1,
                                             [&](const RankBoundRecord& r) { rows.push_back(r); });
    CHECK(sum.S_T > 0.0);
    CHECK(sum.S_T == doctest::Approx(S_T(params)).epsilon(1e-12));
    CHECK(sum.S_T <= sum.S_D);
    CHECK(rows.size() == sum.curves);
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(std::make_pair(rows[i - 1].r, rows[i - 1].s) < std::make_pair(rows[i].r, rows[i].s));
    double w = 0.0, b = 0.0, u1 = 0.0, u2 = 0.0;
    for (const auto& r : rows) {
        w += r.weight;
        b += r.weight * r.bound;
        u1 += r.weight * r.U1_term;
        u2 += r.weight * r.U2_term;
    }
    CHECK(sum.avg_bound == doctest::Approx(b / w).epsilon(1e-12));
    CHECK(sum.avg_U1_term == doctest::Approx(u1 / w).epsilon(1e-10));
    CHECK(sum.avg_U2_term == doctest::Approx(u2 / w).epsilon(1e-12));
    CHECK(sum.avg_U2_over_logX == doctest::Approx(sum.avg_U2_term / 2).epsilon(1e-15));

    const auto threaded = average_rank_experiment(params, default_X(1e4), 0.0, 4);
    CHECK(threaded.avg_bound == sum.avg_bound);
    CHECK(threaded.S_T == sum.S_T);
    CHECK(threaded.avg_U1_term == sum.avg_U1_term);

    CHECK_THROWS_AS(average_rank_experiment(params, 1e4, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(average_rank_experiment(params, 20.0, 0.0), std::invalid_argument);

    FamilyParams degenerate{64.0};
    degenerate.weight_r = even_bump(0.5, 0.51);
    CHECK_THROWS_AS(average_rank_experiment(degenerate, 25.0, 0.0), EmptyFamilyError);
}

TEST_CASE("lemma2_lhs") {
    const FamilyParams params{1e4};
    CHECK(lemma2_lhs(params, 11.0, sieve_primes(10)) == 0.0);
    const auto primes = sieve_primes(1000);
    const double v = lemma2_lhs(params, 11.0, primes);
    CHECK(v > 0.0);
    CHECK(std::isfinite(v));
    CHECK(lemma2_lhs(params, 11.0, primes) == v);

    // direct double sum over the unfiltered box
    const FamilyParams small{2e3};
    const auto box = CoefficientBox::for_scale(small.T);
    double direct = 0.0;
    for (const i64 p : primes_in(11.0, 22.0)) {
        double inner = 0.0;
        for (std::size_t i = 0; i < box.size(); ++i) {
            const auto [r, s] = box.at(i);
            inner += weight_wT(r, s, small) * short_model_trace(r, s, p);
        }
        direct += std::abs(inner);
    }
    CHECK(lemma2_lhs(small, 11.0, primes) == doctest::Approx(direct).epsilon(1e-10));

    // normalised by the bound shape, over a small (T, P) grid
    for (const double T : {1e3, 1e4, 1e5})
        for (const double P : {11.0, 23.0, 47.0}) {
            const double shape = std::sqrt(P) * std::pow(T, 5.0 / 6) + std::pow(P, 1.5) * std::sqrt(T) +
                                 P * P * std::cbrt(T) + std::pow(P, 3.5) / T;
            CHECK(lemma2_lhs(FamilyParams{T}, P, primes) / shape < 1.0);
        }
}

TEST_CASE("star-map partition") {
    for (const i64 p : {5, 7}) {
        const auto part = star_map_partition(FamilyParams{1e3}, p);
        CHECK(part.lhs == doctest::Approx(part.main + part.theta).epsilon(1e-12));
        CHECK(part.theta == 0.0);
    }
}

TEST_CASE("star-map partition with p | d" * doctest::timeout(120)) {
    // 5^12 <= T, so curves scaled by d = 5 enter and theta picks them up
    const auto part = star_map_partition(FamilyParams{2.5e8}, 5);
    CHECK(part.scaled_curves > 0);
    CHECK(part.theta != 0.0);
    CHECK(part.lhs == doctest::Approx(part.main + part.theta).epsilon(1e-10));
}
