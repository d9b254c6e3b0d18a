#pragma once

// Brute-force checks for the gcd sum bound, its exponent bookkeeping, and the
// Ramanujan-sum evaluation.

#include <complex>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "avgrank/arith.hpp"

namespace avgrank {

/// Summation ranges of the gcd sum: 1 <= u <= U, 1 <= v <= V, -v <= w <= v,
/// with gcd(x, 0) = |x|.
inline constexpr int kGcdSumVStart = 1;

struct GcdSumResult {
    i64 U = 0, V = 0;
    u64 S = 0;
    double bound_ratio = 0.0;  // S / (U^{1.01} V (U^2 + V))
};

/// sum_{u <= U} sum_{1 <= v <= V} sum_{|w| <= v} gcd(u^2, v^3 - w^3), u outermost.
GcdSumResult gcd_sum_S(i64 U, i64 V);
/// Same sum with v outermost and the gcd taken against a precomputed table.
u64 gcd_sum_S_by_v(i64 U, i64 V);

/// Exact nonnegative fraction in lowest terms.
struct Rational {
    i64 num = 0;
    i64 den = 1;

    Rational() = default;
    Rational(i64 n, i64 d = 1);
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);
};

std::string to_string(const Rational& q);

/// prod p^[(e+1)/2] over d = prod p^e.
i64 delta_of(i64 d);
/// prod p^[e/2]; equals d / delta_of(d).
i64 f_of(i64 d);
/// prod p^([e/3] - [(e+1)/2]).
Rational g_of(i64 d);
/// prod p^[(f+2)/3] over alpha = prod p^f.
i64 beta_of(i64 alpha);
/// prod p^max(e - 3[(f+2)/3], 0), with e from d and f from alpha (alpha | d).
i64 gamma_of(i64 d, i64 alpha);

/// [e/3] - [(e+1)/2] >= e - [(e+1)/2] - 2[(f+2)/3] - max(e - 3[(f+2)/3], 0).
bool floor_inequality(int e, int f);

struct DirichletTail {
    i64 U = 0;
    u64 sum_f = 0;                  // sum_{d <= U^2} f(d)
    long double sum_g = 0;          // sum_{d <= U^2} g(d)
    std::optional<Rational> sum_g_exact;  // U <= 4 only
    double ratio_f = 0.0;           // sum_f / U^2.1
    double ratio_g = 0.0;           // sum_g / U^0.1
    double euler_f = 0.0;           // prod_{p <= U^2} sum_{p^e <= U^2} f(p^e) p^{-1.05 e}
    double euler_g = 0.0;           // prod_{p <= U^2} sum_{p^e <= U^2} g(p^e) p^{-0.05 e}
};

/// Partial sums of f and g up to U^2, their normalised ratios and truncated
/// Euler products that bound those ratios from above.
DirichletTail dirichlet_tail_check(i64 U);

/// sum over j mod b with (j, b) = 1 of e_b(-a j^{-1}), summed directly.
std::complex<double> ramanujan_exponential_oracle(i64 a, i64 b);

}  // namespace avgrank
