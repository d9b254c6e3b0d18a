#include "avgrank/oracles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace avgrank {

GcdSumResult gcd_sum_S(i64 U, i64 V) {
    if (U < 1 || V < 1) throw std::invalid_argument("gcd_sum_S: U and V must be >= 1");
    GcdSumResult out{U, V, 0, 0.0};
    for (i64 u = 1; u <= U; ++u)
        for (i64 v = kGcdSumVStart; v <= V; ++v)
            for (i64 w = -v; w <= v; ++w) out.S += static_cast<u64>(gcd(u * u, v * v * v - w * w * w));
    const double Ud = static_cast<double>(U), Vd = static_cast<double>(V);
    out.bound_ratio = static_cast<double>(out.S) / (std::pow(Ud, 1.01) * Vd * (Ud * Ud + Vd));
    return out;
}

u64 gcd_sum_S_by_v(i64 U, i64 V) {
    if (U < 1 || V < 1) throw std::invalid_argument("gcd_sum_S_by_v: U and V must be >= 1");
    std::vector<i64> squares;
    for (i64 u = 1; u <= U; ++u) squares.push_back(u * u);
    u64 total = 0;
    for (i64 v = V; v >= kGcdSumVStart; --v) {
        const i64 v3 = v * v * v;
        for (i64 w = v; w >= -v; --w) {
            const i64 diff = v3 - w * w * w;
            if (diff == 0) {
                for (const i64 sq : squares) total += static_cast<u64>(sq);
                continue;
            }
            for (const i64 sq : squares) total += static_cast<u64>(gcd(diff, sq));
        }
    }
    return total;
}

Rational::Rational(i64 n, i64 d) {
    if (d == 0) throw std::invalid_argument("Rational: zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    const i64 g = gcd(n, d);
    num = g == 0 ? 0 : n / g;
    den = g == 0 ? 1 : d / g;
}

Rational operator+(const Rational& a, const Rational& b) {
    const i64 g = gcd(a.den, b.den);
    const i128 n = static_cast<i128>(a.num) * (b.den / g) + static_cast<i128>(b.num) * (a.den / g);
    const i128 d = static_cast<i128>(a.den / g) * b.den;
    if (n > INT64_MAX || d > INT64_MAX || n < INT64_MIN) throw std::overflow_error("Rational overflow");
    return {static_cast<i64>(n), static_cast<i64>(d)};
}

Rational operator*(const Rational& a, const Rational& b) {
    const i128 n = static_cast<i128>(a.num) * b.num;
    const i128 d = static_cast<i128>(a.den) * b.den;
    if (n > INT64_MAX || d > INT64_MAX || n < INT64_MIN) throw std::overflow_error("Rational overflow");
    return {static_cast<i64>(n), static_cast<i64>(d)};
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return static_cast<i128>(a.num) * b.den <=> static_cast<i128>(b.num) * a.den;
}

std::string to_string(const Rational& q) {
    return q.den == 1 ? std::to_string(q.num) : std::to_string(q.num) + "/" + std::to_string(q.den);
}

namespace {

i64 ipow(i64 p, int e) {
    i64 out = 1;
    for (int i = 0; i < e; ++i) out *= p;
    return out;
}

void require_positive(i64 d, const char* who) {
    if (d < 1) throw std::invalid_argument(std::string(who) + ": argument must be positive");
}

}  // namespace

i64 delta_of(i64 d) {
    require_positive(d, "delta_of");
    i64 out = 1;
    for (const auto& [p, e] : factorize(d)) out *= ipow(p, (e + 1) / 2);
    return out;
}

i64 f_of(i64 d) {
    require_positive(d, "f_of");
    i64 out = 1;
    for (const auto& [p, e] : factorize(d)) out *= ipow(p, e / 2);
    return out;
}

Rational g_of(i64 d) {
    require_positive(d, "g_of");
    i64 num = 1, den = 1;
    for (const auto& [p, e] : factorize(d)) {
        const int x = e / 3 - (e + 1) / 2;
        if (x >= 0)
            num *= ipow(p, x);
        else
            den *= ipow(p, -x);
    }
    return {num, den};
}

i64 beta_of(i64 alpha) {
    require_positive(alpha, "beta_of");
    i64 out = 1;
    for (const auto& [p, f] : factorize(alpha)) out *= ipow(p, (f + 2) / 3);
    return out;
}

i64 gamma_of(i64 d, i64 alpha) {
    require_positive(d, "gamma_of");
    require_positive(alpha, "gamma_of");
    if (d % alpha != 0) throw std::invalid_argument("gamma_of: alpha must divide d");
    i64 out = 1;
    for (const auto& [p, e] : factorize(d)) {
        const int f = valuation(alpha, p);
        out *= ipow(p, std::max(e - 3 * ((f + 2) / 3), 0));
    }
    return out;
}

bool floor_inequality(int e, int f) {
    if (f < 0 || f > e) throw std::invalid_argument("floor_inequality: need 0 <= f <= e");
    const int lhs = e / 3 - (e + 1) / 2;
    const int b = (f + 2) / 3;
    const int rhs = e - (e + 1) / 2 - 2 * b - std::max(e - 3 * b, 0);
    return lhs >= rhs;
}

DirichletTail dirichlet_tail_check(i64 U) {
    if (U < 2) throw std::invalid_argument("dirichlet_tail_check: U must be >= 2");
    const i64 limit = U * U;
    if (limit > (i64{1} << 32)) throw std::invalid_argument("dirichlet_tail_check: U too large");
    const auto spf = smallest_prime_factors(static_cast<std::uint32_t>(limit));

    DirichletTail out;
    out.U = U;
    constexpr i64 kExactLimit = 16;  // exact rational sum while denominators stay small
    Rational exact(0);
    long double sum_g = 0;
    for (i64 d = 1; d <= limit; ++d) {
        i64 f = 1, gnum = 1, gden = 1;
        for (i64 m = d; m > 1;) {
            const i64 p = spf[static_cast<std::size_t>(m)];
            int e = 0;
            while (m % p == 0) {
                m /= p;
                ++e;
            }
            f *= ipow(p, e / 2);
            const int x = e / 3 - (e + 1) / 2;
            (x >= 0 ? gnum : gden) *= ipow(p, x >= 0 ? x : -x);
        }
        out.sum_f += static_cast<u64>(f);
        sum_g += static_cast<long double>(gnum) / static_cast<long double>(gden);
        if (limit <= kExactLimit) exact = exact + Rational(gnum, gden);
    }
    out.sum_g = sum_g;
    if (limit <= kExactLimit) out.sum_g_exact = exact;
    const double Ud = static_cast<double>(U);
    out.ratio_f = static_cast<double>(out.sum_f) / std::pow(Ud, 2.1);
    out.ratio_g = static_cast<double>(sum_g) / std::pow(Ud, 0.1);

    long double euler_f = 1, euler_g = 1;
    for (i64 p = 2; p <= limit; ++p) {
        if (spf[static_cast<std::size_t>(p)] != p) continue;
        long double local_f = 1, local_g = 1;
        const auto pl = static_cast<long double>(p);
        i64 pe = 1;
        for (int e = 1; pe <= limit / p; ++e) {
            pe *= p;
            local_f += std::pow(pl, static_cast<long double>(e / 2) - 1.05L * e);
            local_g += std::pow(pl, static_cast<long double>(e / 3 - (e + 1) / 2) - 0.05L * e);
        }
        euler_f *= local_f;
        euler_g *= local_g;
    }
    out.euler_f = static_cast<double>(euler_f);
    out.euler_g = static_cast<double>(euler_g);
    return out;
}

std::complex<double> ramanujan_exponential_oracle(i64 a, i64 b) {
    if (b < 1) throw std::invalid_argument("ramanujan_exponential_oracle: b must be >= 1");
    std::complex<double> total{0.0, 0.0};
    for (i64 j = 0; j < b; ++j) {
        if (gcd(j, b) != 1) continue;
        const i64 jinv = b == 1 ? 0 : inverse_mod(j, b);
        const i64 k = mod(-mulmod(mod(a, b), jinv, b), b);
        total += std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(b));
    }
    return total;
}

}  // namespace avgrank
