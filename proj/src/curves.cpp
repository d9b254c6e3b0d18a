#include "avgrank/curves.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace avgrank {

i128 discriminant(i64 r, i64 s) {
    const i128 r3 = checked_mul(checked_mul(r, r), r);
    const i128 s2 = checked_mul(s, s);
    const i128 inner = checked_add(checked_mul(4, r3), checked_mul(27, s2));
    return checked_mul(-16, inner);
}

std::string to_string(i128 v) {
    if (v == 0) return "0";
    const bool neg = v < 0;
    u128 m = neg ? static_cast<u128>(-(v + 1)) + 1 : static_cast<u128>(v);
    std::string out;
    while (m != 0) {
        out.push_back(static_cast<char>('0' + static_cast<int>(m % 10)));
        m /= 10;
    }
    if (neg) out.push_back('-');
    std::reverse(out.begin(), out.end());
    return out;
}

bool is_minimal(i64 r, i64 s) {
    if (r == 0 && s == 0) return false;
    // any offending p divides gcd(r, s) (gcd(x, 0) = |x|), and p^4 <= |r| or
    // p^6 <= |s| for whichever coefficient is nonzero
    const i64 g = gcd(r, s);
    for (const auto& [p, e] : factorize(g)) {
        const bool r_ok = r == 0 || valuation(r, p) >= 4;
        const bool s_ok = s == 0 || valuation(s, p) >= 6;
        if (r_ok && s_ok) return false;
    }
    return true;
}

namespace {

void require_prime_ge5(i64 p) {
    if (p < 5 || !is_prime(p))
        throw std::invalid_argument("trace requested at p = " + std::to_string(p) + "; need a prime p >= 5");
}

}  // namespace

SigmaEvaluator::SigmaEvaluator(i64 p) : chi_(p) {
    if (p < 5) throw std::invalid_argument("SigmaEvaluator: p must be >= 5");
}

int SigmaEvaluator::reduced(i64 r, i64 s) const {
    const i64 p = prime();
    // f(x) = x^3 + r x + s stepped by finite differences:
    //   f(x+1) - f(x) = 3x^2 + 3x + 1 + r,  second difference 6x + 6
    i64 f = s;
    i64 d1 = mod(1 + r, p);
    i64 d2 = 6 % p;
    int total = 0;
    const auto table = chi_.table();
    for (i64 x = 0; x < p; ++x) {
        total += table[static_cast<std::size_t>(f)];
        f += d1;
        if (f >= p) f -= p;
        d1 += d2;
        if (d1 >= p) d1 -= p;
        d2 += 6;
        if (d2 >= p) d2 -= p;
    }
    return -total;
}

int sigma_p(i64 r, i64 s, i64 p) {
    require_prime_ge5(p);
    return SigmaEvaluator(p)(r, s);
}

int sigma_p_charsum(i64 r, i64 s, i64 p) {
    require_prime_ge5(p);
    const QuadraticCharacter chi(p);
    std::vector<std::complex<double>> e(static_cast<std::size_t>(p));
    for (i64 k = 0; k < p; ++k)
        e[static_cast<std::size_t>(k)] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(p));

    const i64 rr = mod(r, p), ss = mod(s, p);
    std::vector<i64> f(static_cast<std::size_t>(p));
    for (i64 x = 0; x < p; ++x) {
        const i64 x3 = mulmod(mulmod(x, x, p), x, p);
        f[static_cast<std::size_t>(x)] = mod(x3 + mulmod(x, rr, p) + ss, p);
    }

    // t = 0 carries (0/p) = 0 and is skipped
    std::complex<double> total{0.0, 0.0};
    for (i64 t = 1; t < p; ++t) {
        std::complex<double> inner{0.0, 0.0};
        for (i64 x = 0; x < p; ++x) inner += e[static_cast<std::size_t>(mulmod(t, f[static_cast<std::size_t>(x)], p))];
        total += static_cast<double>(chi.at(t)) * inner;
    }
    const std::complex<double> value = -total / gauss_sum(p);
    const double rounded = std::round(value.real());
    const double residual = std::max(std::abs(value.imag()), std::abs(value.real() - rounded));
    if (residual >= 1e-6)
        throw NumericalDriftError("sigma_p_charsum: numerical drift " + std::to_string(residual) + " at p = " +
                                  std::to_string(p));
    return static_cast<int>(rounded);
}

TraceData ap(const Curve& curve, const SigmaEvaluator& sigma) {
    if (curve.singular()) throw std::invalid_argument("ap: singular curve");
    if (!is_minimal(curve))
        throw NonMinimalCurveError("ap: model (" + std::to_string(curve.r) + ", " + std::to_string(curve.s) +
                                   ") is not minimal; apply star_map first");
    const i64 p = sigma.prime();
    return TraceData{p, sigma(curve.r, curve.s), curve.delta % p == 0};
}

TraceData ap(const Curve& curve, i64 p) {
    require_prime_ge5(p);
    return ap(curve, SigmaEvaluator(p));
}

double c_pk(const TraceData& trace, int k) {
    const double p = static_cast<double>(trace.p);
    const double a = trace.ap;
    switch (k) {
    case 1:
        return -a / p;
    case 2:
        // good reduction: alpha^2 + conj(alpha)^2 = a_p^2 - 2p
        return trace.bad ? -(a * a) / (2.0 * p * p) : -(a * a - 2.0 * p) / (2.0 * p * p);
    default:
        throw std::invalid_argument("c_pk: k must be 1 or 2");
    }
}

namespace {

i128 surrogate_from(const Curve& curve, const std::vector<i64>& odd_primes) {
    i128 n = 256;  // 2^8
    if (curve.delta % 3 == 0) n = checked_mul(n, 243);  // 3^5
    for (const i64 p : odd_primes) {
        if (p < 5) continue;
        n = checked_mul(n, curve.r % p == 0 ? static_cast<i128>(p) * p : static_cast<i128>(p));
    }
    return n;
}

}  // namespace

i128 conductor_surrogate(const Curve& curve) {
    if (curve.singular()) throw std::invalid_argument("conductor_surrogate: singular curve");
    std::vector<i64> primes;
    for (const auto& [p, e] : factorize128(curve.delta)) primes.push_back(p);
    return surrogate_from(curve, primes);
}

i128 conductor_surrogate(const Curve& curve, std::span<const i64> prime_support) {
    if (curve.singular()) throw std::invalid_argument("conductor_surrogate: singular curve");
    i128 rest = curve.delta < 0 ? -curve.delta : curve.delta;
    for (const i64 q : {i64{2}, i64{3}})
        while (rest % q == 0) rest /= q;
    std::vector<i64> primes;
    std::vector<i64> support(prime_support.begin(), prime_support.end());
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    for (const i64 p : support) {
        if (p < 5 || rest % p != 0) continue;
        primes.push_back(p);
        while (rest % p == 0) rest /= p;
    }
    if (rest != 1)
        throw std::invalid_argument("conductor_surrogate: discriminant has a prime factor outside the supplied support");
    return surrogate_from(curve, primes);
}

double log_conductor_surrogate(const Curve& curve) {
    return std::log(static_cast<long double>(conductor_surrogate(curve)));
}

StarMap star_map(i64 r, i64 s) {
    if (r == 0 && s == 0) throw std::invalid_argument("star_map: (0, 0) has no minimal model");
    i64 d = 1;
    for (const auto& [p, e] : factorize(gcd(r, s))) {
        const int by_r = r == 0 ? 1 << 20 : valuation(r, p) / 4;
        const int by_s = s == 0 ? 1 << 20 : valuation(s, p) / 6;
        const int k = std::min(by_r, by_s);
        for (int i = 0; i < k; ++i) d *= p;
    }
    const i64 d2 = d * d;
    const i64 d4 = d2 * d2;
    const i64 d6 = d4 * d2;
    return StarMap{Curve(r / d4, s / d6), d};
}

}  // namespace avgrank
