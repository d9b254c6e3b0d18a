#pragma once

// Number-theoretic primitives: primes, multiplicative functions, quadratic
// symbols, Gauss and Ramanujan sums.

#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace avgrank {

using i64 = std::int64_t;
using u64 = std::uint64_t;
__extension__ typedef __int128 i128;
__extension__ typedef unsigned __int128 u128;

/// All primes up to `limit`, ascending.
struct PrimeTable {
    i64 limit = 0;
    std::vector<i64> primes;

    auto begin() const { return primes.begin(); }
    auto end() const { return primes.end(); }
    std::size_t size() const { return primes.size(); }
    bool empty() const { return primes.empty(); }

    /// Primes p with lo < p <= hi, as a view into the table.
    std::span<const i64> range(double lo, double hi) const&;
    std::span<const i64> range(double lo, double hi) const&& = delete;
};

PrimeTable sieve_primes(i64 limit);

/// Smallest-prime-factor table for 0..limit (spf[0] = spf[1] = 0).
std::vector<std::uint32_t> smallest_prime_factors(std::uint32_t limit);

bool is_prime(i64 n);

/// gcd(x, 0) = |x|; the result is always nonnegative.
i64 gcd(i64 a, i64 b);

/// Least nonnegative residue of a modulo m (m > 0).
inline i64 mod(i64 a, i64 m) {
    const i64 r = a % m;
    return r < 0 ? r + m : r;
}

i64 mulmod(i64 a, i64 b, i64 m);
i64 powmod(i64 base, u64 exp, i64 m);

/// Inverse of a modulo m; throws std::domain_error when gcd(a, m) != 1.
i64 inverse_mod(i64 a, i64 m);

/// 128-bit product with overflow detection (std::overflow_error).
i128 checked_mul(i128 a, i128 b);
i128 checked_add(i128 a, i128 b);

enum class Validate { no, yes };

/// Legendre symbol (a/p) by Euler's criterion. With Validate::yes an even or
/// composite p is rejected with std::invalid_argument.
int legendre(i64 a, i64 p, Validate validate = Validate::no);

/// Jacobi symbol (a/n) for odd n > 0.
int jacobi(i64 a, i64 n);

/// Kronecker symbol (a/n) for arbitrary integers, no validation of a.
int kronecker_symbol(i64 a, i64 n);

/// chi_D(n) for a fundamental discriminant D (or D = 1). Throws
/// std::invalid_argument for any other D.
int kronecker(i64 D, i64 n);

/// Quadratic character of F_p as a lookup table. Immutable once built; this
/// is what batch trace evaluation reads from.
class QuadraticCharacter {
public:
    explicit QuadraticCharacter(i64 p);

    i64 prime() const { return p_; }
    /// Argument must already be reduced to [0, p).
    int at(i64 reduced) const { return table_[static_cast<std::size_t>(reduced)]; }
    int operator()(i64 a) const { return at(mod(a, p_)); }
    std::span<const std::int8_t> table() const { return table_; }

private:
    i64 p_;
    std::vector<std::int8_t> table_;
};

/// tau_p = sum_{t mod p} (t/p) e_p(t), by direct summation.
std::complex<double> gauss_sum(i64 p);

/// c_b(a) = sum_{d | (a, b)} d mu(b/d).
i64 ramanujan_sum(i64 a, i64 b);

/// Prime factorisation by trial division, ascending primes with exponents.
std::vector<std::pair<i64, int>> factorize(i64 n);

/// Factorisation of |n| for 128-bit n; trial division, so only practical
/// when the cofactor left after small primes is itself small or prime.
std::vector<std::pair<i64, int>> factorize128(i128 n);

i64 squarefree_kernel(i64 n);
bool is_squarefree(i64 n);
bool is_fundamental_discriminant(i64 D);

int moebius(i64 n);
i64 euler_phi(i64 n);

/// Exponent of p in n (n != 0).
int valuation(i128 n, i64 p);

inline int sign(i64 x) { return (x > 0) - (x < 0); }

}  // namespace avgrank
