#pragma once

// The curve model y^2 = x^3 + r x + s, its discriminant and minimality,
// Frobenius traces via two independent character-sum routes, the explicit
// formula coefficients c_{p^k}, and a conservative conductor bound.

#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include "avgrank/arith.hpp"

namespace avgrank {

/// Raised when the complex character-sum route does not land on an integer.
class NumericalDriftError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a trace is requested for a model that is not minimal.
class NonMinimalCurveError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// -16(4 r^3 + 27 s^2), exact; std::overflow_error beyond 128 bits.
i128 discriminant(i64 r, i64 s);

struct Curve {
    i64 r = 0;
    i64 s = 0;
    i128 delta = 0;

    Curve() = default;
    Curve(i64 r_, i64 s_) : r(r_), s(s_), delta(discriminant(r_, s_)) {}

    bool singular() const { return delta == 0; }
    friend bool operator==(const Curve& a, const Curve& b) { return a.r == b.r && a.s == b.s; }
};

std::string to_string(i128 v);

/// False iff some prime p has p^4 | r and p^6 | s; (0, 0) is never minimal.
bool is_minimal(i64 r, i64 s);
inline bool is_minimal(const Curve& c) { return is_minimal(c.r, c.s); }

/// sigma_p = -sum_x ((x^3 + r x + s) / p), p >= 5 prime.
int sigma_p(i64 r, i64 s, i64 p);

/// The same quantity through -tau_p^{-1} sum_{t,x} (t/p) e_p(t(x^3 + r x + s)),
/// evaluated in complex arithmetic and rounded. Throws NumericalDriftError if
/// the imaginary part or the rounding residual reaches 1e-6.
int sigma_p_charsum(i64 r, i64 s, i64 p);

/// Per-prime evaluator backed by a quadratic-residue table. Immutable after
/// construction and safe to share across threads.
class SigmaEvaluator {
public:
    explicit SigmaEvaluator(i64 p);

    i64 prime() const { return chi_.prime(); }
    /// sigma_p for coefficients already reduced to [0, p).
    int reduced(i64 r_mod_p, i64 s_mod_p) const;
    int operator()(i64 r, i64 s) const { return reduced(mod(r, prime()), mod(s, prime())); }

private:
    QuadraticCharacter chi_;
};

struct TraceData {
    i64 p = 0;
    int ap = 0;
    bool bad = false;  // p divides the discriminant of the minimal model
};

/// a_p(E) = sigma_p(E) for a minimal nonsingular model and p >= 5.
TraceData ap(const Curve& curve, i64 p);
TraceData ap(const Curve& curve, const SigmaEvaluator& sigma);

/// c_p for k = 1, c_{p^2} for k = 2.
double c_pk(const TraceData& trace, int k);

/// Upper bound for the conductor: 2^8 * 3^(5 if 3 | delta) * prod p^f_p over
/// primes p >= 5 dividing delta, f_p = 1 if p does not divide r, else 2.
/// Factors delta by trial division.
i128 conductor_surrogate(const Curve& curve);

/// Same bound when the primes >= 5 that can divide delta are known in
/// advance. Throws std::invalid_argument if delta has a prime factor >= 5
/// outside `prime_support`.
i128 conductor_surrogate(const Curve& curve, std::span<const i64> prime_support);

double log_conductor_surrogate(const Curve& curve);

/// Maximal d with d^4 | r and d^6 | s, and the quotient model.
struct StarMap {
    Curve minimal;
    i64 d = 1;
};
StarMap star_map(i64 r, i64 s);

}  // namespace avgrank
