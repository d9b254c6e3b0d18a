#pragma once

// Quadratic twists of a fixed base curve over fundamental discriminants:
// root numbers, the 2-adic class split of D, the small-prime square sieve,
// rank-bound averages over twists, and a numerical check of Poisson
// summation for the twisted characters that appear in the error terms.

#include <compare>
#include <complex>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "avgrank/arith.hpp"
#include "avgrank/curves.hpp"
#include "avgrank/weights.hpp"

namespace avgrank {

/// (r D^2, s D^3); the discriminant scales by D^6.
Curve twist_curve(const Curve& base, i64 D);

/// w sign(D) chi_D(N). Throws std::invalid_argument if gcd(D, N) > 1, if D is
/// not fundamental (or 1), or if w is not +-1.
int root_number(int w, i64 D, i64 N);

struct ClassTriple {
    int k = 1;      // odd part mod 8
    int delta = 1;  // sign of D
    int e = 0;      // 2-adic valuation, 0, 2 or 3
    auto operator<=>(const ClassTriple&) const = default;
};

std::string to_string(const ClassTriple& c);

struct ClassDecomposition {
    ClassTriple triple;
    i64 n_hat = 1;  // odd squarefree part
};

/// D = delta 2^e n_hat. Throws std::invalid_argument if D is not fundamental
/// or its 2-adic valuation is not 0, 2 or 3.
ClassDecomposition class_decompose(i64 D);

/// A base curve with its conductor and root number supplied from outside.
struct BaseCurve {
    std::string label;
    Curve curve;
    i64 N = 1;
    int w = 1;
};

/// y^2 + y = x^3 - x in short form: conductor 37, root number -1.
BaseCurve curve_37a();
/// y^2 + y = x^3 - x^2 - 10x - 20 in short form: conductor 11, root number +1.
BaseCurve curve_11a();

/// Plain-text rows "r s N w" (whitespace or comma separated, '#' starts a
/// comment). Each row is checked: nonsingular minimal model, N >= 1, w = +-1,
/// and every prime p >= 5 dividing N also divides the discriminant.
std::vector<BaseCurve> load_curve_data(const std::filesystem::path& path);

struct TwistFamily {
    BaseCurve base;
    SmoothWeight weight = twist_weight(1);
    int sign = 0;  // +1 or -1 selects w_D; 0 keeps both
    std::optional<ClassTriple> class_filter;

    /// +1 if the weight lives on (0, inf), -1 if on (-inf, 0).
    int delta() const;
};

struct TwistMember {
    i64 D = 0;
    double weight = 0.0;
    int root_number = 0;
    ClassDecomposition cls;
};

/// Fundamental D coprime to N with w(D/T) != 0, the requested root number and
/// class, in increasing order.
std::vector<TwistMember> enumerate_T_pm(const TwistFamily& family, double T);

/// Sum of w(D/T) over the members.
double weighted_total(const std::vector<TwistMember>& members);

/// Primes 2 < p <= log log T not dividing N.
std::vector<i64> sieve_prime_set(double T, i64 N);

/// sum over d | P with d^2 | n of mu(d), P the product of sieve_prime_set.
/// n must be odd and positive, T >= 16.
int sieve_indicator_X(i64 n, double T, i64 N);

/// a_p of the minimal model of E_D for 5 <= p <= limit. Uses
/// a_p(E_D) = (D/p) a_p(E) away from D and the scaling d, direct counting
/// elsewhere.
class TwistTraces {
public:
    TwistTraces(const BaseCurve& base, double limit);
    std::span<const i64> primes() const { return primes_; }
    std::span<const int> base_traces() const { return base_; }

    struct Twisted {
        Curve minimal;
        i64 d = 1;
        std::vector<int> traces;
    };
    Twisted twist(i64 D) const;

private:
    BaseCurve base_curve_;
    std::vector<i64> primes_;
    std::vector<int> base_;
};

/// Conductor surrogate of the minimal model of E_D; its discriminant only has
/// primes from D and the base discriminant.
i128 twist_conductor_surrogate(const BaseCurve& base, const Curve& minimal_twist, i64 D);

struct TwistRow {
    i64 D = 0;
    double weight = 0.0;
    int root_number = 0;
    ClassTriple cls;
    double logN_term = 0.0;      // log(surrogate) / log X
    double logND2_term = 0.0;    // log(N D^2) / log X
    double U1_term = 0.0;        // 2 U1 / log X
    double U2_term = 0.0;        // 2 U2 / log X
    double bound = 0.0;
    double U2 = 0.0;
};

struct TwistReport {
    double T = 0.0, X = 0.0, C0 = 0.0;
    int sign = 0;
    bool empty = true;
    std::size_t members = 0;
    double total_weight = 0.0;
    double avg_logN_term = 0.0;
    double avg_logND2_term = 0.0;
    double avg_U1_term = 0.0;
    double avg_U2_term = 0.0;
    double avg_bound = 0.0;
    double avg_U1_over_logX = 0.0;
    double avg_U2_over_logX = 0.0;
    double max_U2_deviation = 0.0;  // max |U2 - log X / 4| / log log |D|
    std::vector<TwistRow> rows;
};

/// Rank-bound terms for every member of the family, and their w-weighted
/// averages. Throws std::invalid_argument unless 25 <= X <= T^2.
TwistReport twist_average_experiment(const TwistFamily& family, double T, double X, double C0, unsigned threads = 1);

/// sum_{5 <= p <= x} (a_p / p) chi_D(p) log p over the base curve.
double twisted_pnt_sum(const BaseCurve& base, i64 D, double x);

struct PntGrowth {
    double max_ratio = 0.0;  // max over primes x of |sum| / log x
    double at = 0.0;
    double final_sum = 0.0;
};
PntGrowth twisted_pnt_growth(const BaseCurve& base, i64 D, double x_max);

class IdentityViolated : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PoissonCheck {
    std::complex<double> direct;
    std::complex<double> dual;
    double residual = 0.0;
    std::complex<double> gauss;
    i64 q = 0;
    i64 terms = 0;  // dual-side m values used
};

/// psi_p(n) = psi(n) (n/p) with psi = 1 (b = 1), chi_-4 (b = 4) or chi_8 (b = 8).
int psi_p(i64 n, i64 b, i64 p);

/// Compares sum_n W(n/T) psi_p(n) with (T G / q) sum_{m != 0} W^(Tm/q) psi_p(m),
/// q = b p. The dual sum stops after 8 consecutive m with |W^| < 1e-14.
/// Throws IdentityViolated if the two sides differ by 1e-6 or more.
PoissonCheck poisson_twist_check(const SmoothWeight& W, i64 b, i64 p, double T, QuadratureOptions opts = {1e-13});

/// (1 - avg_plus / 2, 1 - (avg_minus - 1) / 2), both clamped to [0, 1].
std::pair<double, double> theorem4_proportions(double avg_plus, double avg_minus);

struct ClassSigns {
    std::size_t plus = 0, minus = 0;                  // w_D
    std::size_t twisted_plus = 0, twisted_minus = 0;  // w_D (N / n_hat)
    bool constant() const { return plus == 0 || minus == 0; }
    bool twisted_constant() const { return twisted_plus == 0 || twisted_minus == 0; }
};

/// Root numbers by class over fundamental D with |D| <= D_max, gcd(D, N) = 1.
std::map<ClassTriple, ClassSigns> class_sign_table(const BaseCurve& base, i64 D_max);

}  // namespace avgrank
