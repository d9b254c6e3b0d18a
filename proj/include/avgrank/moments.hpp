#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "avgrank/arith.hpp"
#include "avgrank/curves.hpp"

namespace avgrank {

/// sum_{100 < p <= X} (log p / p) h_X(log p) sigma_p(E). Uses sigma_p, so
/// minimality is not required.
double V(const Curve& curve, double X, const PrimeTable& primes);

/// Batch form of V with one residue table per prime.
class VEvaluator {
public:
    explicit VEvaluator(double X);
    double operator()(i64 r, i64 s) const;
    double X() const { return X_; }

private:
    double X_;
    std::vector<double> weight_;
    std::vector<SigmaEvaluator> sigma_;
};

/// sum over nonsingular curves of the box for T of V^{2k}, accumulated in
/// double-double.
double moment_2k(double T, double X, int k, unsigned threads = 1);

/// The same sum for several exponents in one pass.
std::vector<double> moments_2k(double T, double X, std::span<const int> ks, unsigned threads = 1);

/// Number of nonsingular curves of the box with |V| >= lambda.
std::size_t count_V_at_least(double T, double X, double lambda, unsigned threads = 1);

/// Smallest admissible R for the given T and X: 3 + 2 log T / log X.
double density_threshold(double T, double X);

/// moment / ((log T / 2)^{2k} #C(T)); throws std::invalid_argument when R is
/// below density_threshold(T, X).
double density_bound(double T, double X, int k, double R, unsigned threads = 1);
/// Same, with the moment and the minimal-curve count already known.
double density_bound(double moment, double T, double X, int k, double R, std::size_t minimal_count);

/// sum_{100 < p <= X} (2 h_X(log p) log p)^2 / p.
double type1_S(double X);

/// (sum e)! / prod e_i!, exact. Throws std::invalid_argument for an odd total
/// and std::overflow_error past 128 bits.
u128 multinomial_C(std::span<const int> e);

enum class TermType { type_I, type_II };
/// Type I iff no exponent equals 1.
TermType classify_type(std::span<const int> e);

/// (3R/2)^{-R/12}.
double reference_decay(double R);

/// max(1, floor((R - 3) / 12)).
int optimal_k(int R);

/// 11 log T / log log T.
double census_cutoff(double T);

struct CensusRow {
    int R = 0;
    std::size_t census = 0;             // minimal curves with rank bound >= R
    std::optional<double> markov_bound; // only where R meets the threshold
    int k = 0;
    double reference_decay = 0.0;
};

struct MomentReport {
    double T = 0.0;
    double X = 0.0;
    double C0 = 0.0;
    std::size_t count_D = 0;  // nonsingular curves
    std::size_t count_C = 0;  // minimal nonsingular curves
    double threshold = 0.0;
    double cutoff = 0.0;
    double type1_S = 0.0;
    std::vector<CensusRow> rows;
};

/// Rows R = 0..R_max of the rank-bound census over minimal curves, the
/// moment bound at k = min(optimal_k(R), floor(log X)) with the given X, and
/// the reference decay.
MomentReport high_rank_census(double T, double X, double C0, int R_max, unsigned threads = 1);

}  // namespace avgrank
