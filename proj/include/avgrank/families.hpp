#pragma once

// Curve families in the box |r| <= T^(1/3), |s| <= T^(1/2), the smooth
// weighting w_T, and the explicit-formula rank bound averaged over them.

#include <cstddef>
#include <functional>
#include <iterator>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "avgrank/arith.hpp"
#include "avgrank/curves.hpp"
#include "avgrank/weights.hpp"

namespace avgrank {

class ApCache;

/// Largest n >= 0 with n^k <= T.
i64 root_floor(double T, int k);

/// Which points of the coefficient box belong to a family.
enum class FamilyFilter {
    all,                  // every (r, s), singular ones included
    nonsingular,          // delta != 0
    minimal_nonsingular,  // delta != 0 and no p with p^4 | r, p^6 | s
};

bool admits(FamilyFilter filter, i64 r, i64 s);

/// The grid |r| <= R, |s| <= S in row-major order (r outer, s inner).
class CoefficientBox {
public:
    CoefficientBox(i64 R, i64 S) : R_(R), S_(S) {}
    static CoefficientBox for_scale(double T) { return {root_floor(T, 3), root_floor(T, 2)}; }

    i64 r_bound() const { return R_; }
    i64 s_bound() const { return S_; }
    std::size_t size() const { return static_cast<std::size_t>((2 * R_ + 1) * (2 * S_ + 1)); }
    std::pair<i64, i64> at(std::size_t i) const {
        const auto width = static_cast<std::size_t>(2 * S_ + 1);
        return {static_cast<i64>(i / width) - R_, static_cast<i64>(i % width) - S_};
    }

private:
    i64 R_, S_;
};

/// Lazy view of the curves of a box that pass a filter. Nothing is stored.
class CurveRange {
public:
    class iterator {
    public:
        using iterator_category = std::input_iterator_tag;
        using value_type = Curve;
        using difference_type = std::ptrdiff_t;

        iterator() = default;
        iterator(const CurveRange* owner, std::size_t i) : owner_(owner), i_(i) { settle(); }
        Curve operator*() const {
            const auto [r, s] = owner_->box_.at(i_);
            return Curve(r, s);
        }
        iterator& operator++() {
            ++i_;
            settle();
            return *this;
        }
        void operator++(int) { ++*this; }
        bool operator==(const iterator& o) const { return i_ == o.i_; }

    private:
        void settle() {
            while (i_ < owner_->box_.size()) {
                const auto [r, s] = owner_->box_.at(i_);
                if (admits(owner_->filter_, r, s)) break;
                ++i_;
            }
        }
        const CurveRange* owner_ = nullptr;
        std::size_t i_ = 0;
    };

    CurveRange(CoefficientBox box, FamilyFilter filter) : box_(box), filter_(filter) {}
    iterator begin() const { return {this, 0}; }
    iterator end() const { return {this, box_.size()}; }
    const CoefficientBox& box() const { return box_; }
    FamilyFilter filter() const { return filter_; }

private:
    CoefficientBox box_;
    FamilyFilter filter_;
};

/// Nonsingular curves of the box for T.
CurveRange enumerate_D(double T);
/// Minimal nonsingular curves of the box for T.
CurveRange enumerate_C(double T);
std::size_t count(const CurveRange& range);

struct FamilyParams {
    double T = 1e4;
    SmoothWeight weight_r = even_bump();
    SmoothWeight weight_s = even_bump();
    bool minimal_only = true;
    bool exclude_singular = true;

    FamilyFilter filter() const;
};

/// w_r(r / T^(1/3)) * w_s(s / T^(1/2)).
double weight_wT(i64 r, i64 s, const FamilyParams& params);
inline double weight_wT(const Curve& c, const FamilyParams& params) { return weight_wT(c.r, c.s, params); }

/// Sum of w_T over the family selected by params' flags.
double weighted_count(const FamilyParams& params, unsigned threads = 1);
/// Sum of w_T over minimal nonsingular curves, whatever the flags say.
double S_T(const FamilyParams& params, unsigned threads = 1);

/// -sum_{5 <= p <= X} (log p / p) h_X(log p) a_p.
double U1(const Curve& curve, double X, const PrimeTable& primes);
/// sum_{p^2 <= X, p >= 5} c_{p^2} (2 log p) h_X(2 log p).
double U2(const Curve& curve, double X, const PrimeTable& primes);

/// Batch evaluator for U1 and U2 at a fixed X. Holds one residue table per
/// prime; const member functions may run concurrently.
class ExplicitFormula {
public:
    ExplicitFormula(double X, const ApCache* cache = nullptr);

    double X() const { return X_; }
    double log_X() const { return log_X_; }

    struct Terms {
        double U1 = 0.0;
        double U2 = 0.0;
    };
    Terms evaluate(const Curve& curve) const;

    /// Same sums with a caller-supplied trace table aligned with primes().
    Terms evaluate(std::span<const int> traces, const Curve& curve) const;

    std::span<const i64> primes() const { return primes_; }
    const SigmaEvaluator& evaluator(std::size_t i) const { return sigma_[i]; }

private:
    double X_;
    double log_X_;
    std::vector<i64> primes_;          // 5 <= p <= X
    std::vector<double> weight1_;      // (log p / p) h_X(log p)
    std::vector<double> weight2_;      // 2 log p h_X(2 log p), p^2 <= X
    std::vector<SigmaEvaluator> sigma_;
    const ApCache* cache_;
};

/// log N / log X + (2 / log X)(U1 + U2) + C0 / log X.
double rank_bound(const Curve& curve, double X, double C0, const PrimeTable& primes);

struct RankBoundRecord {
    i64 r = 0;
    i64 s = 0;
    double weight = 0.0;
    double logN_term = 0.0;
    double U1_term = 0.0;  // 2 U1 / log X
    double U2_term = 0.0;  // 2 U2 / log X
    double bound = 0.0;
};

RankBoundRecord rank_bound_record(const Curve& curve, double weight, const ExplicitFormula& formula, double C0);

struct RankBoundSummary {
    double T = 0.0;
    double X = 0.0;
    double C0 = 0.0;
    double S_T = 0.0;        // sum of weights over minimal nonsingular curves
    double S_D = 0.0;        // sum of weights over all nonsingular curves
    std::size_t curves = 0;  // curves with nonzero weight
    double avg_logN_term = 0.0;
    double avg_U1_term = 0.0;
    double avg_U2_term = 0.0;
    double avg_bound = 0.0;
    double avg_U1_over_logX = 0.0;
    double avg_U2_over_logX = 0.0;
};

class EmptyFamilyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using RecordSink = std::function<void(const RankBoundRecord&)>;

/// Weighted averages of the rank-bound terms over minimal nonsingular curves.
/// Records are handed to `sink` in row-major order. Throws
/// std::invalid_argument if X > T^(5/6) or X < 25 and EmptyFamilyError if no
/// curve carries weight.
RankBoundSummary average_rank_experiment(const FamilyParams& params, double X, double C0, unsigned threads = 1,
                                         const RecordSink& sink = {}, const ApCache* cache = nullptr);

/// X = T^(2/3 - 0.05).
double default_X(double T);

/// sum_{P < p <= 2P} |sum_{(r,s) in box} w_T(r, s) sigma_p(r, s)| over the
/// unfiltered box, singular points included.
double lemma2_lhs(const FamilyParams& params, double P, const PrimeTable& primes);

/// Both sides of the decomposition of a weighted sigma_p sum over nonsingular
/// curves by the scaling d of their minimal model.
struct StarPartition {
    double lhs = 0.0;    // sum over nonsingular (r, s) of w_T sigma_p
    double main = 0.0;   // sum over d, minimal curves, weight at T / d^12, sigma_p of the minimal curve
    double theta = 0.0;  // correction from d divisible by p
    std::size_t scaled_curves = 0;  // nonsingular curves with d > 1 and nonzero weight
};
StarPartition star_map_partition(const FamilyParams& params, i64 p);

}  // namespace avgrank
