#include "avgrank/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "avgrank/families.hpp"
#include "avgrank/parallel.hpp"
#include "avgrank/weights.hpp"

namespace avgrank {

namespace {

constexpr double kVPrimeFloor = 100.0;

double ipow(double x, int n) {
    double out = 1.0;
    for (int i = 0; i < n; ++i) out *= x;
    return out;
}

}  // namespace

double V(const Curve& curve, double X, const PrimeTable& primes) {
    double total = 0.0;
    for (const i64 p : primes.range(kVPrimeFloor, X)) {
        const double lp = std::log(static_cast<double>(p));
        total += lp / static_cast<double>(p) * h_X(lp, X) * sigma_p(curve.r, curve.s, p);
    }
    return total;
}

VEvaluator::VEvaluator(double X) : X_(X) {
    if (X <= kVPrimeFloor) return;
    const auto table = sieve_primes(static_cast<i64>(std::floor(X)));
    for (const i64 p : table.range(kVPrimeFloor, X)) {
        const double lp = std::log(static_cast<double>(p));
        weight_.push_back(lp / static_cast<double>(p) * h_X(lp, X));
        sigma_.emplace_back(p);
    }
}

double VEvaluator::operator()(i64 r, i64 s) const {
    CompensatedSum acc;
    for (std::size_t i = 0; i < sigma_.size(); ++i) acc.add(weight_[i] * sigma_[i](r, s));
    return acc.value();
}

namespace {

struct MomentAcc {
    std::vector<DoubleDouble> sums;
    void add(const MomentAcc& o) {
        if (sums.size() < o.sums.size()) sums.resize(o.sums.size());
        for (std::size_t i = 0; i < o.sums.size(); ++i) sums[i].add(o.sums[i]);
    }
};

struct CountAcc {
    std::size_t n = 0;
    void add(const CountAcc& o) { n += o.n; }
};

void check_k(int k, double X) {
    if (k < 1) throw std::invalid_argument("moment: k must be >= 1");
    if (X > 1 && k > std::log(X)) throw std::invalid_argument("moment: k = " + std::to_string(k) + " exceeds log X");
}

}  // namespace

std::vector<double> moments_2k(double T, double X, std::span<const int> ks, unsigned threads) {
    for (const int k : ks) check_k(k, X);
    const VEvaluator v(X);
    const auto box = CoefficientBox::for_scale(T);
    const auto acc = chunked_reduce<MomentAcc>(box.size(), threads, [&](std::size_t i, MomentAcc& a) {
        const auto [r, s] = box.at(i);
        if (!admits(FamilyFilter::nonsingular, r, s)) return;
        if (a.sums.empty()) a.sums.resize(ks.size());
        const double value = v(r, s);
        for (std::size_t j = 0; j < ks.size(); ++j) a.sums[j].add(ipow(value, 2 * ks[j]));
    });
    std::vector<double> out(ks.size(), 0.0);
    for (std::size_t j = 0; j < acc.sums.size(); ++j) out[j] = acc.sums[j].value();
    return out;
}

double moment_2k(double T, double X, int k, unsigned threads) {
    const int ks[] = {k};
    return moments_2k(T, X, ks, threads).front();
}

std::size_t count_V_at_least(double T, double X, double lambda, unsigned threads) {
    const VEvaluator v(X);
    const auto box = CoefficientBox::for_scale(T);
    return chunked_reduce<CountAcc>(box.size(), threads,
                                    [&](std::size_t i, CountAcc& a) {
                                        const auto [r, s] = box.at(i);
                                        if (admits(FamilyFilter::nonsingular, r, s) && std::abs(v(r, s)) >= lambda)
                                            ++a.n;
                                    })
        .n;
}

double density_threshold(double T, double X) { return 3.0 + 2.0 * std::log(T) / std::log(X); }

double density_bound(double moment, double T, double X, int k, double R, std::size_t minimal_count) {
    const double threshold = density_threshold(T, X);
    if (R < threshold)
        throw std::invalid_argument("density_bound: R = " + std::to_string(R) + " is below the threshold " +
                                    std::to_string(threshold));
    if (minimal_count == 0) throw std::invalid_argument("density_bound: no minimal curves");
    return moment / (ipow(0.5 * std::log(T), 2 * k) * static_cast<double>(minimal_count));
}

double density_bound(double T, double X, int k, double R, unsigned threads) {
    const double threshold = density_threshold(T, X);
    if (R < threshold)
        throw std::invalid_argument("density_bound: R = " + std::to_string(R) + " is below the threshold " +
                                    std::to_string(threshold));
    return density_bound(moment_2k(T, X, k, threads), T, X, k, R, count(enumerate_C(T)));
}

double type1_S(double X) {
    if (X <= kVPrimeFloor) return 0.0;
    const auto table = sieve_primes(static_cast<i64>(std::floor(X)));
    CompensatedSum acc;
    for (const i64 p : table.range(kVPrimeFloor, X)) {
        const double lp = std::log(static_cast<double>(p));
        const double t = 2.0 * h_X(lp, X) * lp;
        acc.add(t * t / static_cast<double>(p));
    }
    return acc.value();
}

namespace {

u128 gcd128(u128 a, u128 b) {
    while (b != 0) {
        const u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

}  // namespace

u128 multinomial_C(std::span<const int> e) {
    long total = 0;
    for (const int x : e) {
        if (x < 0) throw std::invalid_argument("multinomial_C: negative exponent");
        total += x;
    }
    if (total == 0 || total % 2 != 0) throw std::invalid_argument("multinomial_C: exponents must sum to 2k, k >= 1");
    // product of binomials C(e_1 + ... + e_i, e_i), each built exactly
    u128 result = 1;
    long running = 0;
    for (const int x : e) {
        u128 binom = 1;
        for (int j = 1; j <= x; ++j) {
            const auto top = static_cast<u128>(running + j);
            const u128 g = gcd128(binom, static_cast<u128>(j));
            binom /= g;
            const u128 top_reduced = top / (static_cast<u128>(j) / g);
            if (top_reduced != 0 && binom > ~u128{0} / top_reduced) throw std::overflow_error("multinomial_C overflow");
            binom *= top_reduced;
        }
        running += x;
        if (binom != 0 && result > ~u128{0} / binom) throw std::overflow_error("multinomial_C overflow");
        result *= binom;
    }
    return result;
}

TermType classify_type(std::span<const int> e) {
    return std::any_of(e.begin(), e.end(), [](int x) { return x == 1; }) ? TermType::type_II : TermType::type_I;
}

double reference_decay(double R) { return std::pow(1.5 * R, -R / 12.0); }

int optimal_k(int R) { return std::max(1, (R - 3) / 12); }

double census_cutoff(double T) { return 11.0 * std::log(T) / std::log(std::log(T)); }

namespace {

struct CensusAcc {
    std::vector<std::size_t> at_least;  // index R
    std::size_t minimal = 0;
    std::size_t nonsingular = 0;
    void add(const CensusAcc& o) {
        if (at_least.size() < o.at_least.size()) at_least.resize(o.at_least.size(), 0);
        for (std::size_t i = 0; i < o.at_least.size(); ++i) at_least[i] += o.at_least[i];
        minimal += o.minimal;
        nonsingular += o.nonsingular;
    }
};

}  // namespace

MomentReport high_rank_census(double T, double X, double C0, int R_max, unsigned threads) {
    if (R_max < 0) throw std::invalid_argument("high_rank_census: R_max must be >= 0");
    if (X < 25) throw std::invalid_argument("high_rank_census: X must be >= 25");
    if (T < 3) throw std::invalid_argument("high_rank_census: T must be >= 3");

    MomentReport report;
    report.T = T;
    report.X = X;
    report.C0 = C0;
    report.threshold = density_threshold(T, X);
    report.cutoff = census_cutoff(T);
    report.type1_S = type1_S(X);

    const ExplicitFormula formula(X);
    const auto box = CoefficientBox::for_scale(T);
    const auto rows = static_cast<std::size_t>(R_max) + 1;
    auto acc = chunked_reduce<CensusAcc>(box.size(), threads, [&](std::size_t i, CensusAcc& a) {
        const auto [r, s] = box.at(i);
        const Curve c(r, s);
        if (c.singular()) return;
        ++a.nonsingular;
        if (!is_minimal(c)) return;
        ++a.minimal;
        if (a.at_least.empty()) a.at_least.assign(rows, 0);
        const double bound = rank_bound_record(c, 1.0, formula, C0).bound;
        for (std::size_t R = 0; R < rows; ++R)
            if (bound >= static_cast<double>(R)) ++a.at_least[R];
    });
    acc.at_least.resize(rows, 0);
    report.count_D = acc.nonsingular;
    report.count_C = acc.minimal;

    // moments are only taken for k <= log X
    const int k_cap = std::max(1, static_cast<int>(std::floor(std::log(X))));
    auto k_for = [k_cap](int R) { return std::min(optimal_k(R), k_cap); };
    std::vector<int> ks;
    for (int R = 0; R <= R_max; ++R)
        if (R >= report.threshold && std::find(ks.begin(), ks.end(), k_for(R)) == ks.end()) ks.push_back(k_for(R));
    std::vector<double> moments;
    if (!ks.empty()) moments = moments_2k(T, X, ks, threads);

    for (int R = 0; R <= R_max; ++R) {
        CensusRow row;
        row.R = R;
        row.census = acc.at_least[static_cast<std::size_t>(R)];
        row.k = k_for(R);
        row.reference_decay = reference_decay(R);
        if (R >= report.threshold) {
            const auto j = static_cast<std::size_t>(std::find(ks.begin(), ks.end(), row.k) - ks.begin());
            row.markov_bound = density_bound(moments[j], T, X, row.k, R, report.count_C);
        }
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace avgrank
