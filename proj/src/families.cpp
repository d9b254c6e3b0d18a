#include "avgrank/families.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "avgrank/apcache.hpp"
#include "avgrank/parallel.hpp"

namespace avgrank {

i64 root_floor(double T, int k) {
    if (T < 0) throw std::invalid_argument("root_floor: negative scale");
    auto n = static_cast<i64>(std::floor(std::pow(static_cast<long double>(T), 1.0L / k)));
    auto pw = [k](i64 v) {
        long double acc = 1;
        for (int i = 0; i < k; ++i) acc *= static_cast<long double>(v);
        return acc;
    };
    while (n > 0 && pw(n) > static_cast<long double>(T)) --n;
    while (pw(n + 1) <= static_cast<long double>(T)) ++n;
    return n;
}

bool admits(FamilyFilter filter, i64 r, i64 s) {
    switch (filter) {
    case FamilyFilter::all: return true;
    case FamilyFilter::nonsingular: return discriminant(r, s) != 0;
    case FamilyFilter::minimal_nonsingular: return discriminant(r, s) != 0 && is_minimal(r, s);
    }
    return false;
}

CurveRange enumerate_D(double T) {
    if (T < 1) throw std::invalid_argument("enumerate_D: T must be >= 1");
    return {CoefficientBox::for_scale(T), FamilyFilter::nonsingular};
}

CurveRange enumerate_C(double T) {
    if (T < 1) throw std::invalid_argument("enumerate_C: T must be >= 1");
    return {CoefficientBox::for_scale(T), FamilyFilter::minimal_nonsingular};
}

std::size_t count(const CurveRange& range) {
    std::size_t n = 0;
    for (auto it = range.begin(); it != range.end(); ++it) ++n;
    return n;
}

FamilyFilter FamilyParams::filter() const {
    if (!exclude_singular) return FamilyFilter::all;
    return minimal_only ? FamilyFilter::minimal_nonsingular : FamilyFilter::nonsingular;
}

double weight_wT(i64 r, i64 s, const FamilyParams& params) {
    const double wr = params.weight_r(static_cast<double>(r) / std::cbrt(params.T));
    if (wr == 0.0) return 0.0;
    return wr * params.weight_s(static_cast<double>(s) / std::sqrt(params.T));
}

namespace {

double weighted_sum(const FamilyParams& params, FamilyFilter filter, unsigned threads) {
    const auto box = CoefficientBox::for_scale(params.T);
    return chunked_reduce<CompensatedSum>(box.size(), threads,
                                          [&](std::size_t i, CompensatedSum& acc) {
                                              const auto [r, s] = box.at(i);
                                              const double w = weight_wT(r, s, params);
                                              if (w != 0.0 && admits(filter, r, s)) acc.add(w);
                                          })
        .value();
}

}  // namespace

double weighted_count(const FamilyParams& params, unsigned threads) {
    return weighted_sum(params, params.filter(), threads);
}

double S_T(const FamilyParams& params, unsigned threads) {
    return weighted_sum(params, FamilyFilter::minimal_nonsingular, threads);
}

double U1(const Curve& curve, double X, const PrimeTable& primes) {
    double total = 0.0;
    for (const i64 p : primes.range(4.0, X)) {
        const double lp = std::log(static_cast<double>(p));
        total -= lp / static_cast<double>(p) * h_X(lp, X) * ap(curve, p).ap;
    }
    return total;
}

double U2(const Curve& curve, double X, const PrimeTable& primes) {
    double total = 0.0;
    for (const i64 p : primes.range(4.0, std::sqrt(X))) {
        if (static_cast<double>(p) * static_cast<double>(p) > X) break;
        const double lp2 = 2.0 * std::log(static_cast<double>(p));
        total += c_pk(ap(curve, p), 2) * lp2 * h_X(lp2, X);
    }
    return total;
}

ExplicitFormula::ExplicitFormula(double X, const ApCache* cache) : X_(X), log_X_(std::log(X)), cache_(cache) {
    if (X < 2) throw std::invalid_argument("ExplicitFormula: X must be >= 2");
    const auto table = sieve_primes(static_cast<i64>(std::floor(X)));
    for (const i64 p : table.range(4.0, X)) {
        const double lp = std::log(static_cast<double>(p));
        primes_.push_back(p);
        weight1_.push_back(lp / static_cast<double>(p) * h_X(lp, X));
        if (static_cast<double>(p) * static_cast<double>(p) <= X) weight2_.push_back(2.0 * lp * h_X(2.0 * lp, X));
        sigma_.emplace_back(p);
    }
    if (cache_ != nullptr) {
        // usable only if its prime run starts with every prime in [5, X]
        const auto cp = cache_->primes();
        if (cp.size() < primes_.size() || !std::equal(primes_.begin(), primes_.end(), cp.begin())) cache_ = nullptr;
    }
}

ExplicitFormula::Terms ExplicitFormula::evaluate(std::span<const int> traces, const Curve& curve) const {
    CompensatedSum u1, u2;
    for (std::size_t i = 0; i < primes_.size(); ++i) {
        const int a = traces[i];
        u1.add(-weight1_[i] * a);
        if (i < weight2_.size()) {
            const TraceData t{primes_[i], a, curve.delta % primes_[i] == 0};
            u2.add(c_pk(t, 2) * weight2_[i]);
        }
    }
    return {u1.value(), u2.value()};
}

ExplicitFormula::Terms ExplicitFormula::evaluate(const Curve& curve) const {
    if (curve.singular()) throw std::invalid_argument("ExplicitFormula: singular curve");
    if (!is_minimal(curve)) throw NonMinimalCurveError("ExplicitFormula: model is not minimal");
    if (cache_ != nullptr)
        if (auto hit = cache_->lookup(curve.r, curve.s)) return evaluate(hit->first(primes_.size()), curve);
    std::vector<int> traces(primes_.size());
    for (std::size_t i = 0; i < primes_.size(); ++i) traces[i] = sigma_[i](curve.r, curve.s);
    return evaluate(traces, curve);
}

double rank_bound(const Curve& curve, double X, double C0, const PrimeTable& primes) {
    if (X < 25) throw std::invalid_argument("rank_bound: X must be >= 25");
    const double L = std::log(X);
    return log_conductor_surrogate(curve) / L + 2.0 / L * (U1(curve, X, primes) + U2(curve, X, primes)) + C0 / L;
}

RankBoundRecord rank_bound_record(const Curve& curve, double weight, const ExplicitFormula& formula, double C0) {
    const auto terms = formula.evaluate(curve);
    const double L = formula.log_X();
    RankBoundRecord rec;
    rec.r = curve.r;
    rec.s = curve.s;
    rec.weight = weight;
    rec.logN_term = log_conductor_surrogate(curve) / L;
    rec.U1_term = 2.0 * terms.U1 / L;
    rec.U2_term = 2.0 * terms.U2 / L;
    rec.bound = rec.logN_term + rec.U1_term + rec.U2_term + C0 / L;
    return rec;
}

double default_X(double T) { return std::pow(T, 2.0 / 3.0 - 0.05); }

namespace {

struct WeightedTotals {
    CompensatedSum weight, logN, u1, u2, bound, weight_D;
    std::size_t curves = 0;
    void add(const WeightedTotals& o) {
        weight.add(o.weight);
        logN.add(o.logN);
        u1.add(o.u1);
        u2.add(o.u2);
        bound.add(o.bound);
        weight_D.add(o.weight_D);
        curves += o.curves;
    }
};

}  // namespace

RankBoundSummary average_rank_experiment(const FamilyParams& params, double X, double C0, unsigned threads,
                                         const RecordSink& sink, const ApCache* cache) {
    if (params.T < 1) throw std::invalid_argument("average_rank_experiment: T must be >= 1");
    if (X < 25) throw std::invalid_argument("average_rank_experiment: X must be >= 25");
    if (X > std::pow(params.T, 5.0 / 6.0) * (1 + 1e-12))
        throw std::invalid_argument("average_rank_experiment: X exceeds T^(5/6)");
    if (C0 < 0) throw std::invalid_argument("average_rank_experiment: C0 must be >= 0");

    const ExplicitFormula formula(X, cache);
    const auto box = CoefficientBox::for_scale(params.T);
    const std::size_t chunks = chunk_count(box.size());

    // chunks are processed in waves so memory stays bounded; records leave in box order
    constexpr std::size_t kWave = 64;
    WeightedTotals totals;
    std::vector<WeightedTotals> partial;
    std::vector<std::vector<RankBoundRecord>> rows;
    for (std::size_t first = 0; first < chunks; first += kWave) {
        const std::size_t n = std::min(kWave, chunks - first);
        partial.assign(n, WeightedTotals{});
        rows.assign(n, {});
        parallel_chunks(n, threads, [&](std::size_t j) {
            const std::size_t lo = (first + j) * kChunkSize;
            const std::size_t hi = std::min(box.size(), lo + kChunkSize);
            auto& acc = partial[j];
            for (std::size_t i = lo; i < hi; ++i) {
                const auto [r, s] = box.at(i);
                const double w = weight_wT(r, s, params);
                if (w == 0.0) continue;
                const Curve c(r, s);
                if (c.singular()) continue;
                acc.weight_D.add(w);
                if (!is_minimal(c)) continue;
                const auto rec = rank_bound_record(c, w, formula, C0);
                acc.weight.add(w);
                acc.logN.add(w * rec.logN_term);
                acc.u1.add(w * rec.U1_term);
                acc.u2.add(w * rec.U2_term);
                acc.bound.add(w * rec.bound);
                ++acc.curves;
                if (sink) rows[j].push_back(rec);
            }
        });
        for (std::size_t j = 0; j < n; ++j) {
            totals.add(partial[j]);
            if (sink)
                for (const auto& rec : rows[j]) sink(rec);
        }
    }

    if (totals.curves == 0) throw EmptyFamilyError("empty family: no minimal curve carries weight at T = " +
                                                   std::to_string(params.T));
    RankBoundSummary out;
    out.T = params.T;
    out.X = X;
    out.C0 = C0;
    out.S_T = totals.weight.value();
    out.S_D = totals.weight_D.value();
    out.curves = totals.curves;
    out.avg_logN_term = totals.logN.value() / out.S_T;
    out.avg_U1_term = totals.u1.value() / out.S_T;
    out.avg_U2_term = totals.u2.value() / out.S_T;
    out.avg_bound = totals.bound.value() / out.S_T;
    // U_term = 2U / log X, so avg(U) / log X = avg(U_term) / 2
    out.avg_U1_over_logX = out.avg_U1_term / 2.0;
    out.avg_U2_over_logX = out.avg_U2_term / 2.0;
    return out;
}

double lemma2_lhs(const FamilyParams& params, double P, const PrimeTable& primes) {
    if (P < 5) throw std::invalid_argument("lemma2_lhs: P must be >= 5");
    const auto box = CoefficientBox::for_scale(params.T);
    const double tr = std::cbrt(params.T), ts = std::sqrt(params.T);
    CompensatedSum total;
    for (const i64 p : primes.range(P, 2 * P)) {
        // the weight factorises, so sum it into residue classes first
        std::vector<double> A(static_cast<std::size_t>(p), 0.0), B(static_cast<std::size_t>(p), 0.0);
        for (i64 r = -box.r_bound(); r <= box.r_bound(); ++r)
            A[static_cast<std::size_t>(mod(r, p))] += params.weight_r(static_cast<double>(r) / tr);
        for (i64 s = -box.s_bound(); s <= box.s_bound(); ++s)
            B[static_cast<std::size_t>(mod(s, p))] += params.weight_s(static_cast<double>(s) / ts);
        const SigmaEvaluator sigma(p);
        CompensatedSum inner;
        for (i64 a = 0; a < p; ++a) {
            if (A[static_cast<std::size_t>(a)] == 0.0) continue;
            for (i64 b = 0; b < p; ++b) {
                if (B[static_cast<std::size_t>(b)] == 0.0) continue;
                inner.add(A[static_cast<std::size_t>(a)] * B[static_cast<std::size_t>(b)] * sigma.reduced(a, b));
            }
        }
        total.add(std::abs(inner.value()));
    }
    return total.value();
}

StarPartition star_map_partition(const FamilyParams& params, i64 p) {
    const SigmaEvaluator sigma(p);
    StarPartition out;

    CompensatedSum lhs;
    for (const Curve c : CurveRange(CoefficientBox::for_scale(params.T), FamilyFilter::nonsingular)) {
        const double w = weight_wT(c, params);
        if (w == 0.0) continue;
        lhs.add(w * sigma(c.r, c.s));
        if (star_map(c.r, c.s).d > 1) ++out.scaled_curves;
    }
    out.lhs = lhs.value();

    // E = E_{d^4 rho, d^6 sigma} with E_{rho,sigma} minimal; the weight at T
    // equals the weight of the minimal curve at T / d^12
    CompensatedSum main, theta;
    for (i64 d = 1; std::pow(static_cast<double>(d), 12.0) <= params.T; ++d) {
        const double Td = params.T / std::pow(static_cast<double>(d), 12.0);
        for (const Curve c : enumerate_C(Td)) {
            const double w = weight_wT(c, FamilyParams{Td, params.weight_r, params.weight_s, true, true});
            if (w == 0.0) continue;
            const double term = w * sigma(c.r, c.s);
            main.add(term);
            if (d % p == 0) theta.add(-term);
        }
    }
    out.main = main.value();
    out.theta = theta.value();
    return out;
}

}  // namespace avgrank
