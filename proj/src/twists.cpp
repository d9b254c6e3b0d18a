#include "avgrank/twists.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "avgrank/parallel.hpp"

namespace avgrank {

Curve twist_curve(const Curve& base, i64 D) {
    if (D == 0) throw std::invalid_argument("twist_curve: D must be nonzero");
    const i128 r = checked_mul(base.r, checked_mul(D, D));
    const i128 s = checked_mul(base.s, checked_mul(checked_mul(D, D), D));
    if (r > INT64_MAX || r < INT64_MIN || s > INT64_MAX || s < INT64_MIN)
        throw std::overflow_error("twist_curve: coefficients exceed 64 bits");
    return Curve(static_cast<i64>(r), static_cast<i64>(s));
}

int root_number(int w, i64 D, i64 N) {
    if (w != 1 && w != -1) throw std::invalid_argument("root_number: w must be +1 or -1");
    if (N < 1) throw std::invalid_argument("root_number: N must be positive");
    if (gcd(D, N) != 1)
        throw std::invalid_argument("root_number: gcd(" + std::to_string(D) + ", " + std::to_string(N) + ") > 1");
    return w * sign(D) * kronecker(D, N);
}

std::string to_string(const ClassTriple& c) {
    return "(" + std::to_string(c.k) + "," + std::to_string(c.delta) + "," + std::to_string(c.e) + ")";
}

ClassDecomposition class_decompose(i64 D) {
    if (!is_fundamental_discriminant(D))
        throw std::invalid_argument("class_decompose: " + std::to_string(D) + " is not a fundamental discriminant");
    i64 n = D < 0 ? -D : D;
    int e = 0;
    while (n % 2 == 0) {
        n /= 2;
        ++e;
    }
    if (e != 0 && e != 2 && e != 3)
        throw std::invalid_argument("class_decompose: 2-adic valuation " + std::to_string(e) + " of " +
                                    std::to_string(D));
    return {ClassTriple{static_cast<int>(n % 8), D < 0 ? -1 : 1, e}, n};
}

BaseCurve curve_37a() { return {"37a", Curve(-16, 16), 37, -1}; }

BaseCurve curve_11a() { return {"11a", Curve(-13392, -1080432), 11, 1}; }

std::vector<BaseCurve> load_curve_data(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_curve_data: cannot open " + path.string());
    std::vector<BaseCurve> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto where = path.string() + ":" + std::to_string(lineno) + ": ";
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        i64 r, s, N;
        int w;
        if (!(fields >> r)) continue;  // blank
        if (!(fields >> s >> N >> w)) throw std::invalid_argument(where + "expected four fields r s N w");
        std::string extra;
        if (fields >> extra) throw std::invalid_argument(where + "trailing field '" + extra + "'");
        if (w != 1 && w != -1) throw std::invalid_argument(where + "w must be +1 or -1");
        if (N < 1) throw std::invalid_argument(where + "N must be positive");
        const Curve c(r, s);
        if (c.singular()) throw std::invalid_argument(where + "singular curve");
        if (!is_minimal(c)) throw std::invalid_argument(where + "model is not minimal");
        for (const auto& [p, e] : factorize(N))
            if (p >= 5 && c.delta % p != 0)
                throw std::invalid_argument(where + "prime " + std::to_string(p) +
                                            " divides N but not the discriminant");
        out.push_back({"row" + std::to_string(lineno), c, N, w});
    }
    return out;
}

int TwistFamily::delta() const {
    if (weight.lo() >= 0.0) return 1;
    if (weight.hi() <= 0.0) return -1;
    throw std::invalid_argument("TwistFamily: weight support straddles 0");
}

std::vector<TwistMember> enumerate_T_pm(const TwistFamily& family, double T) {
    if (T < 1) throw std::invalid_argument("enumerate_T_pm: T must be >= 1");
    if (family.sign < -1 || family.sign > 1) throw std::invalid_argument("enumerate_T_pm: sign must be -1, 0 or +1");
    (void)family.delta();
    const auto lo = static_cast<i64>(std::ceil(family.weight.lo() * T));
    const auto hi = static_cast<i64>(std::floor(family.weight.hi() * T));
    std::vector<TwistMember> out;
    for (i64 D = lo; D <= hi; ++D) {
        if (D == 0 || !is_fundamental_discriminant(D) || gcd(D, family.base.N) != 1) continue;
        const double w = family.weight(static_cast<double>(D) / T);
        if (w == 0.0) continue;
        const int wD = root_number(family.base.w, D, family.base.N);
        if (family.sign != 0 && wD != family.sign) continue;
        const auto cls = class_decompose(D);
        if (family.class_filter && cls.triple != *family.class_filter) continue;
        out.push_back({D, w, wD, cls});
    }
    return out;
}

double weighted_total(const std::vector<TwistMember>& members) {
    CompensatedSum acc;
    for (const auto& m : members) acc.add(m.weight);
    return acc.value();
}

std::vector<i64> sieve_prime_set(double T, i64 N) {
    if (T < 16) throw std::invalid_argument("sieve_prime_set: T must be >= 16");
    const double bound = std::log(std::log(T));
    std::vector<i64> out;
    for (const i64 p : sieve_primes(static_cast<i64>(std::floor(bound))))
        if (p > 2 && N % p != 0) out.push_back(p);
    return out;
}

int sieve_indicator_X(i64 n, double T, i64 N) {
    if (n < 1 || n % 2 == 0) throw std::invalid_argument("sieve_indicator_X: n must be odd and positive");
    const auto P = sieve_prime_set(T, N);
    // inclusion-exclusion over squarefree d | P with d^2 | n
    int total = 0;
    const std::size_t subsets = std::size_t{1} << P.size();
    for (std::size_t mask = 0; mask < subsets; ++mask) {
        i64 d = 1;
        int mu = 1;
        bool fits = true;
        for (std::size_t i = 0; i < P.size() && fits; ++i) {
            if (!(mask >> i & 1U)) continue;
            d *= P[i];
            mu = -mu;
            fits = n % (d * d) == 0;
        }
        if (fits) total += mu;
    }
    return total;
}

TwistTraces::TwistTraces(const BaseCurve& base, double limit) : base_curve_(base) {
    if (!is_minimal(base.curve) || base.curve.singular())
        throw std::invalid_argument("TwistTraces: base must be a minimal nonsingular model");
    const auto table = sieve_primes(static_cast<i64>(std::floor(limit)));
    for (const i64 p : table.range(4.0, limit)) {
        primes_.push_back(p);
        base_.push_back(sigma_p(base.curve.r, base.curve.s, p));
    }
}

TwistTraces::Twisted TwistTraces::twist(i64 D) const {
    const Curve raw = twist_curve(base_curve_.curve, D);
    const auto sm = star_map(raw.r, raw.s);
    Twisted out{sm.minimal, sm.d, std::vector<int>(primes_.size())};
    for (std::size_t i = 0; i < primes_.size(); ++i) {
        const i64 p = primes_[i];
        if (D % p != 0 && sm.d % p != 0)
            out.traces[i] = legendre(D, p) * base_[i];
        else
            out.traces[i] = sigma_p(sm.minimal.r, sm.minimal.s, p);
    }
    return out;
}

i128 twist_conductor_surrogate(const BaseCurve& base, const Curve& minimal_twist, i64 D) {
    std::vector<i64> support;
    for (const auto& [p, e] : factorize128(base.curve.delta)) support.push_back(p);
    for (const auto& [p, e] : factorize(D)) support.push_back(p);
    return conductor_surrogate(minimal_twist, support);
}

namespace {

struct TwistAcc {
    CompensatedSum weight, logN, logND2, u1, u2, bound;
    double max_dev = 0.0;
    std::size_t n = 0;
    void add(const TwistAcc& o) {
        weight.add(o.weight);
        logN.add(o.logN);
        logND2.add(o.logND2);
        u1.add(o.u1);
        u2.add(o.u2);
        bound.add(o.bound);
        max_dev = std::max(max_dev, o.max_dev);
        n += o.n;
    }
};

}  // namespace

TwistReport twist_average_experiment(const TwistFamily& family, double T, double X, double C0, unsigned threads) {
    if (X < 25) throw std::invalid_argument("twist_average_experiment: X must be >= 25");
    if (X > T * T) throw std::invalid_argument("twist_average_experiment: X exceeds T^2");
    TwistReport report;
    report.T = T;
    report.X = X;
    report.C0 = C0;
    report.sign = family.sign;

    const auto members = enumerate_T_pm(family, T);
    report.members = members.size();
    report.empty = members.empty();
    if (report.empty) return report;

    const TwistTraces traces(family.base, X);
    const auto primes = traces.primes();
    const double L = std::log(X);
    std::vector<double> w1, w2;
    for (const i64 p : primes) {
        const double lp = std::log(static_cast<double>(p));
        w1.push_back(lp / static_cast<double>(p) * h_X(lp, X));
        if (static_cast<double>(p) * static_cast<double>(p) <= X) w2.push_back(2.0 * lp * h_X(2.0 * lp, X));
    }

    report.rows.resize(members.size());
    const auto acc = chunked_reduce<TwistAcc>(members.size(), threads, [&](std::size_t i, TwistAcc& a) {
        const auto& m = members[i];
        const auto tw = traces.twist(m.D);
        CompensatedSum u1, u2;
        for (std::size_t j = 0; j < primes.size(); ++j) {
            u1.add(-w1[j] * tw.traces[j]);
            if (j < w2.size()) {
                const TraceData t{primes[j], tw.traces[j], tw.minimal.delta % primes[j] == 0};
                u2.add(c_pk(t, 2) * w2[j]);
            }
        }
        TwistRow& row = report.rows[i];
        row.D = m.D;
        row.weight = m.weight;
        row.root_number = m.root_number;
        row.cls = m.cls.triple;
        row.logN_term =
            std::log(static_cast<long double>(twist_conductor_surrogate(family.base, tw.minimal, m.D))) / L;
        const double absD = std::abs(static_cast<double>(m.D));
        row.logND2_term = (std::log(static_cast<double>(family.base.N)) + 2.0 * std::log(absD)) / L;
        row.U1_term = 2.0 * u1.value() / L;
        row.U2_term = 2.0 * u2.value() / L;
        row.U2 = u2.value();
        row.bound = row.logN_term + row.U1_term + row.U2_term + C0 / L;

        a.weight.add(m.weight);
        a.logN.add(m.weight * row.logN_term);
        a.logND2.add(m.weight * row.logND2_term);
        a.u1.add(m.weight * row.U1_term);
        a.u2.add(m.weight * row.U2_term);
        a.bound.add(m.weight * row.bound);
        const double llD = std::log(std::log(absD));
        if (llD > 0) a.max_dev = std::max(a.max_dev, std::abs(row.U2 - 0.25 * L) / llD);
        ++a.n;
    });

    report.total_weight = acc.weight.value();
    report.avg_logN_term = acc.logN.value() / report.total_weight;
    report.avg_logND2_term = acc.logND2.value() / report.total_weight;
    report.avg_U1_term = acc.u1.value() / report.total_weight;
    report.avg_U2_term = acc.u2.value() / report.total_weight;
    report.avg_bound = acc.bound.value() / report.total_weight;
    report.avg_U1_over_logX = report.avg_U1_term / 2.0;
    report.avg_U2_over_logX = report.avg_U2_term / 2.0;
    report.max_U2_deviation = acc.max_dev;
    return report;
}

double twisted_pnt_sum(const BaseCurve& base, i64 D, double x) {
    if (x < 5) throw std::invalid_argument("twisted_pnt_sum: x must be >= 5");
    double total = 0.0;
    const auto table = sieve_primes(static_cast<i64>(std::floor(x)));
    for (const i64 p : table.range(4.0, x)) {
        const double lp = std::log(static_cast<double>(p));
        total += sigma_p(base.curve.r, base.curve.s, p) / static_cast<double>(p) * kronecker(D, p) * lp;
    }
    return total;
}

PntGrowth twisted_pnt_growth(const BaseCurve& base, i64 D, double x_max) {
    PntGrowth out;
    double total = 0.0;
    const auto table = sieve_primes(static_cast<i64>(std::floor(x_max)));
    for (const i64 p : table.range(4.0, x_max)) {
        const double lp = std::log(static_cast<double>(p));
        total += sigma_p(base.curve.r, base.curve.s, p) / static_cast<double>(p) * kronecker(D, p) * lp;
        const double ratio = std::abs(total) / lp;
        if (ratio > out.max_ratio) {
            out.max_ratio = ratio;
            out.at = static_cast<double>(p);
        }
    }
    out.final_sum = total;
    return out;
}

int psi_p(i64 n, i64 b, i64 p) {
    const int chi_p = legendre(n, p);
    switch (b) {
    case 1: return chi_p;
    case 4: return kronecker(-4, n) * chi_p;
    case 8: return kronecker(8, n) * chi_p;
    default: throw std::invalid_argument("psi_p: b must be 1, 4 or 8");
    }
}

PoissonCheck poisson_twist_check(const SmoothWeight& W, i64 b, i64 p, double T, QuadratureOptions opts) {
    if (p < 3 || !is_prime(p)) throw std::invalid_argument("poisson_twist_check: p must be an odd prime");
    if (b != 1 && b != 4 && b != 8) throw std::invalid_argument("poisson_twist_check: b must be 1, 4 or 8");
    if (T <= 0) throw std::invalid_argument("poisson_twist_check: T must be positive");
    PoissonCheck out;
    out.q = b * p;
    const i64 q = out.q;

    for (i64 j = 0; j < q; ++j)
        out.gauss += static_cast<double>(psi_p(j, b, p)) *
                     std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(q));

    const auto n_lo = static_cast<i64>(std::ceil(W.lo() * T));
    const auto n_hi = static_cast<i64>(std::floor(W.hi() * T));
    CompensatedSum direct;
    for (i64 n = n_lo; n <= n_hi; ++n) direct.add(W(static_cast<double>(n) / T) * psi_p(n, b, p));
    out.direct = direct.value();

    // psi_p(0) = 0, so m = 0 is absent
    constexpr double kNegligible = 1e-14;
    constexpr int kQuietRun = 8;
    constexpr i64 kMaxTerms = 1'000'000;
    CompensatedSum re, im;
    int quiet = 0;
    i64 m = 1;
    for (; quiet < kQuietRun; ++m) {
        if (m > kMaxTerms) throw IdentityViolated("poisson_twist_check: dual sum did not become negligible");
        const double x = T * static_cast<double>(m) / static_cast<double>(q);
        const auto plus = fourier_numeric(W, x, opts);
        const auto minus = fourier_numeric(W, -x, opts);
        const std::complex<double> term =
            plus * static_cast<double>(psi_p(m, b, p)) + minus * static_cast<double>(psi_p(-m, b, p));
        re.add(term.real());
        im.add(term.imag());
        quiet = (std::abs(plus) < kNegligible && std::abs(minus) < kNegligible) ? quiet + 1 : 0;
    }
    out.terms = m - 1;
    out.dual = T * out.gauss / static_cast<double>(q) * std::complex<double>(re.value(), im.value());
    out.residual = std::abs(out.direct - out.dual);
    if (out.residual >= 1e-6)
        throw IdentityViolated("identity violated: residual " + std::to_string(out.residual) + " at p = " +
                               std::to_string(p) + ", b = " + std::to_string(b));
    return out;
}

std::pair<double, double> theorem4_proportions(double avg_plus, double avg_minus) {
    if (avg_plus < 0 || avg_minus < 0) throw std::invalid_argument("theorem4_proportions: averages must be >= 0");
    return {std::clamp(1.0 - avg_plus / 2.0, 0.0, 1.0), std::clamp(1.0 - (avg_minus - 1.0) / 2.0, 0.0, 1.0)};
}

std::map<ClassTriple, ClassSigns> class_sign_table(const BaseCurve& base, i64 D_max) {
    std::map<ClassTriple, ClassSigns> table;
    for (i64 D = -D_max; D <= D_max; ++D) {
        if (D == 0 || !is_fundamental_discriminant(D) || gcd(D, base.N) != 1) continue;
        const auto cls = class_decompose(D);
        const int wD = root_number(base.w, D, base.N);
        auto& entry = table[cls.triple];
        (wD == 1 ? entry.plus : entry.minus)++;
        const int twisted = wD * jacobi(base.N, cls.n_hat);
        (twisted == 1 ? entry.twisted_plus : entry.twisted_minus)++;
    }
    return table;
}

}  // namespace avgrank
