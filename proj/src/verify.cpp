#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <iterator>
#include <unistd.h>

#include <fmt/format.h>

#include "avgrank/apcache.hpp"
#include "avgrank/commands.hpp"
#include "avgrank/families.hpp"
#include "avgrank/moments.hpp"
#include "avgrank/oracles.hpp"

namespace avgrank {

namespace {

// A suite returns an empty string on success, otherwise the first mismatch.
using Suite = std::function<std::string()>;

int count_points_affine(i64 r, i64 s, i64 p) {
    std::vector<int> squares(static_cast<std::size_t>(p), 0);
    for (i64 y = 0; y < p; ++y) ++squares[static_cast<std::size_t>(y * y % p)];
    int n = 0;
    for (i64 x = 0; x < p; ++x) {
        const i64 rhs = mod(mod(x * x % p * x, p) + mod(r, p) * x + mod(s, p), p);
        n += squares[static_cast<std::size_t>(rhs)];
    }
    return n;
}

std::string suite_arith() {
    const auto table = sieve_primes(200);
    for (const i64 p : table.range(2.0, 200.0)) {
        for (i64 a = -30; a <= 30; ++a) {
            const i64 e = powmod(mod(a, p), static_cast<u64>((p - 1) / 2), p);
            const int euler = e == 0 ? 0 : (e == 1 ? 1 : -1);
            if (legendre(a, p) != euler) return fmt::format("legendre({}, {})", a, p);
        }
        const auto g = gauss_sum(p);
        if (std::abs(std::norm(g) - static_cast<double>(p)) > 1e-6 * static_cast<double>(p))
            return fmt::format("|gauss sum|^2 at p = {}", p);
    }
    for (i64 n = 1; n <= 99; n += 2)
        for (i64 m = 1; m <= 99; m += 2)
            for (i64 a = -20; a <= 20; ++a)
                if (jacobi(a, n * m) != jacobi(a, n) * jacobi(a, m)) return fmt::format("jacobi({}, {}*{})", a, n, m);
    for (i64 D = -200; D <= 200; ++D) {
        if (D == 0 || !is_fundamental_discriminant(D)) continue;
        const i64 period = D < 0 ? -D : D;
        for (i64 n = 1; n <= 200; ++n)
            if (kronecker(D, n) != kronecker(D, n + period)) return fmt::format("kronecker period D = {}", D);
    }
    return {};
}

std::string suite_ramanujan() {
    for (i64 b = 1; b <= 60; ++b)
        for (i64 a = -60; a <= 60; ++a) {
            const auto z = ramanujan_exponential_oracle(a, b);
            if (std::abs(z.imag()) >= 1e-6 || std::abs(z.real() - static_cast<double>(ramanujan_sum(a, b))) >= 1e-6)
                return fmt::format("c_{}({})", b, a);
        }
    return {};
}

std::string suite_traces() {
    const auto table = sieve_primes(47);
    for (const i64 p : table.range(4.0, 47.0))
        for (i64 r = -5; r <= 5; ++r)
            for (i64 s = -5; s <= 5; ++s) {
                const int sigma = sigma_p(r, s, p);
                if (sigma != sigma_p_charsum(r, s, p)) return fmt::format("sigma vs char sum at ({}, {}, {})", r, s, p);
                if (sigma != static_cast<int>(p) - count_points_affine(r, s, p))
                    return fmt::format("sigma vs point count at ({}, {}, {})", r, s, p);
                if (static_cast<i64>(sigma) * sigma > 4 * p) return fmt::format("Hasse at ({}, {}, {})", r, s, p);
            }
    return {};
}

std::string suite_star_map() {
    for (i64 r = -4; r <= 4; ++r)
        for (i64 s = -4; s <= 4; ++s) {
            const Curve c(r, s);
            if (c.singular() || !is_minimal(c)) continue;
            for (const i64 d : {2, 3, 5}) {
                const i64 d2 = d * d;
                const auto sm = star_map(r * d2 * d2, s * d2 * d2 * d2);
                if (sm.d != d || !(sm.minimal == c)) return fmt::format("star map of ({}, {}) scaled by {}", r, s, d);
            }
        }
    return {};
}

std::string suite_weights() {
    if (h_hat(0.0) != 1.0) return "h_hat(0) != 1";
    const auto tri = triangle_weight();
    for (int i = 0; i < 20; ++i) {
        const double t = -4.75 + 0.5 * i;
        const double numeric = fourier_numeric(tri, t).real();
        if (std::abs(numeric - h_hat(t)) > 1e-8) return fmt::format("h_hat at t = {}", t);
    }
    for (const double X : {10.0, 100.0}) {
        const auto kw = kernel_k_weight(X);
        for (int i = 0; i < 10; ++i) {
            const double t = 0.3 * i - 1.35;
            if (std::abs(fourier_numeric(kw, t).real() - kernel_k_hat(t, X)) > 1e-8)
                return fmt::format("k_hat at t = {}, X = {}", t, X);
        }
        const double L = std::log(X);
        const auto table = sieve_primes(static_cast<i64>(X));
        for (const i64 p : table.range(1.0, std::pow(X, 1.0 - 1.0 / X)))
            if (kernel_k(std::log(static_cast<double>(p)) / L, X) != 1.0 / (L * L))
                return fmt::format("kernel plateau at p = {}, X = {}", p, X);
    }
    return {};
}

std::string suite_u2_bound() {
    const double X = 100.0;
    const auto primes = sieve_primes(100);
    double cap = 0.0;
    for (const i64 p : primes.range(4.0, 10.0)) cap += 2.0 * std::log(static_cast<double>(p)) / static_cast<double>(p);
    for (const auto& c : enumerate_C(1e3)) {
        const double u2 = U2(c, X, primes);
        if (std::abs(u2) > cap) return fmt::format("|U2| at ({}, {})", c.r, c.s);
    }
    return {};
}

std::string suite_gcd_sums() {
    if (gcd_sum_S(1, 1).S != 3) return "S(1,1) != 3";
    if (gcd_sum_S(2, 2).S != 29) return "S(2,2) != 29";
    for (i64 U = 1; U <= 10; ++U)
        for (i64 V = 1; V <= 10; ++V)
            if (gcd_sum_S(U, V).S != gcd_sum_S_by_v(U, V)) return fmt::format("loop orders at U = {}, V = {}", U, V);
    for (int e = 0; e <= 60; ++e)
        for (int f = 0; f <= e; ++f)
            if (!floor_inequality(e, f)) return fmt::format("floor inequality at e = {}, f = {}", e, f);
    for (i64 d = 1; d <= 2000; ++d)
        if (delta_of(d) * f_of(d) != d) return fmt::format("delta * f != d at {}", d);
    return {};
}

std::string suite_sieve() {
    const double T = 1e4;
    const i64 N = 37;
    const auto P = sieve_prime_set(T, N);
    for (i64 n = 1; n <= 2001; n += 2) {
        bool square_free_at_P = true;
        for (const i64 p : P) square_free_at_P = square_free_at_P && n % (p * p) != 0;
        if (sieve_indicator_X(n, T, N) != (square_free_at_P ? 1 : 0)) return fmt::format("sieve at n = {}", n);
    }
    return {};
}

std::string suite_twists() {
    const auto base = curve_37a();
    const TwistTraces traces(base, 60.0);
    for (const i64 D : {-83, -4, 5, 8, 12, 13, 21, 28, 40, 105}) {
        const auto tw = traces.twist(D);
        const auto primes = traces.primes();
        for (std::size_t i = 0; i < primes.size(); ++i)
            if (tw.traces[i] != sigma_p(tw.minimal.r, tw.minimal.s, primes[i]))
                return fmt::format("twist trace at D = {}, p = {}", D, primes[i]);
    }
    const auto [a, b] = theorem4_proportions(1.5, 1.5);
    if (a != 0.25 || b != 0.75) return "proportions at (3/2, 3/2)";
    return {};
}

std::string suite_poisson() {
    for (const i64 p : {3, 5, 7})
        for (const i64 b : {1, 8}) {
            const auto chk = poisson_twist_check(bump(1.0, 2.0), b, p, 50.0);
            if (chk.residual >= 1e-6) return fmt::format("residual at p = {}, b = {}", p, b);
        }
    return {};
}

std::string suite_markov() {
    const double T = 1e3, X = 400.0;
    const std::vector<int> ks{1, 2};
    const auto moments = moments_2k(T, X, ks, 1);
    for (std::size_t i = 0; i < ks.size(); ++i)
        for (const double lambda : {0.5, 1.0, 2.0, 3.0}) {
            const auto n = static_cast<double>(count_V_at_least(T, X, lambda, 1));
            if (n > moments[i] / std::pow(lambda, 2 * ks[i])) return fmt::format("k = {}, lambda = {}", ks[i], lambda);
        }
    return {};
}

void write_i64(std::vector<char>& bytes, std::size_t offset, i64 v) {
    for (int i = 0; i < 8; ++i) bytes[offset + static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xff);
}

std::string suite_cache(unsigned threads) {
    const auto dir = std::filesystem::temp_directory_path();
    const auto path = dir / fmt::format("avgrank-verify-{}.apc", static_cast<long>(::getpid()));
    struct Cleanup {
        std::filesystem::path p;
        ~Cleanup() {
            std::error_code ec;
            std::filesystem::remove(p, ec);
        }
    } cleanup{path};

    const auto built = ApCache::build(CoefficientBox(3, 5), 50, threads);
    built.save(path);
    if (ApCache::load(path).records() != built.records()) return "round trip";

    std::vector<char> bytes;
    {
        std::ifstream in(path, std::ios::binary);
        bytes.assign(std::istreambuf_iterator<char>(in), {});
    }
    auto expect_kind = [&](const std::vector<char>& image, ApCacheErrorKind want) -> bool {
        {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            out.write(image.data(), static_cast<std::streamsize>(image.size()));
        }
        try {
            (void)ApCache::load(path);
        } catch (const ApCacheError& e) {
            return e.kind() == want;
        }
        return false;
    };
    auto hasse = bytes;
    write_i64(hasse, 24 + 24, 1000);  // ap of the first record
    if (!expect_kind(hasse, ApCacheErrorKind::hasse_violation)) return "Hasse fault not detected";
    auto truncated = bytes;
    truncated.resize(truncated.size() - 5);
    if (!expect_kind(truncated, ApCacheErrorKind::corrupt)) return "truncation not detected";
    return {};
}

}  // namespace

std::vector<SuiteResult> run_verify_suites(unsigned threads) {
    const std::vector<std::pair<std::string, Suite>> suites{
        {"arith", suite_arith},
        {"ramanujan", suite_ramanujan},
        {"traces", suite_traces},
        {"star_map", suite_star_map},
        {"weights", suite_weights},
        {"u2_bound", suite_u2_bound},
        {"gcd_sums", suite_gcd_sums},
        {"sieve", suite_sieve},
        {"twists", suite_twists},
        {"poisson", suite_poisson},
        {"markov", suite_markov},
        {"cache", [threads] { return suite_cache(threads); }},
    };
    std::vector<SuiteResult> out;
    for (const auto& [name, run] : suites) {
        SuiteResult res{name, false, {}};
        try {
            res.detail = run();
            res.passed = res.detail.empty();
        } catch (const std::exception& e) {
            res.detail = e.what();
        }
        out.push_back(std::move(res));
    }
    return out;
}

}  // namespace avgrank
