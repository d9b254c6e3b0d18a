#pragma once

// Deterministic parallel reduction. Work is cut into chunks whose boundaries
// depend only on the problem size, each chunk is reduced on its own, and the
// per-chunk partials are combined in chunk-index order. The worker count
// therefore never changes a result bit.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace avgrank {

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            carry_ += (sum_ - t) + x;
        else
            carry_ += (x - t) + sum_;
        sum_ = t;
    }
    void add(const CompensatedSum& other) {
        add(other.sum_);
        add(other.carry_);
    }
    double value() const { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

/// Double-double accumulator (error-free two-sum), ~106 bits of mantissa.
class DoubleDouble {
public:
    void add(double x) {
        double s, e;
        two_sum(hi_, x, s, e);
        e += lo_;
        fast_two_sum(s, e, hi_, lo_);
    }
    void add(const DoubleDouble& other) {
        double s, e;
        two_sum(hi_, other.hi_, s, e);
        e += lo_ + other.lo_;
        fast_two_sum(s, e, hi_, lo_);
    }
    double value() const { return hi_ + lo_; }
    long double value_ld() const { return static_cast<long double>(hi_) + static_cast<long double>(lo_); }

private:
    static void two_sum(double a, double b, double& s, double& e) {
        s = a + b;
        const double bb = s - a;
        e = (a - (s - bb)) + (b - bb);
    }
    static void fast_two_sum(double a, double b, double& s, double& e) {
        s = a + b;
        e = b - (s - a);
    }
    double hi_ = 0.0;
    double lo_ = 0.0;
};

/// Fixed chunk size for every chunked reduction in the library.
inline constexpr std::size_t kChunkSize = 1024;

inline std::size_t chunk_count(std::size_t n, std::size_t chunk = kChunkSize) {
    return (n + chunk - 1) / chunk;
}

/// Runs body(chunk_index) for every chunk on up to `threads` workers. The
/// first exception thrown by any chunk is rethrown on the caller's thread.
template <class Body>
void parallel_chunks(std::size_t n_chunks, unsigned threads, Body&& body) {
    threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, n_chunks))));
    if (threads == 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) body(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            try {
                body(c);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n_chunks);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

/// Chunked map-reduce over [0, n). `map(i, acc)` folds item i into a
/// per-chunk accumulator; partials are merged with `Acc::add(const Acc&)` in
/// chunk order.
template <class Acc, class Map>
Acc chunked_reduce(std::size_t n, unsigned threads, Map&& map) {
    const std::size_t chunks = chunk_count(n);
    std::vector<Acc> partial(chunks);
    parallel_chunks(chunks, threads, [&](std::size_t c) {
        const std::size_t lo = c * kChunkSize;
        const std::size_t hi = std::min(n, lo + kChunkSize);
        for (std::size_t i = lo; i < hi; ++i) map(i, partial[c]);
    });
    Acc total{};
    for (const auto& p : partial) total.add(p);
    return total;
}

}  // namespace avgrank
