#pragma once

// Persistent table of Frobenius traces for the minimal curves of a
// coefficient box.
//
// File layout, all integers little-endian:
//   bytes 0..7    magic "APCACHE\0"
//   u64           format version (1)
//   u64           record count n
//   n records     int64 r, int64 s, int64 p, int64 ap
// Records are sorted by (r, s, p) with no duplicates, every (r, s) carries
// the same run of primes 5 <= p <= limit, and every ap obeys ap^2 <= 4p.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "avgrank/arith.hpp"

namespace avgrank {

class CoefficientBox;

enum class ApCacheErrorKind { io, bad_magic, bad_version, corrupt, unsorted, hasse_violation, inconsistent_primes };

std::string to_string(ApCacheErrorKind kind);

class ApCacheError : public std::runtime_error {
public:
    ApCacheError(ApCacheErrorKind kind, const std::string& detail)
        : std::runtime_error(to_string(kind) + ": " + detail), kind_(kind) {}
    ApCacheErrorKind kind() const { return kind_; }

private:
    ApCacheErrorKind kind_;
};

struct ApRecord {
    i64 r, s, p, ap;
    friend bool operator==(const ApRecord&, const ApRecord&) = default;
};

class ApCache {
public:
    static constexpr char kMagic[8] = {'A', 'P', 'C', 'A', 'C', 'H', 'E', '\0'};
    static constexpr std::uint64_t kVersion = 1;

    /// Traces of every minimal nonsingular curve in the box at 5 <= p <= prime_limit.
    static ApCache build(const CoefficientBox& box, i64 prime_limit, unsigned threads = 1);
    static ApCache load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    std::span<const i64> primes() const { return primes_; }
    std::size_t curve_count() const { return keys_.size(); }
    std::size_t record_count() const { return keys_.size() * primes_.size(); }
    std::vector<ApRecord> records() const;

    /// Traces of (r, s) aligned with primes(), if present.
    std::optional<std::span<const int>> lookup(i64 r, i64 s) const;

private:
    struct Key {
        i64 r, s;
        auto operator<=>(const Key&) const = default;
    };
    std::vector<i64> primes_;
    std::vector<Key> keys_;
    std::vector<int> traces_;  // keys_.size() rows of primes_.size()
};

}  // namespace avgrank
