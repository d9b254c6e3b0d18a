#include "avgrank/apcache.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <tuple>

#include "avgrank/curves.hpp"
#include "avgrank/families.hpp"
#include "avgrank/parallel.hpp"

namespace avgrank {

static_assert(std::endian::native == std::endian::little, "cache I/O assumes a little-endian host");

std::string to_string(ApCacheErrorKind kind) {
    switch (kind) {
    case ApCacheErrorKind::io: return "cache io error";
    case ApCacheErrorKind::bad_magic: return "bad magic";
    case ApCacheErrorKind::bad_version: return "unsupported cache version";
    case ApCacheErrorKind::corrupt: return "corrupt cache";
    case ApCacheErrorKind::unsorted: return "unsorted cache";
    case ApCacheErrorKind::hasse_violation: return "Hasse bound violated";
    case ApCacheErrorKind::inconsistent_primes: return "inconsistent prime set";
    }
    return "cache error";
}

ApCache ApCache::build(const CoefficientBox& box, i64 prime_limit, unsigned threads) {
    ApCache cache;
    const auto table = sieve_primes(prime_limit);
    for (const i64 p : table.range(4.0, static_cast<double>(prime_limit))) cache.primes_.push_back(p);
    std::vector<SigmaEvaluator> sigma;
    sigma.reserve(cache.primes_.size());
    for (const i64 p : cache.primes_) sigma.emplace_back(p);

    for (std::size_t i = 0; i < box.size(); ++i) {
        const auto [r, s] = box.at(i);
        if (admits(FamilyFilter::minimal_nonsingular, r, s)) cache.keys_.push_back({r, s});
    }
    const std::size_t width = cache.primes_.size();
    cache.traces_.assign(cache.keys_.size() * width, 0);
    parallel_chunks(chunk_count(cache.keys_.size()), threads, [&](std::size_t c) {
        const std::size_t lo = c * kChunkSize;
        const std::size_t hi = std::min(cache.keys_.size(), lo + kChunkSize);
        for (std::size_t k = lo; k < hi; ++k)
            for (std::size_t j = 0; j < width; ++j)
                cache.traces_[k * width + j] = sigma[j](cache.keys_[k].r, cache.keys_[k].s);
    });
    return cache;
}

std::vector<ApRecord> ApCache::records() const {
    std::vector<ApRecord> out;
    out.reserve(record_count());
    for (std::size_t k = 0; k < keys_.size(); ++k)
        for (std::size_t j = 0; j < primes_.size(); ++j)
            out.push_back({keys_[k].r, keys_[k].s, primes_[j], traces_[k * primes_.size() + j]});
    return out;
}

std::optional<std::span<const int>> ApCache::lookup(i64 r, i64 s) const {
    const Key key{r, s};
    const auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
    if (it == keys_.end() || *it != key) return std::nullopt;
    const auto k = static_cast<std::size_t>(it - keys_.begin());
    return std::span<const int>(traces_).subspan(k * primes_.size(), primes_.size());
}

namespace {

void put_u64(std::ofstream& out, std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }
void put_i64(std::ofstream& out, i64 v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }

std::uint64_t get_u64(const char* p) {
    std::uint64_t v;
    std::memcpy(&v, p, sizeof v);
    return v;
}

}  // namespace

void ApCache::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ApCacheError(ApCacheErrorKind::io, "cannot open " + path.string() + " for writing");
    out.write(kMagic, sizeof kMagic);
    put_u64(out, kVersion);
    put_u64(out, record_count());
    for (const auto& rec : records()) {
        put_i64(out, rec.r);
        put_i64(out, rec.s);
        put_i64(out, rec.p);
        put_i64(out, rec.ap);
    }
    if (!out) throw ApCacheError(ApCacheErrorKind::io, "write failed for " + path.string());
}

ApCache ApCache::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ApCacheError(ApCacheErrorKind::io, "cannot open " + path.string());
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    constexpr std::size_t header = 24, record = 32;
    if (bytes.size() < sizeof kMagic) throw ApCacheError(ApCacheErrorKind::corrupt, "file shorter than its header");
    if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
        throw ApCacheError(ApCacheErrorKind::bad_magic, path.string());
    if (bytes.size() < header) throw ApCacheError(ApCacheErrorKind::corrupt, "file shorter than its header");
    const std::uint64_t version = get_u64(bytes.data() + 8);
    if (version != kVersion)
        throw ApCacheError(ApCacheErrorKind::bad_version, "found version " + std::to_string(version));
    const std::uint64_t n = get_u64(bytes.data() + 16);
    if (n > (bytes.size() - header) / record || bytes.size() != header + n * record)
        throw ApCacheError(ApCacheErrorKind::corrupt, "record count " + std::to_string(n) + " does not match size " +
                                                          std::to_string(bytes.size()));

    ApCache cache;
    const char* p = bytes.data() + header;
    std::optional<ApRecord> prev;
    std::size_t column = 0;
    for (std::uint64_t i = 0; i < n; ++i, p += record) {
        const ApRecord rec{static_cast<i64>(get_u64(p)), static_cast<i64>(get_u64(p + 8)),
                           static_cast<i64>(get_u64(p + 16)), static_cast<i64>(get_u64(p + 24))};
        if (prev) {
            const auto a = std::make_tuple(prev->r, prev->s, prev->p);
            const auto b = std::make_tuple(rec.r, rec.s, rec.p);
            if (!(a < b)) throw ApCacheError(ApCacheErrorKind::unsorted, "record " + std::to_string(i));
        }
        if (rec.p < 5 || !is_prime(rec.p))
            throw ApCacheError(ApCacheErrorKind::corrupt, "record " + std::to_string(i) + " has p = " +
                                                              std::to_string(rec.p));
        if (static_cast<i128>(rec.ap) * rec.ap > static_cast<i128>(4) * rec.p)
            throw ApCacheError(ApCacheErrorKind::hasse_violation,
                               "a_p = " + std::to_string(rec.ap) + " at p = " + std::to_string(rec.p) + " for (" +
                                   std::to_string(rec.r) + ", " + std::to_string(rec.s) + ")");

        const bool new_curve = !prev || prev->r != rec.r || prev->s != rec.s;
        if (new_curve) {
            if (prev && column != cache.primes_.size())
                throw ApCacheError(ApCacheErrorKind::inconsistent_primes, "curve (" + std::to_string(prev->r) + ", " +
                                                                              std::to_string(prev->s) + ")");
            cache.keys_.push_back({rec.r, rec.s});
            column = 0;
        }
        if (cache.keys_.size() == 1) {
            cache.primes_.push_back(rec.p);
        } else if (column >= cache.primes_.size() || cache.primes_[column] != rec.p) {
            throw ApCacheError(ApCacheErrorKind::inconsistent_primes,
                               "curve (" + std::to_string(rec.r) + ", " + std::to_string(rec.s) + ")");
        }
        cache.traces_.push_back(static_cast<int>(rec.ap));
        ++column;
        prev = rec;
    }
    if (prev && column != cache.primes_.size())
        throw ApCacheError(ApCacheErrorKind::inconsistent_primes, "last curve is incomplete");
    return cache;
}

}  // namespace avgrank
