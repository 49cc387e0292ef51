#pragma once

/// @file trace_engine.hpp
/// @brief Frobenius traces a_p: direct character sums, baby-step giant-step
/// group-order search, the per-prime dispatch policy and dense trace tables.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "traceforge/cache.hpp"
#include "traceforge/cm_engine.hpp"
#include "traceforge/curve_model.hpp"
#include "traceforge/ec_point.hpp"
#include "traceforge/errors.hpp"
#include "traceforge/modarith.hpp"
#include "traceforge/primes.hpp"

namespace traceforge {

enum class TraceSource : std::uint8_t { Naive, BSGS, CM, BadPrime };

constexpr const char* to_string(TraceSource s) noexcept
{
    switch (s) {
    case TraceSource::Naive: return "naive";
    case TraceSource::BSGS: return "bsgs";
    case TraceSource::CM: return "cm";
    case TraceSource::BadPrime: return "bad";
    }
    return "?";
}

struct TraceRecord {
    std::uint64_t p = 0;
    std::int64_t a_p = 0;
    TraceSource source = TraceSource::Naive;
    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// Integer-exact Hasse bound a^2 <= 4p.
constexpr bool within_hasse(std::int64_t a, std::uint64_t p) noexcept
{
    const auto sq = static_cast<unsigned __int128>(a < 0 ? -a : a);
    return sq * sq <= static_cast<unsigned __int128>(4) * p;
}

/// Character-sum trace -sum_x chi(x^3 + Ax + B), with the cubic advanced by
/// finite differences so the inner loop only adds and looks up chi.
inline std::int64_t character_sum_trace(std::uint64_t A, std::uint64_t B, std::uint64_t p,
                                        std::span<const std::int8_t> chi)
{
    std::uint64_t f = B;                          // f(x)
    std::uint64_t d1 = mod::add(1 % p, A, p);     // f(x+1) - f(x) = 3x^2 + 3x + 1 + A
    std::uint64_t d2 = 6 % p;                     // 6x + 6
    const std::uint64_t d3 = 6 % p;
    std::int64_t sum = 0;
    for (std::uint64_t x = 0; x < p; ++x) {
        sum += chi[f];
        f = mod::add(f, d1, p);
        d1 = mod::add(d1, d2, p);
        d2 = mod::add(d2, d3, p);
    }
    return -sum;
}

/// Affine point count of a long Weierstrass model over F_p by enumeration.
inline std::uint64_t count_affine_long(const LongForm& lf, std::uint64_t p)
{
    const auto [a1, a2, a3, a4, a6] = lf.a;
    std::uint64_t count = 0;
    for (std::uint64_t x = 0; x < p; ++x) {
        const std::uint64_t rhs = mod::add(
            mod::add(mod::mul(mod::add(mod::mul(x, x, p), mod::mul(a2, x, p), p), x, p), mod::mul(a4, x, p), p), a6, p);
        for (std::uint64_t y = 0; y < p; ++y) {
            const std::uint64_t lhs = mod::add(mod::mul(y, y, p), mod::mul(mod::add(mod::mul(a1, x, p), a3, p), y, p), p);
            if (lhs == rhs)
                ++count;
        }
    }
    return count;
}

inline std::int64_t trace_naive(const ReducedCurve& curve)
{
    if (curve.singular)
        throw Error(ErrorCode::SingularCurve, "singular reduction at p = " + std::to_string(curve.p));
    const std::uint64_t p = curve.p;
    if (!curve.is_short())
        return static_cast<std::int64_t>(p + 1) - static_cast<std::int64_t>(count_affine_long(curve.long_form(), p) + 1);
    const auto chi = mod::residue_table(p);
    return character_sum_trace(curve.short_form().A, curve.short_form().B, p, chi);
}

/// Smallest prime above which Mestre's theorem guarantees that E or its
/// twist isolates the group order inside the Hasse interval.
inline constexpr std::uint64_t kBsgsMinPrime = 229;

struct BsgsOptions {
    unsigned rounds = 32;
    std::uint64_t seed = 0;
};

/// Group order by intersecting point orders on E and its quadratic twist.
/// A candidate N in the Hasse interval survives while lcm(orders on E) | N and
/// lcm(orders on the twist) | 2p + 2 - N.
inline std::int64_t trace_bsgs(const ReducedCurve& curve, const BsgsOptions& opts = {})
{
    const std::uint64_t p = curve.p;
    if (curve.singular)
        throw Error(ErrorCode::SingularCurve, "singular reduction at p = " + std::to_string(p));
    if (p <= kBsgsMinPrime || !curve.is_short())
        throw Error(ErrorCode::InvalidInput, "trace_bsgs requires p > 229");

    const std::uint64_t w = mod::isqrt(4 * p);
    const std::uint64_t low = p + 1 - w;
    const std::uint64_t high = p + 1 + w;
    const ShortCurve E(p, curve.short_form());
    const ShortCurve twist = E.quadratic_twist();
    std::mt19937_64 rng(per_prime_seed(opts.seed, p) ^ 0x5bd1e995ULL);

    std::uint64_t lcm_e = 1;
    std::uint64_t lcm_t = 1;
    auto absorb = [&](const ShortCurve& C, std::uint64_t& acc) {
        const Point P = C.random_point(rng);
        const auto multiple = bsgs_multiple(C, P, low, high);
        if (!multiple)
            throw Error(ErrorCode::AmbiguousOrder, "no multiple of a point order in the Hasse interval");
        acc = std::lcm(acc, order_from_multiple(C, P, *multiple));
    };

    for (unsigned round = 0; round < opts.rounds; ++round) {
        absorb(E, lcm_e);
        if (round > 0)
            absorb(twist, lcm_t);
        std::optional<std::uint64_t> found;
        unsigned hits = 0;
        for (std::uint64_t n = (low + lcm_e - 1) / lcm_e * lcm_e; n <= high; n += lcm_e) {
            if ((2 * p + 2 - n) % lcm_t == 0) {
                found = n;
                ++hits;
            }
        }
        if (hits == 0)
            throw Error(ErrorCode::AmbiguousOrder, "no group order consistent with sampled points");
        if (hits == 1)
            return static_cast<std::int64_t>(p + 1) - static_cast<std::int64_t>(*found);
    }
    throw Error(ErrorCode::AmbiguousOrder, "group order not isolated at p = " + std::to_string(p));
}

/// Backend selection for trace().
struct ThresholdPolicy {
    /// good p below this use the character sum
    std::uint64_t naive_threshold = 1U << 12;
    /// route j in {0, 1728} curves through cm_engine for p > 3
    bool cm = true;
    unsigned workers = 1;
    std::uint64_t seed = 0;
    BadPrimeSign sign = BadPrimeSign::Standard;
};

inline std::optional<CmDisc> cm_discriminant(const WeierstrassQ& curve)
{
    if (curve.j_is_zero())
        return CmDisc::MinusThree;
    if (curve.j_is_1728())
        return CmDisc::MinusFour;
    return std::nullopt;
}

/// Backend that trace() would use for a good prime p.
inline TraceSource select_source(const WeierstrassQ& curve, std::uint64_t p, const ThresholdPolicy& policy)
{
    if (p <= 3)
        return TraceSource::Naive;
    if (policy.cm && cm_discriminant(curve))
        return TraceSource::CM;
    if (p < policy.naive_threshold || p <= kBsgsMinPrime)
        return TraceSource::Naive;
    return TraceSource::BSGS;
}

inline TraceRecord trace(const WeierstrassQ& curve, std::uint64_t p, const ThresholdPolicy& policy = {})
{
    const ReductionType type = reduction_type(curve, p);
    if (type != ReductionType::Good)
        return {p, bad_prime_trace(type, policy.sign), TraceSource::BadPrime};
    const ReducedCurve rc = reduce_mod_p(curve, p);
    const TraceSource source = select_source(curve, p, policy);
    std::int64_t a = 0;
    switch (source) {
    case TraceSource::Naive: a = trace_naive(rc); break;
    case TraceSource::CM: a = cm_trace(rc, *cm_discriminant(curve), CmOptions{.seed = policy.seed}); break;
    case TraceSource::BSGS: a = trace_bsgs(rc, BsgsOptions{.seed = policy.seed}); break;
    case TraceSource::BadPrime: break;
    }
    return {p, a, source};
}

struct BadPrime {
    std::uint64_t p = 0;
    ReductionType type = ReductionType::Additive;
    friend bool operator==(const BadPrime&, const BadPrime&) = default;
};

/// a_p for every prime p <= x_max, ascending, plus the bad primes in range.
struct TraceTable {
    std::string label;
    std::uint64_t x_max = 0;
    std::vector<TraceRecord> records;
    std::vector<BadPrime> bad;

    bool is_bad(std::uint64_t p) const
    {
        return std::binary_search(bad.begin(), bad.end(), BadPrime{p, {}},
                                  [](const BadPrime& l, const BadPrime& r) { return l.p < r.p; });
    }

    /// Record for a prime in the table, or nullptr.
    const TraceRecord* find(std::uint64_t p) const
    {
        auto it = std::lower_bound(records.begin(), records.end(), p,
                                   [](const TraceRecord& r, std::uint64_t q) { return r.p < q; });
        return it != records.end() && it->p == p ? &*it : nullptr;
    }

    friend bool operator==(const TraceTable&, const TraceTable&) = default;
};

/// Records for a prime list, computed in fixed-size blocks by `workers`
/// threads. Each record depends only on (curve, p, policy), so the output is
/// identical for every worker count.
inline std::vector<TraceRecord> compute_records(const WeierstrassQ& curve, std::span<const std::uint64_t> primes,
                                                const ThresholdPolicy& policy)
{
    constexpr std::size_t block = 2048;
    std::vector<TraceRecord> out(primes.size());
    const std::size_t blocks = (primes.size() + block - 1) / block;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto work = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= blocks || failed.load())
                return;
            try {
                const std::size_t end = std::min(primes.size(), (b + 1) * block);
                for (std::size_t i = b * block; i < end; ++i)
                    out[i] = trace(curve, primes[i], policy);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                failed = true;
            }
        }
    };

    const unsigned workers = std::max(1U, policy.workers);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < workers; ++i)
            pool.emplace_back(work);
    }
    if (error)
        std::rethrow_exception(error);
    return out;
}

/// Cache identity of a curve: SHA-256 of its canonical coefficient string.
/// The flipped bad-prime sign convention changes stored values, so it is
/// folded into the hashed string.
inline cache::Digest curve_hash(const WeierstrassQ& curve, BadPrimeSign sign = BadPrimeSign::Standard)
{
    std::string key = curve.canonical_string();
    if (sign == BadPrimeSign::Flipped)
        key += ";flip";
    return cache::sha256(key);
}

inline TraceTable assemble_table(const WeierstrassQ& curve, std::uint64_t x_max, std::vector<TraceRecord> records)
{
    TraceTable table;
    table.label = curve.label();
    table.x_max = x_max;
    for (const TraceRecord& r : records)
        if (r.source == TraceSource::BadPrime)
            table.bad.push_back({r.p, reduction_type(curve, r.p)});
    table.records = std::move(records);
    return table;
}

/// Complete trace table for every prime <= x_max.
///
/// With a cache path the run is resumable: a cache whose records form a prefix
/// of the primes is extended rather than recomputed, and the file is rewritten
/// exactly as a cold run would write it. A cache for another curve (or with
/// bad magic, or out-of-order records) raises CacheMismatch.
inline TraceTable trace_range(const WeierstrassQ& curve, std::uint64_t x_max, const ThresholdPolicy& policy = {},
                              const std::optional<std::filesystem::path>& cache_path = std::nullopt)
{
    if (x_max < 2)
        throw Error(ErrorCode::InvalidInput, "x_max must be at least 2");
    const std::vector<std::uint64_t> primes = sieve_primes(x_max);
    const cache::Digest hash = curve_hash(curve, policy.sign);

    std::vector<TraceRecord> records;
    records.reserve(primes.size());
    if (cache_path && std::filesystem::exists(*cache_path)) {
        const cache::Contents cached = cache::read_file(*cache_path);
        if (cached.hash != hash)
            throw Error(ErrorCode::CacheMismatch, cache_path->string() + " belongs to another curve");
        const std::size_t usable = std::min(cached.entries.size(), primes.size());
        for (std::size_t i = 0; i < usable; ++i) {
            const cache::Entry& e = cached.entries[i];
            if (e.p != primes[i])
                throw Error(ErrorCode::CacheMismatch, "cache records are not the consecutive primes");
            const TraceSource source =
                curve.is_good(e.p) ? select_source(curve, e.p, policy) : TraceSource::BadPrime;
            records.push_back({e.p, e.a_p, source});
        }
    }

    if (records.size() < primes.size()) {
        const std::span<const std::uint64_t> rest(primes.data() + records.size(), primes.size() - records.size());
        for (TraceRecord& r : compute_records(curve, rest, policy))
            records.push_back(r);
        if (cache_path) {
            cache::Contents out{hash, x_max, {}};
            out.entries.reserve(records.size());
            for (const TraceRecord& r : records)
                out.entries.push_back({r.p, static_cast<std::int32_t>(r.a_p)});
            cache::write_file(*cache_path, out);
        }
    }
    return assemble_table(curve, x_max, std::move(records));
}

/// Every good record satisfies a_p^2 <= 4p and every bad record lies in {-1, 0, 1}.
inline bool hasse_holds(const TraceTable& table)
{
    return std::all_of(table.records.begin(), table.records.end(), [](const TraceRecord& r) {
        return r.source == TraceSource::BadPrime ? (r.a_p >= -1 && r.a_p <= 1) : within_hasse(r.a_p, r.p);
    });
}

} // namespace traceforge
