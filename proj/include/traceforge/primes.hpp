#pragma once

/// @file primes.hpp
/// @brief Segmented sieve of Eratosthenes over odd numbers.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "traceforge/modarith.hpp"

namespace traceforge {

/// All primes <= bound in ascending order. Memory is O(sqrt(bound) + segment).
inline std::vector<std::uint64_t> sieve_primes(std::uint64_t bound)
{
    std::vector<std::uint64_t> primes;
    if (bound < 2)
        return primes;
    primes.push_back(2);
    if (bound < 3)
        return primes;

    const std::uint64_t root = mod::isqrt(bound);
    // base primes up to sqrt(bound) with a plain sieve
    std::vector<bool> small(root + 1, true);
    std::vector<std::uint64_t> base;
    for (std::uint64_t i = 3; i <= root; i += 2) {
        if (!small[i])
            continue;
        base.push_back(i);
        for (std::uint64_t j = i * i; j <= root; j += 2 * i)
            small[j] = false;
    }

    constexpr std::uint64_t segment_bytes = 1U << 16;
    std::vector<std::uint8_t> seg(segment_bytes);
    // next odd multiple to strike for each base prime
    std::vector<std::uint64_t> next(base.size());
    for (std::size_t i = 0; i < base.size(); ++i)
        next[i] = base[i] * base[i];

    // segment k covers odd numbers low, low+2, ..., low + 2*(segment_bytes-1)
    for (std::uint64_t low = 3; low <= bound; low += 2 * segment_bytes) {
        const std::uint64_t high = std::min(bound, low + 2 * (segment_bytes - 1));
        const std::uint64_t count = (high - low) / 2 + 1;
        std::fill(seg.begin(), seg.begin() + static_cast<std::ptrdiff_t>(count), 1);
        for (std::size_t i = 0; i < base.size(); ++i) {
            const std::uint64_t step = 2 * base[i];
            std::uint64_t j = next[i];
            for (; j <= high; j += step)
                seg[(j - low) / 2] = 0;
            next[i] = j;
        }
        for (std::uint64_t k = 0; k < count; ++k)
            if (seg[k] != 0)
                primes.push_back(low + 2 * k);
    }
    return primes;
}

/// Deterministic primality test for 64-bit inputs (Miller-Rabin with the
/// first twelve prime bases).
inline bool is_prime(std::uint64_t n)
{
    if (n < 2)
        return false;
    for (std::uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % q == 0)
            return n == q;
    }
    std::uint64_t d = n - 1;
    unsigned s = 0;
    while ((d & 1U) == 0) {
        d >>= 1U;
        ++s;
    }
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        std::uint64_t x = mod::pow(a, d, n);
        if (x == 1 || x == n - 1)
            continue;
        bool composite = true;
        for (unsigned r = 1; r < s; ++r) {
            x = mod::mul(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite)
            return false;
    }
    return true;
}

} // namespace traceforge
