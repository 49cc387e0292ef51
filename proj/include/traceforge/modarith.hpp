#pragma once

/// @file modarith.hpp
/// @brief Word-size modular arithmetic over F_p: products, powers, inverses,
/// the quadratic character and square roots.
///
/// All routines take residues already reduced into [0, p) and a modulus
/// p < 2^63. Products go through unsigned __int128, so no Montgomery setup is
/// needed and the functions stay usable for a one-off prime.

#include <cmath>
#include <cstdint>
#include <vector>

namespace traceforge::mod {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

constexpr u64 add(u64 a, u64 b, u64 p) noexcept
{
    u64 s = a + b;
    return s >= p ? s - p : s;
}

constexpr u64 sub(u64 a, u64 b, u64 p) noexcept
{
    return a >= b ? a - b : a + p - b;
}

constexpr u64 neg(u64 a, u64 p) noexcept
{
    return a == 0 ? 0 : p - a;
}

constexpr u64 mul(u64 a, u64 b, u64 p) noexcept
{
    return static_cast<u64>(static_cast<u128>(a) * b % p);
}

constexpr u64 pow(u64 base, u64 exp, u64 p) noexcept
{
    u64 result = 1 % p;
    base %= p;
    while (exp != 0) {
        if (exp & 1U)
            result = mul(result, base, p);
        base = mul(base, base, p);
        exp >>= 1U;
    }
    return result;
}

/// Reduces a signed value into [0, p).
constexpr u64 reduce(i64 a, u64 p) noexcept
{
    i64 r = a % static_cast<i64>(p);
    return static_cast<u64>(r < 0 ? r + static_cast<i64>(p) : r);
}

/// Inverse of a nonzero residue by the extended Euclidean algorithm.
constexpr u64 inv(u64 a, u64 p) noexcept
{
    i64 t = 0, new_t = 1;
    i64 r = static_cast<i64>(p), new_r = static_cast<i64>(a);
    while (new_r != 0) {
        i64 q = r / new_r;
        i64 tmp = t - q * new_t;
        t = new_t;
        new_t = tmp;
        tmp = r - q * new_r;
        r = new_r;
        new_r = tmp;
    }
    return t < 0 ? static_cast<u64>(t + static_cast<i64>(p)) : static_cast<u64>(t);
}

/// Quadratic character (Legendre symbol) of a mod an odd prime p, with chi(0) = 0.
/// Uses the binary Jacobi recursion.
constexpr int legendre(u64 a, u64 p) noexcept
{
    a %= p;
    if (a == 0)
        return 0;
    u64 n = p;
    int sign = 1;
    while (a != 0) {
        while ((a & 1U) == 0) {
            a >>= 1U;
            u64 r = n & 7U;
            if (r == 3 || r == 5)
                sign = -sign;
        }
        u64 tmp = a;
        a = n;
        n = tmp;
        if ((a & 3U) == 3 && (n & 3U) == 3)
            sign = -sign;
        a %= n;
    }
    return n == 1 ? sign : 0;
}

/// Square root of a quadratic residue modulo an odd prime (Tonelli-Shanks).
/// The caller guarantees legendre(a, p) != -1.
constexpr u64 sqrt(u64 a, u64 p) noexcept
{
    a %= p;
    if (a == 0)
        return 0;
    if ((p & 3U) == 3)
        return pow(a, (p + 1) / 4, p);
    u64 q = p - 1;
    unsigned s = 0;
    while ((q & 1U) == 0) {
        q >>= 1U;
        ++s;
    }
    u64 z = 2;
    while (legendre(z, p) != -1)
        ++z;
    u64 c = pow(z, q, p);
    u64 x = pow(a, (q + 1) / 2, p);
    u64 t = pow(a, q, p);
    unsigned m = s;
    while (t != 1) {
        unsigned i = 0;
        u64 t2 = t;
        while (t2 != 1) {
            t2 = mul(t2, t2, p);
            ++i;
        }
        u64 b = c;
        for (unsigned j = 0; j + i + 1 < m; ++j)
            b = mul(b, b, p);
        x = mul(x, b, p);
        c = mul(b, b, p);
        t = mul(t, c, p);
        m = i;
    }
    return x;
}

/// Floor of the square root of n, exact for all 64-bit inputs.
inline u64 isqrt(u64 n) noexcept
{
    if (n < 2)
        return n;
    u64 x = static_cast<u64>(std::sqrt(static_cast<double>(n)));
    while (static_cast<u128>(x) * x > n)
        --x;
    while (static_cast<u128>(x + 1) * (x + 1) <= n)
        ++x;
    return x;
}

/// Table of chi_p(r) for every residue r in [0, p); chi(0) = 0.
/// Built by marking the squares (x+1)^2 = x^2 + 2x + 1 incrementally, so only
/// additions are performed.
inline std::vector<std::int8_t> residue_table(u64 p)
{
    std::vector<std::int8_t> chi(p, -1);
    chi[0] = 0;
    if (p == 2) {
        chi[1] = 1;
        return chi;
    }
    u64 sq = 0;
    for (u64 x = 0; x < (p - 1) / 2; ++x) {
        sq = add(sq, add(add(x, x, p), 1, p), p);
        chi[sq] = 1;
    }
    return chi;
}

} // namespace traceforge::mod
