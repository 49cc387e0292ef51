#pragma once

/// @file cm_engine.hpp
/// @brief Frobenius traces of CM curves with j = 0 (disc -3) or j = 1728 (disc -4).
///
/// At an inert prime the trace is zero. At a split prime every trace of a
/// twist of E is of the form +-t with 4p = t^2 - v^2 disc, and Cornacchia's
/// algorithm lists those t. The twist actually in hand is then picked out by
/// group-order elimination: a candidate t survives a random point P only if
/// (p + 1 - t) P = O. Ties left after sampling E are broken on the quadratic
/// twist, whose order is p + 1 + t. Ties that survive both are settled by an
/// exact point count restricted to the remaining candidates.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <utility>
#include <vector>

#include "traceforge/curve_model.hpp"
#include "traceforge/ec_point.hpp"
#include "traceforge/errors.hpp"
#include "traceforge/modarith.hpp"

namespace traceforge {

enum class CmDisc : int { MinusThree = -3, MinusFour = -4 };

struct NormSolution {
    std::uint64_t t = 0;
    std::uint64_t v = 0;
    friend bool operator==(const NormSolution&, const NormSolution&) = default;
};

struct NormSolutionSet {
    std::uint64_t p = 0;
    CmDisc disc = CmDisc::MinusFour;
    /// all essentially distinct positive solutions, t descending
    std::vector<NormSolution> solutions;
};

inline std::uint64_t abs_disc(CmDisc d) noexcept
{
    return static_cast<std::uint64_t>(-static_cast<int>(d));
}

/// True iff disc is a square mod p, i.e. p splits in the CM field.
inline bool is_split(std::uint64_t p, CmDisc disc)
{
    if (p == 2 || (disc == CmDisc::MinusThree && p == 3))
        throw Error(ErrorCode::InvalidInput, "p divides 2*disc");
    return disc == CmDisc::MinusThree ? p % 3 == 1 : p % 4 == 1;
}

/// All positive (t, v) with 4p = t^2 + |disc| v^2.
/// Cornacchia's reduction on (2p, sqrt(disc) mod p) yields one primitive
/// solution; the others are its images under the units of the CM order.
inline NormSolutionSet cornacchia(std::uint64_t p, CmDisc disc)
{
    if (!is_split(p, disc))
        throw Error(ErrorCode::NotSplit, "p = " + std::to_string(p) + " is inert");
    const std::uint64_t d = abs_disc(disc);
    const std::uint64_t four_p = 4 * p;

    std::uint64_t x0 = mod::sqrt(p - d % p, p);
    // x0 must have the parity of disc (odd for -3, even for -4)
    if ((x0 & 1U) != (d & 1U))
        x0 = p - x0;
    std::uint64_t a = 2 * p;
    std::uint64_t b = x0;
    const std::uint64_t limit = mod::isqrt(four_p);
    while (b > limit) {
        const std::uint64_t r = a % b;
        a = b;
        b = r;
    }
    const std::uint64_t rest = four_p - b * b;
    if (rest % d != 0)
        throw Error(ErrorCode::InvalidInput, "Cornacchia reduction failed");
    const std::uint64_t c = rest / d;
    const std::uint64_t y = mod::isqrt(c);
    if (y * y != c)
        throw Error(ErrorCode::InvalidInput, "Cornacchia reduction failed");

    NormSolutionSet out{p, disc, {}};
    auto push = [&](std::uint64_t t, std::uint64_t v) {
        if (t > 0 && v > 0 && t * t + d * v * v == four_p)
            out.solutions.push_back({t, v});
    };
    if (disc == CmDisc::MinusFour) {
        // t = 2a with p = a^2 + v^2; the unit i swaps a and v
        push(b, y);
        push(2 * y, b / 2);
    } else {
        // multiplication by the sixth roots of unity permutes (t +- v sqrt(-3))/2
        const std::int64_t t = static_cast<std::int64_t>(b), v = static_cast<std::int64_t>(y);
        push(b, y);
        push(static_cast<std::uint64_t>(std::abs(t + 3 * v) / 2), static_cast<std::uint64_t>(std::abs(t - v) / 2));
        push(static_cast<std::uint64_t>(std::abs(t - 3 * v) / 2), static_cast<std::uint64_t>(std::abs(t + v) / 2));
    }
    std::sort(out.solutions.begin(), out.solutions.end(),
              [](const NormSolution& l, const NormSolution& r) { return l.t > r.t; });
    out.solutions.erase(std::unique(out.solutions.begin(), out.solutions.end()), out.solutions.end());
    return out;
}

/// Mixes a run seed with p so that every prime gets its own reproducible stream.
inline std::uint64_t per_prime_seed(std::uint64_t seed, std::uint64_t p) noexcept
{
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (p + 1);
    z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31U);
}

struct CmOptions {
    /// points sampled on E before a lone survivor is accepted
    unsigned points = 6;
    /// total sampling rounds (E and twist) before giving up
    unsigned budget = 32;
    std::uint64_t seed = 0;
};

/// Trace of a reduced j = 0 / j = 1728 curve at p > 3.
inline std::int64_t cm_trace(const ReducedCurve& curve, CmDisc disc, const CmOptions& opts = {})
{
    const std::uint64_t p = curve.p;
    if (p <= 3 || !curve.is_short())
        throw Error(ErrorCode::InvalidInput, "cm_trace needs p > 3");
    if (curve.singular)
        throw Error(ErrorCode::SingularCurve, "singular reduction at p = " + std::to_string(p));
    if (!is_split(p, disc))
        return 0;

    std::vector<std::int64_t> candidates;
    for (const auto& s : cornacchia(p, disc).solutions) {
        candidates.push_back(static_cast<std::int64_t>(s.t));
        candidates.push_back(-static_cast<std::int64_t>(s.t));
    }

    const ShortCurve E(p, curve.short_form());
    const ShortCurve twist = E.quadratic_twist();
    std::mt19937_64 rng(per_prime_seed(opts.seed, p));
    const auto np1 = static_cast<std::int64_t>(p + 1);

    auto eliminate = [&](const ShortCurve& C, std::int64_t sign) {
        const Point P = C.random_point(rng);
        std::erase_if(candidates, [&](std::int64_t t) {
            return !C.multiply(P, static_cast<std::uint64_t>(np1 - sign * t)).infinity;
        });
    };

    unsigned round = 0;
    for (; round < opts.points && candidates.size() > 1; ++round)
        eliminate(E, 1);
    for (; round < opts.budget && candidates.size() > 1; ++round)
        eliminate(round % 2 == 0 ? twist : E, round % 2 == 0 ? -1 : 1);
    // confirm a lone survivor on the remaining quota of E points
    for (; round < opts.points && candidates.size() == 1; ++round)
        eliminate(E, 1);

    if (candidates.size() > 1) {
        // Both E and its quadratic twist can have small exponent (e.g. full
        // 2- or 4-torsion at small p), leaving candidates that no point can
        // separate. Such ties are settled by an exact character-sum count.
        std::int64_t sum = 0;
        const ShortForm& sf = curve.short_form();
        for (std::uint64_t x = 0; x < p; ++x)
            sum += mod::legendre(mod::add(mod::mul(mod::add(mod::mul(x, x, p), sf.A, p), x, p), sf.B, p), p);
        const std::int64_t exact = -sum;
        std::erase_if(candidates, [&](std::int64_t t) { return t != exact; });
    }
    if (candidates.size() != 1)
        throw Error(ErrorCode::NotEliminated,
                    std::to_string(candidates.size()) + " candidates left at p = " + std::to_string(p));
    return candidates.front();
}

} // namespace traceforge
