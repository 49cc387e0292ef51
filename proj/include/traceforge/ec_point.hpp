#pragma once

/// @file ec_point.hpp
/// @brief Affine point arithmetic on y^2 = x^3 + A x + B over F_p (p > 3),
/// random point sampling and exact point orders.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "traceforge/curve_model.hpp"
#include "traceforge/modarith.hpp"

namespace traceforge {

struct Point {
    std::uint64_t x = 0;
    std::uint64_t y = 0;
    bool infinity = true;

    static Point at_infinity() noexcept { return {}; }
    static Point affine(std::uint64_t x, std::uint64_t y) noexcept { return {x, y, false}; }
    friend bool operator==(const Point&, const Point&) = default;
};

class ShortCurve {
public:
    ShortCurve(std::uint64_t p, ShortForm f) : p_(p), a_(f.A), b_(f.B) {}

    std::uint64_t p() const noexcept { return p_; }
    std::uint64_t A() const noexcept { return a_; }
    std::uint64_t B() const noexcept { return b_; }

    std::uint64_t rhs(std::uint64_t x) const noexcept
    {
        return mod::add(mod::mul(mod::add(mod::mul(x, x, p_), a_, p_), x, p_), b_, p_);
    }

    bool contains(const Point& P) const noexcept
    {
        return P.infinity || mod::mul(P.y, P.y, p_) == rhs(P.x);
    }

    Point negate(const Point& P) const noexcept
    {
        return P.infinity ? P : Point::affine(P.x, mod::neg(P.y, p_));
    }

    Point add(const Point& P, const Point& Q) const noexcept
    {
        if (P.infinity)
            return Q;
        if (Q.infinity)
            return P;
        std::uint64_t lambda = 0;
        if (P.x == Q.x) {
            if (P.y != Q.y || P.y == 0)
                return Point::at_infinity();
            const std::uint64_t num = mod::add(mod::mul(3, mod::mul(P.x, P.x, p_), p_), a_, p_);
            lambda = mod::mul(num, mod::inv(mod::mul(2, P.y, p_), p_), p_);
        } else {
            lambda = mod::mul(mod::sub(Q.y, P.y, p_), mod::inv(mod::sub(Q.x, P.x, p_), p_), p_);
        }
        const std::uint64_t x3 = mod::sub(mod::sub(mod::mul(lambda, lambda, p_), P.x, p_), Q.x, p_);
        const std::uint64_t y3 = mod::sub(mod::mul(lambda, mod::sub(P.x, x3, p_), p_), P.y, p_);
        return Point::affine(x3, y3);
    }

    Point dbl(const Point& P) const noexcept { return add(P, P); }

    Point multiply(const Point& P, std::uint64_t k) const noexcept
    {
        Point result = Point::at_infinity();
        Point base = P;
        while (k != 0) {
            if (k & 1U)
                result = add(result, base);
            base = dbl(base);
            k >>= 1U;
        }
        return result;
    }

    /// Uniformly random x with x^3 + Ax + B a square; y chosen as either root.
    template <class Rng>
    Point random_point(Rng& rng) const
    {
        std::uniform_int_distribution<std::uint64_t> dist(0, p_ - 1);
        for (;;) {
            const std::uint64_t x = dist(rng);
            const std::uint64_t f = rhs(x);
            const int chi = mod::legendre(f, p_);
            if (chi == -1)
                continue;
            std::uint64_t y = mod::sqrt(f, p_);
            if ((rng() & 1U) != 0)
                y = mod::neg(y, p_);
            return Point::affine(x, y);
        }
    }

    /// Quadratic twist by a non-residue d: y^2 = x^3 + d^2 A x + d^3 B.
    ShortCurve quadratic_twist() const
    {
        std::uint64_t d = 2;
        while (mod::legendre(d, p_) != -1)
            ++d;
        const std::uint64_t d2 = mod::mul(d, d, p_);
        return ShortCurve(p_, ShortForm{mod::mul(d2, a_, p_), mod::mul(mod::mul(d2, d, p_), b_, p_)});
    }

private:
    std::uint64_t p_;
    std::uint64_t a_;
    std::uint64_t b_;
};

/// Distinct prime factors of n by trial division (n up to ~10^16 at desk scale).
inline std::vector<std::uint64_t> prime_factors(std::uint64_t n)
{
    std::vector<std::uint64_t> out;
    for (std::uint64_t q = 2; q * q <= n; q += (q == 2 ? 1 : 2)) {
        if (n % q != 0)
            continue;
        out.push_back(q);
        while (n % q == 0)
            n /= q;
    }
    if (n > 1)
        out.push_back(n);
    return out;
}

/// Reduces a known multiple of ord(P) to the exact order of P.
inline std::uint64_t order_from_multiple(const ShortCurve& E, const Point& P, std::uint64_t multiple)
{
    std::uint64_t order = multiple;
    for (std::uint64_t q : prime_factors(multiple)) {
        while (order % q == 0 && E.multiply(P, order / q).infinity)
            order /= q;
    }
    return order;
}

/// Baby-step giant-step search for some k in [low, high] with k P = O.
/// Baby steps store x(jP) for j in [1, m]; giant steps walk centres
/// c = low + m + s(2m+1) and match x(cP) against the table, using x(jP) = x(-jP).
inline std::optional<std::uint64_t> bsgs_multiple(const ShortCurve& E, const Point& P, std::uint64_t low,
                                                  std::uint64_t high)
{
    if (P.infinity)
        return low;
    const std::uint64_t width = high - low + 1;
    const std::uint64_t m = std::max<std::uint64_t>(1, mod::isqrt(width / 2) + 1);

    struct Baby {
        std::uint64_t x;
        std::uint64_t y;
        std::uint64_t j;
    };
    std::vector<Baby> baby;
    baby.reserve(m);
    Point jP = P;
    for (std::uint64_t j = 1; j <= m; ++j) {
        if (jP.infinity) {
            // ord(P) = j <= m; any multiple of j inside the interval will do
            const std::uint64_t k = (low + j - 1) / j * j;
            if (k <= high)
                return k;
            return std::nullopt;
        }
        baby.push_back({jP.x, jP.y, j});
        jP = E.add(jP, P);
    }
    std::sort(baby.begin(), baby.end(), [](const Baby& l, const Baby& r) { return l.x < r.x; });

    const Point step = E.multiply(P, 2 * m + 1);
    std::uint64_t centre = low + m;
    Point R = E.multiply(P, centre);
    while (centre <= high + m) {
        if (R.infinity) {
            if (centre >= low && centre <= high)
                return centre;
        } else {
            auto it = std::lower_bound(baby.begin(), baby.end(), R.x,
                                       [](const Baby& b, std::uint64_t x) { return b.x < x; });
            for (; it != baby.end() && it->x == R.x; ++it) {
                // R = jP  =>  (c - j)P = O ;  R = -jP  =>  (c + j)P = O
                if (R.y == it->y && centre - it->j >= low && centre - it->j <= high)
                    return centre - it->j;
                if (R.y == mod::neg(it->y, E.p()) && centre + it->j >= low && centre + it->j <= high)
                    return centre + it->j;
            }
        }
        centre += 2 * m + 1;
        R = E.add(R, step);
    }
    return std::nullopt;
}

} // namespace traceforge
