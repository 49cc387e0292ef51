#pragma once

/// @file curve_model.hpp
/// @brief Integral Weierstrass models over Q, their standard invariants,
/// reduction modulo p and the classification of bad reduction.
///
/// Reduction types are computed on the model exactly as given; the model is
/// assumed minimal at every prime (all curves in the bundled corpus are).

#include <array>
#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <variant>

#include <boost/multiprecision/cpp_int.hpp>

#include "traceforge/errors.hpp"
#include "traceforge/modarith.hpp"

namespace traceforge {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Residue of an arbitrary-precision integer in [0, p).
inline std::uint64_t residue(const BigInt& value, std::uint64_t p)
{
    BigInt r = value % p;
    if (r < 0)
        r += p;
    return static_cast<std::uint64_t>(r);
}

struct Invariants {
    BigInt b2, b4, b6, b8;
    BigInt c4, c6;
    BigInt discriminant;
    BigRational j;
};

/// Standard b-, c-invariants, discriminant and j of [a1,a2,a3,a4,a6].
/// j is left at zero when the discriminant vanishes.
template <class Int>
Invariants compute_invariants(const std::array<Int, 5>& a)
{
    const BigInt a1 = a[0], a2 = a[1], a3 = a[2], a4 = a[3], a6 = a[4];
    Invariants inv;
    inv.b2 = a1 * a1 + 4 * a2;
    inv.b4 = 2 * a4 + a1 * a3;
    inv.b6 = a3 * a3 + 4 * a6;
    inv.b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    inv.c4 = inv.b2 * inv.b2 - 24 * inv.b4;
    inv.c6 = -inv.b2 * inv.b2 * inv.b2 + 36 * inv.b2 * inv.b4 - 216 * inv.b6;
    inv.discriminant = -inv.b2 * inv.b2 * inv.b8 - 8 * inv.b4 * inv.b4 * inv.b4 - 27 * inv.b6 * inv.b6
        + 9 * inv.b2 * inv.b4 * inv.b6;
    if (inv.discriminant != 0) {
        const BigInt num = inv.c4 * inv.c4 * inv.c4;
        inv.j = inv.discriminant > 0 ? BigRational(num, inv.discriminant) : BigRational(-num, -inv.discriminant);
    }
    return inv;
}

/// An elliptic curve over Q given by an integral long Weierstrass model.
/// Immutable; construction rejects singular models.
class WeierstrassQ {
public:
    WeierstrassQ(std::array<BigInt, 5> coefficients, std::string label = {})
        : a_(std::move(coefficients)), label_(std::move(label)), inv_(compute_invariants(a_))
    {
        if (inv_.discriminant == 0)
            throw Error(ErrorCode::SingularModel, "discriminant of " + canonical_string() + " is zero");
    }

    const std::array<BigInt, 5>& coefficients() const noexcept { return a_; }
    const BigInt& a1() const noexcept { return a_[0]; }
    const BigInt& a2() const noexcept { return a_[1]; }
    const BigInt& a3() const noexcept { return a_[2]; }
    const BigInt& a4() const noexcept { return a_[3]; }
    const BigInt& a6() const noexcept { return a_[4]; }
    const std::string& label() const noexcept { return label_; }
    const Invariants& invariants() const noexcept { return inv_; }
    const BigInt& discriminant() const noexcept { return inv_.discriminant; }

    bool is_good(std::uint64_t p) const { return residue(inv_.discriminant, p) != 0; }

    /// j = 0 (c4 = 0) or j = 1728 (c6 = 0): the two CM families handled by cm_engine.
    bool j_is_zero() const { return inv_.c4 == 0; }
    bool j_is_1728() const { return inv_.c6 == 0; }

    /// "[a1,a2,a3,a4,a6]" in plain decimal without spaces.
    std::string canonical_string() const
    {
        std::ostringstream os;
        os << '[';
        for (std::size_t i = 0; i < a_.size(); ++i)
            os << (i ? "," : "") << a_[i];
        os << ']';
        return os.str();
    }

private:
    std::array<BigInt, 5> a_;
    std::string label_;
    Invariants inv_;
};

/// y^2 = x^3 + A x + B over F_p, p > 3.
struct ShortForm {
    std::uint64_t A = 0;
    std::uint64_t B = 0;
    friend bool operator==(const ShortForm&, const ShortForm&) = default;
};

/// y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over F_p, used for p in {2, 3}.
struct LongForm {
    std::array<std::uint64_t, 5> a{};
    friend bool operator==(const LongForm&, const LongForm&) = default;
};

struct ReducedCurve {
    std::uint64_t p = 0;
    std::variant<ShortForm, LongForm> form;
    bool singular = false;

    bool is_short() const noexcept { return std::holds_alternative<ShortForm>(form); }
    const ShortForm& short_form() const { return std::get<ShortForm>(form); }
    const LongForm& long_form() const { return std::get<LongForm>(form); }
};

/// Short form y^2 = x^3 - 27 c4 x - 54 c6 (reached from the long form by
/// (x, y) -> (36x + 3b2, 108(2y + a1 x + a3)), a bijection on affine points for p > 3).
inline ShortForm short_form_from_invariants(const BigInt& c4, const BigInt& c6, std::uint64_t p)
{
    return ShortForm{mod::mul(mod::neg(27 % p, p), residue(c4, p), p),
                     mod::mul(mod::neg(54 % p, p), residue(c6, p), p)};
}

inline ReducedCurve reduce_mod_p(const WeierstrassQ& curve, std::uint64_t p)
{
    ReducedCurve out;
    out.p = p;
    out.singular = !curve.is_good(p);
    if (p > 3) {
        out.form = short_form_from_invariants(curve.invariants().c4, curve.invariants().c6, p);
    } else {
        LongForm lf;
        for (std::size_t i = 0; i < 5; ++i)
            lf.a[i] = residue(curve.coefficients()[i], p);
        out.form = lf;
    }
    return out;
}

enum class ReductionType { Good, SplitMultiplicative, NonsplitMultiplicative, Additive };

constexpr const char* to_string(ReductionType t) noexcept
{
    switch (t) {
    case ReductionType::Good: return "good";
    case ReductionType::SplitMultiplicative: return "split";
    case ReductionType::NonsplitMultiplicative: return "nonsplit";
    case ReductionType::Additive: return "additive";
    }
    return "?";
}

namespace detail {

/// Roots in F_p of w^2 + b w + c, counted without multiplicity, p tiny.
inline int count_roots_small(std::uint64_t b, std::uint64_t c, std::uint64_t p)
{
    int roots = 0;
    for (std::uint64_t w = 0; w < p; ++w)
        if ((w * w + b * w + c) % p == 0)
            ++roots;
    return roots;
}

/// Split test at p in {2, 3}: find the singular point of the long form and
/// factor its tangent cone w^2 + a1 u w - (3 x0 + a2) u^2 over F_p.
inline bool tangent_cone_splits_small(const LongForm& lf, std::uint64_t p)
{
    const auto [a1, a2, a3, a4, a6] = lf.a;
    for (std::uint64_t x = 0; x < p; ++x) {
        for (std::uint64_t y = 0; y < p; ++y) {
            const std::uint64_t lhs = (y * y + a1 * x * y + a3 * y) % p;
            const std::uint64_t rhs = (x * x * x + a2 * x * x + a4 * x + a6) % p;
            const std::uint64_t fy = (2 * y + a1 * x + a3) % p;
            // partial in x of F = lhs - rhs, with -k written as (p-1)k
            const std::uint64_t fx = (a1 * y + (p - 1) * (3 * x * x + 2 * a2 * x + a4)) % p;
            if (lhs == rhs && fx == 0 && fy == 0) {
                const std::uint64_t c = mod::neg((3 * x + a2) % p, p);
                return count_roots_small(a1, c, p) == 2;
            }
        }
    }
    return false;
}

} // namespace detail

/// Reduction type at p on the given (assumed minimal) model.
inline ReductionType reduction_type(const WeierstrassQ& curve, std::uint64_t p)
{
    if (curve.is_good(p))
        return ReductionType::Good;
    if (residue(curve.invariants().c4, p) == 0)
        return ReductionType::Additive;
    const ReducedCurve rc = reduce_mod_p(curve, p);
    bool split = false;
    if (p > 3) {
        // node at (x0, 0) with x0 = -3B / (2A); f(x0 + u) = u^2 (u + 3 x0)
        const auto [A, B] = rc.short_form();
        const std::uint64_t x0 = mod::mul(mod::neg(mod::mul(3, B, p), p), mod::inv(mod::mul(2, A, p), p), p);
        split = mod::legendre(mod::mul(3, x0, p), p) == 1;
    } else {
        split = detail::tangent_cone_splits_small(rc.long_form(), p);
    }
    return split ? ReductionType::SplitMultiplicative : ReductionType::NonsplitMultiplicative;
}

/// Sign convention for multiplicative reduction. Standard: +1 split, -1 non-split.
enum class BadPrimeSign { Standard, Flipped };

inline int bad_prime_trace(ReductionType t, BadPrimeSign sign = BadPrimeSign::Standard)
{
    const int flip = sign == BadPrimeSign::Flipped ? -1 : 1;
    switch (t) {
    case ReductionType::Additive: return 0;
    case ReductionType::SplitMultiplicative: return flip;
    case ReductionType::NonsplitMultiplicative: return -flip;
    case ReductionType::Good: break;
    }
    throw Error(ErrorCode::InvalidInput, "bad_prime_trace called for a prime of good reduction");
}

} // namespace traceforge
