#pragma once

/// @file nagao_surface.hpp
/// @brief One-parameter families E_T over Q(T): fibral averages
/// A_p = (1/p) sum_{t mod p} a_p(E_t), Nagao's weighted prime sum, and the
/// rank-weighted sums over externally supplied fiber ranks.
///
/// a_p(E_t) is the character sum -sum_x chi(x^3 + A x + B) of the fiber's
/// short form mod p for every residue t, singular fibers included. On good
/// fibers this is the trace; on singular ones it is a bounded quantity.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "traceforge/curve_model.hpp"
#include "traceforge/errors.hpp"
#include "traceforge/modarith.hpp"
#include "traceforge/primes.hpp"
#include "traceforge/summation.hpp"
#include "traceforge/trace_engine.hpp"

namespace traceforge {

/// Integer polynomial, coefficients constant term first, no trailing zeros.
class Poly {
public:
    Poly() = default;
    Poly(std::vector<BigInt> coefficients) : c_(std::move(coefficients)) { trim(); }
    Poly(long long constant) : c_{BigInt(constant)} { trim(); }

    const std::vector<BigInt>& coefficients() const noexcept { return c_; }
    bool is_zero() const noexcept { return c_.empty(); }
    int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }

    BigInt operator()(const BigInt& t) const
    {
        BigInt v = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it)
            v = v * t + *it;
        return v;
    }

    /// Value at t mod p, in [0, p).
    std::uint64_t eval_mod(std::uint64_t t, std::uint64_t p) const
    {
        std::uint64_t v = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it)
            v = mod::add(mod::mul(v, t % p, p), residue(*it, p), p);
        return v;
    }

    friend Poly operator+(const Poly& l, const Poly& r)
    {
        std::vector<BigInt> c(std::max(l.c_.size(), r.c_.size()));
        for (std::size_t i = 0; i < l.c_.size(); ++i)
            c[i] += l.c_[i];
        for (std::size_t i = 0; i < r.c_.size(); ++i)
            c[i] += r.c_[i];
        return Poly(std::move(c));
    }
    friend Poly operator-(const Poly& p) { return Poly(-1) * p; }
    friend Poly operator-(const Poly& l, const Poly& r) { return l + (-r); }
    friend Poly operator*(const Poly& l, const Poly& r)
    {
        if (l.is_zero() || r.is_zero())
            return {};
        std::vector<BigInt> c(l.c_.size() + r.c_.size() - 1);
        for (std::size_t i = 0; i < l.c_.size(); ++i)
            for (std::size_t j = 0; j < r.c_.size(); ++j)
                c[i + j] += l.c_[i] * r.c_[j];
        return Poly(std::move(c));
    }
    friend bool operator==(const Poly&, const Poly&) = default;

private:
    void trim()
    {
        while (!c_.empty() && c_.back() == 0)
            c_.pop_back();
    }
    std::vector<BigInt> c_;
};

/// E_T : y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with a_i in Z[T].
class SurfaceFamily {
public:
    SurfaceFamily(std::array<Poly, 5> coefficients, std::string label = {})
        : a_(std::move(coefficients)), label_(std::move(label))
    {
        const auto& [a1, a2, a3, a4, a6] = a_;
        const Poly b2 = a1 * a1 + Poly(4) * a2;
        const Poly b4 = Poly(2) * a4 + a1 * a3;
        const Poly b6 = a3 * a3 + Poly(4) * a6;
        const Poly b8 = a1 * a1 * a6 + Poly(4) * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        disc_ = -(b2 * b2 * b8) - Poly(8) * b4 * b4 * b4 - Poly(27) * b6 * b6 + Poly(9) * b2 * b4 * b6;
        if (disc_.is_zero())
            throw Error(ErrorCode::SingularModel, "discriminant of family " + label_ + " vanishes identically");
    }

    /// Short family y^2 = x^3 + A(T) x + B(T).
    static SurfaceFamily short_form(Poly A, Poly B, std::string label = {})
    {
        return SurfaceFamily({Poly{}, Poly{}, Poly{}, std::move(A), std::move(B)}, std::move(label));
    }

    const std::array<Poly, 5>& coefficients() const noexcept { return a_; }
    const Poly& discriminant() const noexcept { return disc_; }
    const std::string& label() const noexcept { return label_; }

    /// Short-form coefficients (A, B) = (-27 c4, -54 c6) of the fiber at t mod p, p > 3.
    ShortForm fiber_short_form(std::uint64_t t, std::uint64_t p) const
    {
        std::array<std::uint64_t, 5> a{};
        for (std::size_t i = 0; i < 5; ++i)
            a[i] = a_[i].eval_mod(t, p);
        const auto [a1, a2, a3, a4, a6] = a;
        using mod::add, mod::sub, mod::mul;
        const std::uint64_t b2 = add(mul(a1, a1, p), mul(4, a2, p), p);
        const std::uint64_t b4 = add(mul(2, a4, p), mul(a1, a3, p), p);
        const std::uint64_t b6 = add(mul(a3, a3, p), mul(4, a6, p), p);
        const std::uint64_t c4 = sub(mul(b2, b2, p), mul(24, b4, p), p);
        const std::uint64_t c6 = add(sub(mul(36, mul(b2, b4, p), p), mul(b2, mul(b2, b2, p), p), p),
                                     mod::neg(mul(216, b6, p), p), p);
        return {mul(mod::neg(27 % p, p), c4, p), mul(mod::neg(54 % p, p), c6, p)};
    }

private:
    std::array<Poly, 5> a_;
    std::string label_;
    Poly disc_;
};

/// Marker for a fiber whose discriminant vanishes.
struct SingularFiber {
    BigInt t;
};

inline std::variant<WeierstrassQ, SingularFiber> specialize(const SurfaceFamily& family, const BigInt& t)
{
    if (family.discriminant()(t) == 0)
        return SingularFiber{t};
    std::array<BigInt, 5> a;
    for (std::size_t i = 0; i < 5; ++i)
        a[i] = family.coefficients()[i](t);
    return WeierstrassQ(std::move(a), family.label() + "@" + t.str());
}

/// Sum of the fiber character sums over t = 1..p, using a shared residue table.
inline std::int64_t fibral_trace_sum(const SurfaceFamily& family, std::uint64_t p, std::span<const std::int8_t> chi)
{
    std::int64_t total = 0;
    for (std::uint64_t t = 1; t <= p; ++t) {
        const ShortForm sf = family.fiber_short_form(t, p);
        total += character_sum_trace(sf.A, sf.B, p, chi);
    }
    return total;
}

/// A_p = (1/p) sum_{t=1}^{p} a_p(E_t).
inline double fibral_average(const SurfaceFamily& family, std::uint64_t p)
{
    if (p <= 3)
        throw Error(ErrorCode::InvalidInput, "fibral average needs p > 3");
    const auto chi = mod::residue_table(p);
    return static_cast<double>(fibral_trace_sum(family, p, chi)) / static_cast<double>(p);
}

struct FibralAverage {
    std::uint64_t p = 0;
    std::int64_t trace_sum = 0;  ///< sum_{t=1}^{p} a_p(E_t); A_p = trace_sum / p
};

/// Fibral trace sums for all primes 5 <= p <= X, ascending, spread over workers.
inline std::vector<FibralAverage> fibral_averages(const SurfaceFamily& family, std::uint64_t X, unsigned workers = 1)
{
    std::vector<FibralAverage> out;
    if (X < 5)
        return out;
    for (std::uint64_t p : sieve_primes(X))
        if (p >= 5)
            out.push_back({p, 0});
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        try {
            for (std::size_t i; (i = next.fetch_add(1)) < out.size();) {
                const auto chi = mod::residue_table(out[i].p);
                out[i].trace_sum = fibral_trace_sum(family, out[i].p, chi);
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure)
                failure = std::current_exception();
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 1; w < std::max(1U, workers); ++w)
            pool.emplace_back(work);
        work();
    }
    if (failure)
        std::rethrow_exception(failure);
    return out;
}

/// -(1/X) sum_{5 <= p <= X} A_p log p, accumulated in ascending p.
inline double nagao_sum(const SurfaceFamily& family, std::uint64_t X, unsigned workers = 1)
{
    if (X < 5)
        return 0.0;
    CompensatedSum s;
    for (const FibralAverage& f : fibral_averages(family, X, workers)) {
        const auto p = static_cast<double>(f.p);
        s += static_cast<double>(f.trace_sum) / p * std::log(p);
    }
    return -s.value() / static_cast<double>(X);
}

/// Externally supplied fiber ranks r_t.
struct RankFile {
    std::map<std::int64_t, unsigned> ranks;
};

struct RankWeightedSums {
    double modified = 0.0;  ///< (1/X) sum_{t<=X} (r_t - 1/2) log(X/t)
    double average = 0.0;   ///< (1/X) sum_{t<=X} r_t
};

inline RankWeightedSums rank_weighted_sums(const RankFile& file, std::uint64_t X)
{
    if (X == 0)
        throw Error(ErrorCode::InvalidInput, "X must be positive");
    CompensatedSum modified, total;
    const auto dx = static_cast<double>(X);
    for (std::uint64_t t = 1; t <= X; ++t) {
        const auto it = file.ranks.find(static_cast<std::int64_t>(t));
        if (it == file.ranks.end())
            throw Error(ErrorCode::MissingRank, "no rank for t = " + std::to_string(t));
        const double r = it->second;
        modified += (r - 0.5) * std::log(dx / static_cast<double>(t));
        total += r;
    }
    return {modified.value() / dx, total.value() / dx};
}

} // namespace traceforge
