#pragma once

/// @file lseries_sums.hpp
/// @brief Dirichlet coefficients c_n of -L'/L and the prime sums built from
/// them: S(x), psi_E, the Kuo-Murty sums, the OBSD log-product, the weighted
/// rank sum, truncated Euler products, and checkpointed series of each.
///
/// c_{p^m} is alpha^m + beta^m at good p, produced by the Newton recurrence
/// c_{p^m} = a_p c_{p^{m-1}} - p c_{p^{m-2}} (c_1 = a_p, c_{p^0} = 2), and a_p^m
/// at bad p. alpha and beta are never formed as complex numbers.
///
/// Every sum is accumulated in ascending n with CompensatedSum. A pointwise
/// evaluation and a streaming series use the same accumulator in the same
/// order, so their values agree bit for bit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "traceforge/errors.hpp"
#include "traceforge/summation.hpp"
#include "traceforge/trace_engine.hpp"

namespace traceforge {

/// c_{p^m} for m >= 1. Int may be a fixed-width or arbitrary-precision integer.
template <class Int>
Int cn_prime_power(const Int& a_p, const Int& p, unsigned m, bool good)
{
    if (m == 0)
        return good ? Int(2) : Int(1);
    if (!good) {
        Int c = a_p;
        for (unsigned k = 1; k < m; ++k)
            c *= a_p;
        return c;
    }
    Int prev = 2;
    Int cur = a_p;
    for (unsigned k = 1; k < m; ++k) {
        Int next = a_p * cur - p * prev;
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

/// One term n = p^m of the von Mangoldt-weighted expansion.
struct PrimePower {
    std::uint64_t n = 0;
    std::uint64_t p = 0;
    unsigned m = 1;
    std::int64_t c = 0;
    bool good = true;
    double log_p = 0.0;
};

/// All prime powers n <= limit of the table's primes, ascending in n.
inline std::vector<PrimePower> prime_powers(const TraceTable& table, double limit)
{
    std::vector<PrimePower> out;
    if (limit < 2)
        return out;
    const auto cap = static_cast<std::uint64_t>(std::min(limit, static_cast<double>(table.x_max)));
    std::vector<PrimePower> higher;
    for (const TraceRecord& r : table.records) {
        if (r.p > cap)
            break;
        const bool good = r.source != TraceSource::BadPrime;
        const double lp = std::log(static_cast<double>(r.p));
        out.push_back({r.p, r.p, 1, r.a_p, good, lp});
        if (r.p > cap / r.p)
            continue;
        const auto p = static_cast<std::int64_t>(r.p);
        std::int64_t prev = good ? 2 : 1;
        std::int64_t cur = r.a_p;
        std::uint64_t n = r.p;
        for (unsigned m = 2; n <= cap / r.p; ++m) {
            n *= r.p;
            const std::int64_t next = good ? r.a_p * cur - p * prev : r.a_p * cur;
            prev = cur;
            cur = next;
            higher.push_back({n, r.p, m, cur, good, lp});
        }
    }
    std::sort(higher.begin(), higher.end(), [](const PrimePower& l, const PrimePower& r) { return l.n < r.n; });
    std::vector<PrimePower> merged;
    merged.reserve(out.size() + higher.size());
    std::merge(out.begin(), out.end(), higher.begin(), higher.end(), std::back_inserter(merged),
               [](const PrimePower& l, const PrimePower& r) { return l.n < r.n; });
    return merged;
}

enum class SumKind {
    S,
    Psi,
    KuoMurtyWeighted,
    KuoMurtyLog,
    ObsdLogProduct,
    WeightedRankSum,
    CramerIntegral,
    CrossIdentity,
};

constexpr std::string_view to_string(SumKind k) noexcept
{
    switch (k) {
    case SumKind::S: return "s";
    case SumKind::Psi: return "psi";
    case SumKind::KuoMurtyWeighted: return "kuo-murty-weighted";
    case SumKind::KuoMurtyLog: return "kuo-murty";
    case SumKind::ObsdLogProduct: return "obsd";
    case SumKind::WeightedRankSum: return "weighted-rank";
    case SumKind::CramerIntegral: return "cramer";
    case SumKind::CrossIdentity: return "cross-identity";
    }
    return "?";
}

/// Incremental state of one named sum. feed() takes prime powers in ascending
/// n; value(x) reads the sum at x once every term belonging to x was fed.
class SumAccumulator {
public:
    explicit SumAccumulator(SumKind kind) : kind_(kind) {}

    SumKind kind() const noexcept { return kind_; }

    /// Terms with n == x belong to the sum at x, except for the OBSD product
    /// which runs over p < x.
    bool includes(std::uint64_t n, double x) const noexcept
    {
        const auto dn = static_cast<double>(n);
        return kind_ == SumKind::ObsdLogProduct ? dn < x : dn <= x;
    }

    void feed(const PrimePower& t)
    {
        const auto n = static_cast<double>(t.n);
        const auto c = static_cast<double>(t.c);
        switch (kind_) {
        case SumKind::S:
            if (t.m == 1 && t.good)
                main_ += c * t.log_p / n;
            break;
        case SumKind::Psi:
            main_ += c * t.log_p;
            break;
        case SumKind::KuoMurtyWeighted:
            if (t.good)
                main_ += c / t.m;
            break;
        case SumKind::KuoMurtyLog:
            if (t.good)
                main_ += c * t.log_p;
            break;
        case SumKind::ObsdLogProduct:
            if (t.m == 1 && t.good) {
                const std::int64_t np = static_cast<std::int64_t>(t.p) + 1 - t.c;
                if (np <= 0)
                    throw Error(ErrorCode::DegenerateFiber, "N_p = 0 at p = " + std::to_string(t.p));
                main_ += std::log1p(static_cast<double>(1 - t.c) / n);
            }
            break;
        case SumKind::WeightedRankSum:
            if (t.good)
                main_ += c / (t.m * n) * t.log_p;
            break;
        case SumKind::CramerIntegral: {
            // psi is constant on [last_, n); integral of psi^2 / t^3 there
            const double psi = main_.value();
            if (last_ > 0)
                aux_ += psi * psi * (1.0 / (last_ * last_) - 1.0 / (n * n)) / 2.0;
            main_ += c * t.log_p;
            last_ = n;
            break;
        }
        case SumKind::CrossIdentity:
            main_ += c * t.log_p / n;
            if (t.m == 1 && t.good)
                aux_ += c * t.log_p / n;
            break;
        }
    }

    double value(double x) const
    {
        switch (kind_) {
        case SumKind::S:
            return main_.value() / std::log(x);
        case SumKind::CramerIntegral: {
            if (x <= 2)
                return 0.0;
            const double psi = main_.value();
            double integral = aux_.value();
            if (last_ > 0)
                integral += psi * psi * (1.0 / (last_ * last_) - 1.0 / (x * x)) / 2.0;
            return integral / std::log(x);
        }
        case SumKind::CrossIdentity:
            return x < 2 ? 0.0 : main_.value() - aux_.value() + 0.5 * std::log(x);
        default:
            return main_.value();
        }
    }

private:
    SumKind kind_;
    CompensatedSum main_;
    CompensatedSum aux_;
    double last_ = 0.0;
};

namespace detail {

inline void require_in_table(const TraceTable& table, double x)
{
    if (x > static_cast<double>(table.x_max))
        throw Error(ErrorCode::OutOfRange,
                    "x = " + std::to_string(x) + " exceeds table bound " + std::to_string(table.x_max));
}

inline double evaluate(const TraceTable& table, SumKind kind, double x)
{
    require_in_table(table, x);
    SumAccumulator acc(kind);
    for (const PrimePower& t : prime_powers(table, x)) {
        if (!acc.includes(t.n, x))
            break;
        acc.feed(t);
    }
    return acc.value(x);
}

} // namespace detail

/// psi_E(t) = sum_{n <= t} c_n Lambda(n), bad primes included.
inline double psi_of(const TraceTable& table, double t)
{
    return detail::evaluate(table, SumKind::Psi, t);
}

/// S(x) = (1/log x) sum_{p <= x, p good} a_p log p / p.
inline double s_of_x(const TraceTable& table, double x)
{
    if (x < 2)
        throw Error(ErrorCode::OutOfRange, "S(x) needs x >= 2");
    return detail::evaluate(table, SumKind::S, x);
}

struct KuoMurty {
    double weighted = 0.0;     ///< sum over good p^k <= x of c_{p^k} / k
    double logweighted = 0.0;  ///< sum over good p^k <= x of c_{p^k} log p
};

inline KuoMurty kuo_murty_sums(const TraceTable& table, double x)
{
    return {detail::evaluate(table, SumKind::KuoMurtyWeighted, x),
            detail::evaluate(table, SumKind::KuoMurtyLog, x)};
}

/// sum_{p < x, p good} log(N_p / p); its slope against log log x estimates r.
inline double obsd_log_product(const TraceTable& table, double x)
{
    return detail::evaluate(table, SumKind::ObsdLogProduct, x);
}

/// sum over good p^k <= x of c_{p^k} log p / (k p^k); divided by log x it estimates -r.
inline double weighted_rank_sum(const TraceTable& table, double x)
{
    return detail::evaluate(table, SumKind::WeightedRankSum, x);
}

/// Truncated Euler product at real s > 3/2 over the primes p <= x.
inline double euler_product_eval(const TraceTable& table, double s, double x)
{
    if (!(s > 1.5))
        throw Error(ErrorCode::InvalidInput, "Euler product needs s > 3/2");
    detail::require_in_table(table, x);
    double product = 1.0;
    for (const TraceRecord& r : table.records) {
        if (static_cast<double>(r.p) > x)
            break;
        const auto p = static_cast<double>(r.p);
        const double ps = std::pow(p, -s);
        const double factor = r.source == TraceSource::BadPrime
            ? 1.0 - static_cast<double>(r.a_p) * ps
            : 1.0 - static_cast<double>(r.a_p) * ps + p * ps * ps;
        product /= factor;
    }
    return product;
}

/// The same truncation through the Dirichlet expansion of log L:
/// exp( sum_{p <= x} sum_{k >= 1} c_{p^k} / (k p^{ks}) ), each local series
/// summed until its terms drop below double resolution.
inline double euler_log_expansion(const TraceTable& table, double s, double x)
{
    if (!(s > 1.5))
        throw Error(ErrorCode::InvalidInput, "Euler product needs s > 3/2");
    detail::require_in_table(table, x);
    CompensatedSum total;
    for (const TraceRecord& r : table.records) {
        if (static_cast<double>(r.p) > x)
            break;
        const bool good = r.source != TraceSource::BadPrime;
        const auto p = static_cast<double>(r.p);
        const auto a = static_cast<double>(r.a_p);
        const double ps = std::pow(p, -s);
        // c_{p^k} p^{-ks} via the scaled recurrence u_k = a ps u_{k-1} - p ps^2 u_{k-2}
        double prev = good ? 2.0 : 1.0;
        double cur = a * ps;
        CompensatedSum local;
        for (unsigned k = 1; k < 400; ++k) {
            const double term = cur / k;
            local += term;
            if (std::abs(term) < 1e-20 && std::abs(prev) < 1e-20)
                break;
            const double next = good ? a * ps * cur - p * ps * ps * prev : a * ps * cur;
            prev = cur;
            cur = next;
        }
        total += local.value();
    }
    return std::exp(total.value());
}

/// Checkpoint grid x_k = start * 10^(k / per_decade) up to stop; stop itself is
/// appended when it is not already the last point.
inline std::vector<double> geometric_grid(double start, double stop, unsigned per_decade)
{
    if (!(start >= 2) || stop < start || per_decade == 0)
        throw Error(ErrorCode::InvalidInput, "bad geometric grid");
    std::vector<double> xs;
    for (unsigned k = 0;; ++k) {
        const double x = start * std::pow(10.0, static_cast<double>(k) / per_decade);
        // snap the point that lands on stop up to rounding
        if (x >= stop * (1 - 1e-12)) {
            if (x <= stop * (1 + 1e-12))
                xs.push_back(stop);
            break;
        }
        xs.push_back(x);
    }
    if (xs.back() < stop)
        xs.push_back(stop);
    return xs;
}

struct SumSeries {
    SumKind kind = SumKind::S;
    std::string label;
    std::vector<std::pair<double, double>> checkpoints;
};

/// Evaluates one sum at every grid point in a single ascending pass.
inline SumSeries series_sample(const TraceTable& table, SumKind kind, std::vector<double> grid)
{
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    if (grid.empty())
        throw Error(ErrorCode::InvalidInput, "empty grid");
    if (grid.front() < 2)
        throw Error(ErrorCode::OutOfRange, "grid starts below 2");
    detail::require_in_table(table, grid.back());

    SumSeries series{kind, table.label, {}};
    SumAccumulator acc(kind);
    const std::vector<PrimePower> terms = prime_powers(table, grid.back());
    std::size_t next = 0;
    for (double x : grid) {
        while (next < terms.size() && acc.includes(terms[next].n, x))
            acc.feed(terms[next++]);
        series.checkpoints.emplace_back(x, acc.value(x));
    }
    return series;
}

struct RankEstimate {
    double r_hat = 0.0;
    long r_rounded = 0;
};

/// r_hat = 1/2 - S(x_last), from the limit S(x) -> -r + 1/2.
inline RankEstimate rank_estimate(const SumSeries& series)
{
    if (series.checkpoints.empty())
        throw Error(ErrorCode::EmptySeries, "no checkpoints");
    if (series.kind != SumKind::S)
        throw Error(ErrorCode::InvalidInput, "rank_estimate needs an S(x) series");
    const double r_hat = 0.5 - series.checkpoints.back().second;
    return {r_hat, std::max(0L, std::lround(r_hat))};
}

/// Ordinary least-squares slope of y against x.
inline double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys)
{
    const auto n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
}

/// Slope of the OBSD log-product against log log x over a checkpointed series.
inline double obsd_slope(const SumSeries& series, double lo, double hi)
{
    std::vector<double> xs, ys;
    for (const auto& [x, v] : series.checkpoints) {
        if (x < lo || x > hi)
            continue;
        xs.push_back(std::log(std::log(x)));
        ys.push_back(v);
    }
    if (xs.size() < 2)
        throw Error(ErrorCode::EmptySeries, "fewer than two checkpoints in the fit window");
    return least_squares_slope(xs, ys);
}

/// Per-prime comparison of c_{p^2} from the recurrence with a_p^2 - 2p, over
/// good p <= sqrt(x).
struct PrimeSquareCheck {
    std::size_t primes = 0;
    std::size_t mismatches = 0;
    double recurrence_sum = 0.0;  ///< sum c_{p^2} log p / p^2
    double formula_sum = 0.0;     ///< sum (a_p^2 - 2p) log p / p^2
};

inline PrimeSquareCheck prime_square_identity(const TraceTable& table, double x)
{
    detail::require_in_table(table, x);
    PrimeSquareCheck out;
    CompensatedSum rec, formula;
    const double root = std::sqrt(x);
    for (const TraceRecord& r : table.records) {
        if (static_cast<double>(r.p) > root)
            break;
        if (r.source == TraceSource::BadPrime)
            continue;
        const auto p = static_cast<std::int64_t>(r.p);
        const std::int64_t c2 = cn_prime_power<std::int64_t>(r.a_p, p, 2, true);
        const std::int64_t f2 = r.a_p * r.a_p - 2 * p;
        ++out.primes;
        if (c2 != f2)
            ++out.mismatches;
        const double w = std::log(static_cast<double>(p)) / static_cast<double>(p * p);
        rec += static_cast<double>(c2) * w;
        formula += static_cast<double>(f2) * w;
    }
    out.recurrence_sum = rec.value();
    out.formula_sum = formula.value();
    return out;
}

} // namespace traceforge
