#pragma once

/// @file analytic_checks.hpp
/// @brief Diagnostics tying psi_E to the zeros of L_E: the Cramer integral,
/// the zero sum from externally supplied ordinates, the short-interval witness
/// search, and the drift monitor for the explicit-formula cross identity.

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "traceforge/errors.hpp"
#include "traceforge/lseries_sums.hpp"
#include "traceforge/summation.hpp"
#include "traceforge/trace_engine.hpp"

namespace traceforge {

/// Zeros of L_E on the line Re s = 1, written rho = 1 + i gamma with gamma > 0
/// (the conjugates are implied), plus the order of vanishing at s = 1.
struct ZeroList {
    unsigned central = 0;
    std::vector<double> ordinates;
    std::vector<unsigned> multiplicities;

    void validate() const
    {
        if (ordinates.size() != multiplicities.size())
            throw Error(ErrorCode::InvalidInput, "ordinate and multiplicity counts differ");
        for (std::size_t i = 0; i < ordinates.size(); ++i) {
            if (!(ordinates[i] > 0) || (i > 0 && !(ordinates[i] > ordinates[i - 1])))
                throw Error(ErrorCode::InvalidInput, "ordinates must be positive and strictly increasing");
            if (multiplicities[i] == 0)
                throw Error(ErrorCode::InvalidInput, "multiplicities must be positive");
        }
    }
};

/// (1/log x) * integral_2^x psi_E(t)^2 / t^3 dt, integrated exactly step by step.
inline double cramer_integral(const TraceTable& table, double x)
{
    if (!(x > 2))
        throw Error(ErrorCode::OutOfRange, "Cramer integral needs x > 2");
    return detail::evaluate(table, SumKind::CramerIntegral, x);
}

/// r^2 + 2 sum_{0 < gamma <= cutoff} n^2 / (1 + gamma^2): sum over all zeros of |n_rho / rho|^2.
inline double zero_sum(const ZeroList& zeros, double cutoff)
{
    CompensatedSum s;
    for (std::size_t i = 0; i < zeros.ordinates.size(); ++i) {
        const double g = zeros.ordinates[i];
        if (g > cutoff)
            break;
        const double n = zeros.multiplicities[i];
        s += 2.0 * n * n / (1.0 + g * g);
    }
    const double r = zeros.central;
    return r * r + s.value();
}

struct CramerWitness {
    double t = 0.0;
    double ratio = 0.0;
    bool passes = false;
};

/// Looks for t in [x, 2x] with |psi_E(t)| < c t sqrt(log t). psi_E is a step
/// function, so on each constant piece the ratio is smallest at the right end;
/// the candidates are x, the largest double below every breakpoint (where the
/// pre-jump value still holds), every breakpoint, and 2x.
inline CramerWitness cramer_witness(const TraceTable& table, double x, double c)
{
    if (!(x >= 2))
        throw Error(ErrorCode::OutOfRange, "witness search needs x >= 2");
    detail::require_in_table(table, 2 * x);
    const std::vector<PrimePower> terms = prime_powers(table, 2 * x);

    CramerWitness best{x, std::numeric_limits<double>::infinity(), false};
    auto consider = [&](double t, double psi) {
        const double ratio = std::abs(psi) / (t * std::sqrt(std::log(t)));
        if (ratio < best.ratio)
            best = {t, ratio, false};
    };

    CompensatedSum psi;
    std::size_t i = 0;
    for (; i < terms.size() && static_cast<double>(terms[i].n) <= x; ++i)
        psi += static_cast<double>(terms[i].c) * terms[i].log_p;
    consider(x, psi.value());
    for (; i < terms.size(); ++i) {
        const auto n = static_cast<double>(terms[i].n);
        consider(std::max(x, std::nextafter(n, 0.0)), psi.value());
        psi += static_cast<double>(terms[i].c) * terms[i].log_p;
        consider(n, psi.value());
    }
    consider(2 * x, psi.value());
    best.passes = best.ratio < c;
    return best;
}

/// sum_{n <= x} c_n Lambda(n) / n - sum_{p <= x, good} a_p log p / p + (1/2) log x.
/// Bounded in x up to an additive constant; compare values across x.
inline double cross_identity_residual(const TraceTable& table, double x)
{
    return detail::evaluate(table, SumKind::CrossIdentity, x);
}

} // namespace traceforge
