#pragma once

/// @file summation.hpp
/// @brief Compensated floating-point accumulation.

#include <cmath>

namespace traceforge {

/// Neumaier's variant of Kahan summation: the running compensation also
/// captures the low-order bits lost when a term is larger than the sum.
class CompensatedSum {
public:
    constexpr CompensatedSum() = default;
    explicit constexpr CompensatedSum(double initial) : sum_(initial) {}

    void add(double term) noexcept
    {
        const double t = sum_ + term;
        if (std::abs(sum_) >= std::abs(term))
            comp_ += (sum_ - t) + term;
        else
            comp_ += (term - t) + sum_;
        sum_ = t;
    }

    CompensatedSum& operator+=(double term) noexcept
    {
        add(term);
        return *this;
    }

    constexpr double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace traceforge
