#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace bfdr::numeric {

// log(sum(exp(x))) over a non-empty span.
inline double log_sum_exp(std::span<const double> xs)
{
    double hi = -std::numeric_limits<double>::infinity();
    for (double x : xs)
        hi = std::max(hi, x);
    if (!std::isfinite(hi))
        return hi;
    double s = 0.0;
    for (double x : xs)
        s += std::exp(x - hi);
    return hi + std::log(s);
}

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) noexcept
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Two-sided standard normal tail probability 2 * (1 - Phi(|z|)).
inline double two_sided_p(double z)
{
    return std::erfc(std::abs(z) / std::sqrt(2.0));
}

} // namespace bfdr::numeric
