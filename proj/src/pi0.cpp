#include "bfdr/pi0.hpp"

#include "bfdr/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace bfdr {

namespace {

void check_gamma(double gamma)
{
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("gamma must lie in (0, 1)");
}

double clamped_ratio(std::size_t count, std::size_t m, double gamma)
{
    return std::min(1.0, static_cast<double>(count) / (static_cast<double>(m) * gamma));
}

} // namespace

Pi0Estimate ebf_pi0(std::span<const double> bfs)
{
    if (bfs.empty())
        throw std::invalid_argument("EBF needs at least one Bayes factor");
    for (double b : bfs)
        if (!(b > 0.0))
            throw std::invalid_argument("Bayes factors must be positive");

    std::vector<double> sorted(bfs.begin(), bfs.end());
    std::sort(sorted.begin(), sorted.end());

    // Prefix means of an ascending sequence are non-decreasing, so the
    // qualifying prefixes form an initial segment.
    numeric::CompensatedSum sum;
    std::size_t d0 = 0;
    for (std::size_t d = 1; d <= sorted.size(); ++d) {
        if (std::isinf(sorted[d - 1]))
            break;
        sum.add(sorted[d - 1]);
        const double total = sum.value();
        if (!std::isfinite(total) || !(total < static_cast<double>(d)))
            break;
        d0 = d;
    }

    Pi0Estimate e;
    e.method = Pi0Method::EBF;
    e.m = bfs.size();
    e.d0 = d0;
    e.pi0_hat = static_cast<double>(d0) / static_cast<double>(e.m);
    e.empty_prefix = d0 == 0;
    return e;
}

Pi0Estimate ebf_pi0(const std::vector<TestRecord>& records)
{
    std::vector<double> bfs;
    bfs.reserve(records.size());
    for (const TestRecord& r : records)
        bfs.push_back(r.bf);
    return ebf_pi0(bfs);
}

Pi0Estimate qbf_pi0(std::span<const double> bfs, std::span<const double> null_quantiles, double gamma)
{
    check_gamma(gamma);
    if (bfs.size() != null_quantiles.size())
        throw std::invalid_argument("Bayes factors and null quantiles differ in length");
    if (bfs.empty())
        throw std::invalid_argument("QBF needs at least one Bayes factor");

    std::size_t count = 0;
    for (std::size_t i = 0; i < bfs.size(); ++i)
        if (bfs[i] <= null_quantiles[i])
            ++count;

    Pi0Estimate e;
    e.method = Pi0Method::QBF;
    e.gamma = gamma;
    e.m = bfs.size();
    e.pi0_hat = clamped_ratio(count, e.m, gamma);
    return e;
}

Pi0Estimate storey_pi0(std::span<const double> pvalues, double gamma)
{
    check_gamma(gamma);
    if (pvalues.empty())
        throw std::invalid_argument("Storey estimator needs at least one p-value");

    std::size_t count = 0;
    for (double p : pvalues) {
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("p-values must lie in [0, 1]");
        if (p > 1.0 - gamma)
            ++count;
    }

    Pi0Estimate e;
    e.method = Pi0Method::STOREY;
    e.gamma = gamma;
    e.m = pvalues.size();
    e.pi0_hat = clamped_ratio(count, e.m, gamma);
    return e;
}

double auto_reject_threshold(std::size_t m, double alpha)
{
    if (m == 0)
        throw std::invalid_argument("m must be at least 1");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must lie in (0, 1)");
    return static_cast<double>(m) / alpha;
}

} // namespace bfdr
