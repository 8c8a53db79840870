#include "bfdr/model.hpp"

#include <cmath>
#include <numeric>

namespace bfdr {

TestRecord TestRecord::from_bf(std::string id, double bf)
{
    TestRecord r;
    r.id = std::move(id);
    r.bf = bf;
    r.log_bf = bf > 0.0 ? std::log(bf) : std::nan("");
    return r;
}

TestRecord TestRecord::from_log_bf(std::string id, double log_bf)
{
    TestRecord r;
    r.id = std::move(id);
    r.log_bf = log_bf;
    r.bf = std::exp(log_bf);
    return r;
}

const std::vector<TestRecord>& validate_records(const std::vector<TestRecord>& records)
{
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TestRecord& r = records[i];
        const std::string where = " (record " + std::to_string(i) + ", id '" + r.id + "')";
        if (!(r.bf > 0.0))
            throw ValidationError(i, "bf", "bf must be positive" + where);
        if (!std::isfinite(r.log_bf))
            throw ValidationError(i, "bf", "bf must be finite" + where);
        if (r.z && !std::isfinite(*r.z))
            throw ValidationError(i, "z", "z must be finite" + where);
        if (r.se && !(*r.se > 0.0 && std::isfinite(*r.se)))
            throw ValidationError(i, "se", "se must be positive" + where);
    }
    return records;
}

std::string_view to_string(Pi0Method method)
{
    switch (method) {
    case Pi0Method::EBF: return "ebf";
    case Pi0Method::QBF: return "qbf";
    case Pi0Method::STOREY: return "storey";
    case Pi0Method::FIXED: return "fixed";
    }
    return "unknown";
}

Pi0Estimate Pi0Estimate::fixed(double pi0_hat, std::size_t m)
{
    Pi0Estimate e;
    e.pi0_hat = pi0_hat;
    e.method = Pi0Method::FIXED;
    e.m = m;
    e.check();
    return e;
}

void Pi0Estimate::check() const
{
    if (!(pi0_hat >= 0.0 && pi0_hat <= 1.0))
        throw std::invalid_argument("pi0_hat must lie in [0, 1]");
    if (method == Pi0Method::EBF) {
        if (!d0 || m == 0)
            throw std::invalid_argument("EBF estimate requires d0 and m");
        if (pi0_hat != static_cast<double>(*d0) / static_cast<double>(m))
            throw std::invalid_argument("EBF estimate must equal d0 / m");
    }
    if ((method == Pi0Method::QBF || method == Pi0Method::STOREY) && !gamma)
        throw std::invalid_argument("QBF and Storey estimates require gamma");
    if (gamma && !(*gamma > 0.0 && *gamma < 1.0))
        throw std::invalid_argument("gamma must lie in (0, 1)");
}

std::size_t SimTruth::n_alternative() const noexcept
{
    return std::accumulate(z.begin(), z.end(), std::size_t{0});
}

} // namespace bfdr
