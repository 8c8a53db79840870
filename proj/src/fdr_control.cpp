#include "bfdr/fdr_control.hpp"

#include "bfdr/numeric.hpp"
#include "bfdr/pi0.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace bfdr {

namespace {

void check_alpha(double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must lie in (0, 1)");
}

double posterior(double log_bf, double pi0)
{
    if (pi0 <= 0.0)
        return 1.0;
    if (pi0 >= 1.0)
        return 0.0;
    const double log_odds_null = std::log(pi0) - std::log1p(-pi0) - log_bf;
    return 1.0 / (1.0 + std::exp(log_odds_null));
}

std::vector<std::string> ids_in_input_order(const std::vector<std::string>& all_ids,
                                            const std::vector<char>& mask)
{
    std::vector<std::string> out;
    for (std::size_t i = 0; i < all_ids.size(); ++i)
        if (mask[i])
            out.push_back(all_ids[i]);
    return out;
}

void check_pvalues(const std::vector<PValue>& pvalues)
{
    for (const PValue& pv : pvalues)
        if (!(pv.p >= 0.0 && pv.p <= 1.0))
            throw std::invalid_argument("p-value for '" + pv.id + "' outside [0, 1]");
}

// Step-up on ascending p-values: the largest rank i (1-based) satisfying
// scale * m * p_(i) <= alpha * i. Everything at or below that rank is
// rejected, including ties with p_(i).
PValueDecision step_up(const std::vector<PValue>& pvalues, double alpha, double pi0)
{
    check_alpha(alpha);
    check_pvalues(pvalues);
    const std::size_t m = pvalues.size();
    PValueDecision d;
    d.alpha = alpha;
    d.pi0 = pi0;
    d.q_values.assign(m, 1.0);
    if (m == 0)
        return d;

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pvalues[a].p < pvalues[b].p;
    });

    const double md = static_cast<double>(m);
    std::size_t cut = 0;
    for (std::size_t r = 1; r <= m; ++r)
        if (pi0 * md * pvalues[order[r - 1]].p <= alpha * static_cast<double>(r))
            cut = r;

    // q-values: running minimum from the top of pi0 * m * p_(j) / j.
    double running = 1.0;
    for (std::size_t r = m; r >= 1; --r) {
        const double q = pi0 * md * pvalues[order[r - 1]].p / static_cast<double>(r);
        running = std::min(running, q);
        d.q_values[order[r - 1]] = running;
    }

    std::vector<char> mask(m, 0);
    if (cut > 0) {
        d.p_cutoff = pvalues[order[cut - 1]].p;
        for (std::size_t i = 0; i < m; ++i)
            mask[i] = pvalues[i].p <= d.p_cutoff;
    }
    std::vector<std::string> ids;
    ids.reserve(m);
    for (const PValue& pv : pvalues)
        ids.push_back(pv.id);
    d.rejected = ids_in_input_order(ids, mask);
    return d;
}

} // namespace

PosteriorTable posterior_table(const std::vector<TestRecord>& records, const Pi0Estimate& pi0)
{
    validate_records(records);
    pi0.check();
    PosteriorTable table;
    table.pi0 = pi0;
    table.entries.reserve(records.size());
    for (const TestRecord& r : records)
        table.entries.push_back({r.id, posterior(r.log_bf, pi0.pi0_hat)});
    return table;
}

DecisionReport bfdr_decide(const PosteriorTable& table, double alpha)
{
    check_alpha(alpha);
    const auto& e = table.entries;
    const std::size_t m = e.size();

    DecisionReport report;
    report.alpha = alpha;
    report.threshold = 1.0;
    if (m == 0)
        return report;

    // Descending v; ties broken by id so the walk is reproducible.
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (e[a].v_hat != e[b].v_hat)
            return e[a].v_hat > e[b].v_hat;
        return e[a].id < e[b].id;
    });

    numeric::CompensatedSum mass;
    std::size_t cut = 0;
    double cut_bfdr = 0.0;
    std::size_t r = 0;
    while (r < m && e[order[r]].v_hat > 0.0) {
        const double v = e[order[r]].v_hat;
        std::size_t end = r;
        while (end < m && e[order[end]].v_hat == v) {
            mass.add(1.0 - v);
            ++end;
        }
        const double mean = mass.value() / static_cast<double>(end);
        if (mean <= alpha) {
            cut = end;
            cut_bfdr = mean;
        }
        r = end;
    }

    std::vector<char> mask(m, 0);
    for (std::size_t i = 0; i < cut; ++i)
        mask[order[i]] = 1;
    report.threshold = cut < m ? e[order[cut]].v_hat : 0.0;
    report.estimated_bfdr = cut > 0 ? cut_bfdr : 0.0;
    for (std::size_t i = 0; i < m; ++i)
        if (mask[i])
            report.rejected.push_back(e[i].id);
    return report;
}

DecisionReport apply_auto_reject(DecisionReport report, const std::vector<TestRecord>& records,
                                 std::size_t m, double alpha)
{
    if (records.empty())
        return report;
    const double log_threshold = std::log(auto_reject_threshold(m, alpha));
    std::unordered_set<std::string> rejected(report.rejected.begin(), report.rejected.end());
    std::unordered_set<std::string> autos(report.auto_rejected.begin(), report.auto_rejected.end());

    std::vector<std::string> merged;
    for (const TestRecord& r : records) {
        const bool is_auto = r.log_bf >= log_threshold;
        if (is_auto && !autos.contains(r.id)) {
            report.auto_rejected.push_back(r.id);
            autos.insert(r.id);
        }
        if (is_auto && !rejected.contains(r.id)) {
            rejected.insert(r.id);
            merged.push_back(r.id);
        }
    }
    if (!merged.empty()) {
        // Keep input order.
        std::vector<std::string> ordered;
        for (const TestRecord& r : records)
            if (rejected.contains(r.id))
                ordered.push_back(r.id);
        report.rejected = std::move(ordered);
    }
    return report;
}

PValueDecision bh_decide(const std::vector<PValue>& pvalues, double alpha)
{
    return step_up(pvalues, alpha, 1.0);
}

PValueDecision storey_decide(const std::vector<PValue>& pvalues, double gamma, double alpha,
                             std::optional<double> pi0_override)
{
    double pi0 = 1.0;
    if (pi0_override) {
        if (!(*pi0_override >= 0.0 && *pi0_override <= 1.0))
            throw std::invalid_argument("pi0 override must lie in [0, 1]");
        pi0 = *pi0_override;
    } else if (!pvalues.empty()) {
        std::vector<double> ps;
        ps.reserve(pvalues.size());
        for (const PValue& pv : pvalues)
            ps.push_back(pv.p);
        pi0 = storey_pi0(ps, gamma).pi0_hat;
    }
    return step_up(pvalues, alpha, pi0);
}

} // namespace bfdr
