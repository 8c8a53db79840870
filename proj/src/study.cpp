#include "bfdr/study.hpp"

#include "bfdr/fdr_control.hpp"
#include "bfdr/numeric.hpp"
#include "bfdr/parallel.hpp"
#include "bfdr/pi0.hpp"
#include "bfdr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bfdr {

namespace {

MethodOutcome bayes_outcome(std::string name, const std::vector<TestRecord>& records, const Pi0Estimate& pi0,
                            double alpha, const SimTruth& truth)
{
    DecisionReport report = bfdr_decide(posterior_table(records, pi0), alpha);
    if (pi0.method == Pi0Method::EBF)
        report = apply_auto_reject(std::move(report), records, records.size(), alpha);
    return {std::move(name), pi0.pi0_hat, score(report.rejected, truth)};
}

std::vector<PValue> label(const std::vector<std::string>& ids, const std::vector<double>& ps)
{
    std::vector<PValue> out;
    out.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i)
        out.push_back({ids[i], ps[i]});
    return out;
}

void add_pvalue_outcomes(std::vector<MethodOutcome>& out, const std::string& suffix, const std::vector<PValue>& ps,
                         const StudyOptions& options, const SimTruth& truth)
{
    const PValueDecision bh = bh_decide(ps, options.alpha);
    out.push_back({"BH" + suffix, std::nullopt, score(bh.rejected, truth)});
    const PValueDecision st = storey_decide(ps, options.gamma, options.alpha);
    out.push_back({"Storey" + suffix, st.pi0, score(st.rejected, truth)});
}

std::string qbf_name(std::size_t perms)
{
    return "QBF(" + std::to_string(perms) + ")";
}

} // namespace

ReplicateI run_replicate_I(const SimIConfig& config, const StudyOptions& options)
{
    ReplicateI rep;
    rep.data = simulate_I(config, options.threads);
    const auto& records = rep.data.records;
    const std::size_t m = records.size();

    std::vector<double> bfs(m);
    rep.pvalues.resize(m);
    rep.null_quantiles.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        bfs[i] = records[i].bf;
        rep.pvalues[i] = numeric::two_sided_p(*records[i].z);
        rep.null_quantiles[i] = null_quantile_chi2(*records[i].se, options.gamma, config.grid);
    }

    const SimTruth& truth = rep.data.truth;
    rep.outcomes.push_back(bayes_outcome("EBF", records, ebf_pi0(bfs), options.alpha, truth));
    rep.outcomes.push_back(
        bayes_outcome("QBF", records, qbf_pi0(bfs, rep.null_quantiles, options.gamma), options.alpha, truth));
    add_pvalue_outcomes(rep.outcomes, "", label(truth.ids, rep.pvalues), options, truth);
    return rep;
}

std::uint64_t permutation_seed(std::uint64_t seed)
{
    return splitmix_mix(seed ^ 0x7065726d75746521ULL);
}

GeneRow analyze_gene(const GeneData& gene, double sigma, const StudyIIOptions& options, std::uint64_t perm_seed)
{
    const GeneModel model(gene.genotypes, sigma, options.grid);
    const GeneStatistics obs = observed_statistics(gene, model);

    GeneRow row;
    row.id = gene.id;
    row.n_variants = model.n_variants();
    row.log_bf = obs.log_bf;
    row.min_p = obs.min_p;

    std::size_t needed = options.pvalue_perms;
    for (std::size_t p : options.qbf_perms)
        needed = std::max(needed, p);
    if (needed == 0)
        return row;

    const PermutationDraws draws = permute(gene, model, needed, perm_seed);
    const std::span<const double> log_bfs(draws.log_bf);
    for (std::size_t p : options.qbf_perms)
        row.null_quantiles.push_back(std::exp(empirical_quantile(log_bfs.first(p), options.gamma)));
    if (options.pvalue_perms > 0) {
        row.p_bf = permutation_pvalue(obs.log_bf, log_bfs.first(options.pvalue_perms), PermStatistic::GeneBf);
        row.p_minp = permutation_pvalue(obs.min_p, std::span<const double>(draws.min_p).first(options.pvalue_perms),
                                        PermStatistic::MinP);
    }
    return row;
}

namespace {

ReplicateII decide_II(std::vector<GeneRow> rows, SimTruth truth, const StudyIIOptions& options)
{
    ReplicateII rep;
    rep.rows = std::move(rows);
    rep.truth = std::move(truth);
    const std::size_t m = rep.rows.size();

    std::vector<TestRecord> records;
    records.reserve(m);
    std::vector<double> bfs(m);
    for (std::size_t i = 0; i < m; ++i) {
        records.push_back(TestRecord::from_log_bf(rep.rows[i].id, rep.rows[i].log_bf));
        bfs[i] = records.back().bf;
    }
    rep.outcomes.push_back(bayes_outcome("EBF", records, ebf_pi0(bfs), options.alpha, rep.truth));

    for (std::size_t q = 0; q < options.qbf_perms.size(); ++q) {
        std::vector<double> quantiles(m);
        for (std::size_t i = 0; i < m; ++i)
            quantiles[i] = rep.rows[i].null_quantiles[q];
        rep.outcomes.push_back(bayes_outcome(qbf_name(options.qbf_perms[q]), records,
                                             qbf_pi0(bfs, quantiles, options.gamma), options.alpha, rep.truth));
    }

    if (options.pvalue_perms > 0) {
        std::vector<double> p_bf(m), p_minp(m);
        for (std::size_t i = 0; i < m; ++i) {
            p_bf[i] = rep.rows[i].p_bf;
            p_minp[i] = rep.rows[i].p_minp;
        }
        add_pvalue_outcomes(rep.outcomes, "(p_bf)", label(rep.truth.ids, p_bf), options, rep.truth);
        add_pvalue_outcomes(rep.outcomes, "(p_minp)", label(rep.truth.ids, p_minp), options, rep.truth);
    }
    return rep;
}

} // namespace

ReplicateII run_replicate_II(const SimIIConfig& config, const StudyIIOptions& options)
{
    config.check();
    const std::uint64_t perm_seed = permutation_seed(config.seed);
    std::vector<GeneRow> rows(config.m);
    SimTruth truth;
    truth.ids.resize(config.m);
    truth.z.resize(config.m);
    truth.params = SimParams{config.pi0, config.n, config.phi.low, config.phi.high, config.seed};

    parallel_for(config.m, options.threads, [&](std::size_t i) {
        const SimIIGene gene = simulate_II_gene(config, i);
        truth.ids[i] = gene.data.id;
        truth.z[i] = gene.alternative ? 1 : 0;
        rows[i] = analyze_gene(gene.data, config.sigma, options, perm_seed);
    });
    return decide_II(std::move(rows), std::move(truth), options);
}

ReplicateII analyze_replicate_II(const SimIIData& data, double sigma, const StudyIIOptions& options,
                                 std::uint64_t perm_seed)
{
    std::vector<GeneRow> rows(data.genes.size());
    parallel_for(data.genes.size(), options.threads,
                 [&](std::size_t i) { rows[i] = analyze_gene(data.genes[i], sigma, options, perm_seed); });
    return decide_II(std::move(rows), data.truth, options);
}

std::vector<AggregateRow> aggregate(const std::vector<std::vector<MethodOutcome>>& replicates)
{
    std::vector<AggregateRow> rows;
    if (replicates.empty())
        return rows;
    const auto& first = replicates.front();
    for (std::size_t k = 0; k < first.size(); ++k) {
        AggregateRow row;
        row.method = first[k].method;
        auto summarize = [&](auto get) {
            Summary s{0.0, std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
            for (const auto& rep : replicates) {
                if (rep.size() != first.size() || rep[k].method != row.method)
                    throw std::invalid_argument("replicates list different methods");
                const double v = get(rep[k]);
                s.mean += v;
                s.min = std::min(s.min, v);
                s.max = std::max(s.max, v);
            }
            s.mean /= static_cast<double>(replicates.size());
            return s;
        };
        if (first[k].pi0_hat)
            row.pi0_hat = summarize([](const MethodOutcome& o) { return o.pi0_hat.value_or(1.0); });
        row.fdp = summarize([](const MethodOutcome& o) { return o.eval.fdp; });
        row.fnp = summarize([](const MethodOutcome& o) { return o.eval.fnp; });
        rows.push_back(std::move(row));
    }
    return rows;
}

const MethodOutcome& find_outcome(const std::vector<MethodOutcome>& outcomes, const std::string& method)
{
    for (const MethodOutcome& o : outcomes)
        if (o.method == method)
            return o;
    throw std::out_of_range("no outcome for method " + method);
}

const AggregateRow& find_row(const std::vector<AggregateRow>& rows, const std::string& method)
{
    for (const AggregateRow& r : rows)
        if (r.method == method)
            return r;
    throw std::out_of_range("no aggregate row for method " + method);
}

} // namespace bfdr
