#include "bfdr/permutation.hpp"

#include "bfdr/numeric.hpp"
#include "bfdr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace bfdr {

namespace {

void check_gene(const GeneData& gene, const GeneModel& model)
{
    if (static_cast<std::size_t>(gene.y.size()) != model.n_samples())
        throw std::invalid_argument("phenotype length does not match genotype rows for '" + gene.id + "'");
    if (!gene.y.allFinite())
        throw std::invalid_argument("phenotype contains non-finite values for '" + gene.id + "'");
}

double min_p_from_z(std::span<const double> z)
{
    double max_abs = 0.0;
    for (double v : z)
        max_abs = std::max(max_abs, std::abs(v));
    return numeric::two_sided_p(max_abs);
}

} // namespace

void PermutationPlan::check() const
{
    if (n_perms < 1)
        throw std::invalid_argument("n_perms must be at least 1");
}

double empirical_quantile(std::span<const double> values, double gamma)
{
    if (values.empty())
        throw std::invalid_argument("empirical quantile of an empty sample");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("gamma must lie in (0, 1)");
    const double n = static_cast<double>(values.size());
    // Guard against gamma * n landing a rounding error above an integer.
    auto rank = static_cast<std::size_t>(std::ceil(gamma * n - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    std::vector<double> v(values.begin(), values.end());
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(rank - 1), v.end());
    return v[rank - 1];
}

double permutation_pvalue(double observed, std::span<const double> permuted, PermStatistic statistic)
{
    if (permuted.empty())
        throw std::invalid_argument("permutation p-value needs at least one permutation");
    std::size_t extreme = 0;
    for (double s : permuted) {
        if (statistic == PermStatistic::GeneBf ? s >= observed : s <= observed)
            ++extreme;
    }
    return static_cast<double>(1 + extreme) / static_cast<double>(permuted.size() + 1);
}

double min_p_statistic(const Eigen::VectorXd& y, const Eigen::MatrixXd& genotypes, double sigma)
{
    const GeneModel model(genotypes, sigma, OmegaGrid{});
    GeneData gene{"", y, {}};
    check_gene(gene, model);
    std::vector<double> z(model.n_variants());
    model.z_scores(std::span<const double>(y.data(), model.n_samples()), z);
    return min_p_from_z(z);
}

GeneStatistics observed_statistics(const GeneData& gene, const GeneModel& model)
{
    check_gene(gene, model);
    std::vector<double> z(model.n_variants());
    model.z_scores(std::span<const double>(gene.y.data(), model.n_samples()), z);
    return {model.log_bf(z), min_p_from_z(z)};
}

PermutationDraws permute(const GeneData& gene, const GeneModel& model, std::size_t n_perms,
                         std::uint64_t seed)
{
    check_gene(gene, model);
    const std::size_t n = model.n_samples();
    CounterRng rng(stream_key(seed, gene.id));

    std::vector<double> y(gene.y.data(), gene.y.data() + n);
    std::vector<double> z(model.n_variants());
    PermutationDraws out;
    out.log_bf.reserve(n_perms);
    out.min_p.reserve(n_perms);
    for (std::size_t p = 0; p < n_perms; ++p) {
        // Fisher-Yates; shuffling the previous arrangement is still uniform.
        for (std::size_t i = n - 1; i > 0; --i) {
            std::uniform_int_distribution<std::size_t> pick(0, i);
            std::swap(y[i], y[pick(rng)]);
        }
        model.z_scores(y, z);
        out.log_bf.push_back(model.log_bf(z));
        out.min_p.push_back(min_p_from_z(z));
    }
    return out;
}

double permute_null_quantile(const GeneData& gene, double sigma, const OmegaGrid& grid, double gamma,
                             const PermutationPlan& plan)
{
    plan.check();
    if (plan.statistic != PermStatistic::GeneBf)
        throw std::invalid_argument("null quantiles are defined for the gene Bayes factor statistic");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("gamma must lie in (0, 1)");
    const GeneModel model(gene.genotypes, sigma, grid);
    const PermutationDraws draws = permute(gene, model, plan.n_perms, plan.seed);
    return std::exp(empirical_quantile(draws.log_bf, gamma));
}

double permutation_pvalue(double observed, const GeneData& gene, double sigma, const OmegaGrid& grid,
                          const PermutationPlan& plan)
{
    plan.check();
    const GeneModel model(gene.genotypes, sigma, grid);
    const PermutationDraws draws = permute(gene, model, plan.n_perms, plan.seed);
    if (plan.statistic == PermStatistic::MinP)
        return permutation_pvalue(observed, draws.min_p, PermStatistic::MinP);
    std::vector<double> bfs;
    bfs.reserve(draws.log_bf.size());
    for (double lb : draws.log_bf)
        bfs.push_back(std::exp(lb));
    return permutation_pvalue(observed, bfs, PermStatistic::GeneBf);
}

} // namespace bfdr
