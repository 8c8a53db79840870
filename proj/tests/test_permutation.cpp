#include "bfdr/permutation.hpp"

#include "bfdr/numeric.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace bfdr;

namespace {

GeneData random_gene(std::uint64_t seed, int n, int k, double effect)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::uniform_int_distribution<int> dose(0, 2);
    GeneData g;
    g.id = "gene" + std::to_string(seed);
    g.genotypes.resize(n, k);
    g.y.resize(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < k; ++j)
            g.genotypes(i, j) = dose(rng);
        g.y(i) = effect * g.genotypes(i, 0) + nd(rng);
    }
    return g;
}

double coefficient_of_variation(const std::vector<double>& v)
{
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v)
        ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1)) / mean;
}

} // namespace

TEST_CASE("empirical_quantile uses the type-1 order statistic")
{
    std::vector<double> stub(101);
    std::iota(stub.begin(), stub.end(), 1.0);
    std::shuffle(stub.begin(), stub.end(), std::mt19937_64(4));
    CHECK(empirical_quantile(stub, 0.5) == 51.0);
    CHECK(empirical_quantile(stub, 0.01) == 2.0);
    CHECK(empirical_quantile(std::vector<double>{7.0}, 0.9) == 7.0);
    std::vector<double> ten(10);
    std::iota(ten.begin(), ten.end(), 1.0);
    CHECK(empirical_quantile(ten, 0.3) == 3.0);
    CHECK(empirical_quantile(ten, 0.5) == 5.0);
    CHECK_THROWS(empirical_quantile(std::vector<double>{}, 0.5));
}

TEST_CASE("permutation_pvalue add-one estimator")
{
    std::vector<double> perms(99);
    std::iota(perms.begin(), perms.end(), 0.0);
    CHECK(permutation_pvalue(1000.0, perms, PermStatistic::GeneBf) == doctest::Approx(0.01));
    CHECK(permutation_pvalue(-1.0, perms, PermStatistic::GeneBf) == 1.0);
    CHECK(permutation_pvalue(3.0, std::vector<double>{3.0}, PermStatistic::GeneBf) == 1.0);
    CHECK(permutation_pvalue(-1.0, perms, PermStatistic::MinP) == doctest::Approx(0.01));
    CHECK(permutation_pvalue(0.5, std::vector<double>{0.5}, PermStatistic::MinP) == 1.0);
}

TEST_CASE("permute_null_quantile examples")
{
    const OmegaGrid grid;
    const GeneData gene = random_gene(1, 40, 4, 0.0);
    const GeneModel model(gene.genotypes, 1.0, grid);

    PermutationPlan one{1, 9, PermStatistic::GeneBf};
    const PermutationDraws d = permute(gene, model, 1, 9);
    CHECK(permute_null_quantile(gene, 1.0, grid, 0.1, one) == doctest::Approx(std::exp(d.log_bf[0])));
    CHECK(permute_null_quantile(gene, 1.0, grid, 0.9, one) == doctest::Approx(std::exp(d.log_bf[0])));

    GeneData flat = gene;
    flat.y.setConstant(2.5);
    const double obs = std::exp(observed_statistics(flat, model).log_bf);
    CHECK(permute_null_quantile(flat, 1.0, grid, 0.5, PermutationPlan{50, 3, PermStatistic::GeneBf}) == obs);

    CHECK_THROWS(permute_null_quantile(gene, 1.0, grid, 0.5, PermutationPlan{0, 3, PermStatistic::GeneBf}));
}

TEST_CASE("permutations are deterministic and nested")
{
    const OmegaGrid grid;
    const GeneData gene = random_gene(2, 60, 10, 0.3);
    const GeneModel model(gene.genotypes, 1.0, grid);
    const PermutationDraws a = permute(gene, model, 500, 123);
    const PermutationDraws b = permute(gene, model, 500, 123);
    CHECK(a.log_bf == b.log_bf);
    CHECK(a.min_p == b.min_p);
    const PermutationDraws c = permute(gene, model, 100, 123);
    CHECK(std::equal(c.log_bf.begin(), c.log_bf.end(), a.log_bf.begin()));
    const PermutationDraws d = permute(gene, model, 100, 124);
    CHECK(c.log_bf != d.log_bf);
    GeneData other = gene;
    other.id = "different";
    CHECK(permute(other, model, 100, 123).log_bf != c.log_bf);
}

TEST_CASE("permutation p-values respect the add-one bounds")
{
    const OmegaGrid grid;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const GeneData gene = random_gene(100 + s, 50, 6, s % 2 ? 1.0 : 0.0);
        const GeneModel model(gene.genotypes, 1.0, grid);
        const GeneStatistics obs = observed_statistics(gene, model);
        for (PermStatistic st : {PermStatistic::GeneBf, PermStatistic::MinP}) {
            const PermutationPlan plan{49, s, st};
            const double observed = st == PermStatistic::GeneBf ? std::exp(obs.log_bf) : obs.min_p;
            const double p = permutation_pvalue(observed, gene, 1.0, grid, plan);
            CHECK(p >= 1.0 / 50.0);
            CHECK(p <= 1.0);
        }
    }
}

TEST_CASE("the null median is estimated more stably than a tail p-value")
{
    const OmegaGrid grid;
    const GeneData gene = random_gene(7, 80, 20, 0.0);
    const GeneModel model(gene.genotypes, 1.0, grid);

    // Observed statistic at the 0.99 quantile of a long reference run.
    const PermutationDraws ref = permute(gene, model, 20000, 99999);
    const double tail_stat = empirical_quantile(ref.log_bf, 0.99);

    std::vector<double> medians, pvalues;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const PermutationDraws d = permute(gene, model, 100, seed);
        medians.push_back(std::exp(empirical_quantile(d.log_bf, 0.5)));
        pvalues.push_back(permutation_pvalue(tail_stat, d.log_bf, PermStatistic::GeneBf));
    }
    const double cv_median = coefficient_of_variation(medians);
    const double cv_tail = coefficient_of_variation(pvalues);
    MESSAGE("cv(median quantile) = " << cv_median << ", cv(tail p-value) = " << cv_tail);
    CHECK(cv_median < cv_tail);
}

TEST_CASE("null permutation p-values are uniform on their lattice")
{
    const OmegaGrid grid;
    constexpr std::size_t n_perms = 19;
    constexpr int trials = 600;
    std::vector<int> counts(n_perms + 1, 0);
    for (int t = 0; t < trials; ++t) {
        const GeneData gene = random_gene(5000 + t, 40, 5, 0.0);
        const GeneModel model(gene.genotypes, 1.0, grid);
        const GeneStatistics obs = observed_statistics(gene, model);
        const PermutationDraws d = permute(gene, model, n_perms, 1);
        const double p = permutation_pvalue(obs.log_bf, d.log_bf, PermStatistic::GeneBf);
        const auto cell = static_cast<std::size_t>(std::lround(p * (n_perms + 1))) - 1;
        REQUIRE(cell <= n_perms);
        ++counts[cell];
    }
    const double expected = static_cast<double>(trials) / (n_perms + 1);
    double chi2 = 0.0;
    for (int c : counts)
        chi2 += (c - expected) * (c - expected) / expected;
    // Upper 0.1% point of chi-square with 19 degrees of freedom.
    CHECK(chi2 < 43.82);
}

TEST_CASE("min_p_statistic")
{
    Eigen::MatrixXd G(4, 2);
    G << 0, 0, 0, 1, 1, 0, 1, 1;
    Eigen::VectorXd y(4);
    // Centred second column has unit sum of squares; first column is orthogonal.
    y << -0.5, 0.5, -0.5, 0.5;
    y *= 1.96;
    CHECK(min_p_statistic(y, G, 1.0) == doctest::Approx(numeric::two_sided_p(1.96)).epsilon(1e-12));
    CHECK(min_p_statistic(y, G, 1.0) == doctest::Approx(0.05).epsilon(0.001));

    Eigen::MatrixXd single = G.col(0);
    CHECK(min_p_statistic(y, single, 1.0) == doctest::Approx(1.0));

    Eigen::MatrixXd dup(4, 2);
    dup << G.col(1), G.col(1);
    CHECK(min_p_statistic(y, dup, 1.0) == min_p_statistic(y, Eigen::MatrixXd(G.col(1)), 1.0));
}
