#pragma once

// Phenotype-permutation engine for gene-level statistics.
//
// Each gene draws its permutations from its own counter-based stream keyed by
// (plan seed, gene id). Permutation k of a gene is the same whatever the total
// number of permutations requested, so a 500-permutation run extends the
// 100-permutation run of the same seed.

#include "bfdr/bayes_factor.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bfdr {

enum class PermStatistic { GeneBf, MinP };

struct PermutationPlan {
    std::size_t n_perms = 100;
    std::uint64_t seed = 0;
    PermStatistic statistic = PermStatistic::GeneBf;

    void check() const;
};

/// Phenotype y (n) and genotype matrix (n x k, one column per variant).
struct GeneData {
    std::string id;
    Eigen::VectorXd y;
    Eigen::MatrixXd genotypes;
};

/// Type-1 empirical quantile: the ceil(gamma * n)-th smallest value (1-based).
double empirical_quantile(std::span<const double> values, double gamma);

/// Add-one permutation p-value. For GeneBf larger is more extreme; for MinP
/// smaller is more extreme. Ties count as extreme.
double permutation_pvalue(double observed, std::span<const double> permuted, PermStatistic statistic);

/// Smallest two-sided normal p-value over the single-variant regressions.
double min_p_statistic(const Eigen::VectorXd& y, const Eigen::MatrixXd& genotypes, double sigma);

struct GeneStatistics {
    double log_bf = 0.0;
    double min_p = 1.0;
};

/// Observed statistics, computed through the same kernel as the permutations.
GeneStatistics observed_statistics(const GeneData& gene, const GeneModel& model);

struct PermutationDraws {
    std::vector<double> log_bf; // one entry per permutation
    std::vector<double> min_p;
};

/// Runs `n_perms` permutations of gene.y and records both statistics.
PermutationDraws permute(const GeneData& gene, const GeneModel& model, std::size_t n_perms,
                         std::uint64_t seed);

/// Empirical gamma-quantile of the permuted gene-level Bayes factor (natural scale).
double permute_null_quantile(const GeneData& gene, double sigma, const OmegaGrid& grid, double gamma,
                             const PermutationPlan& plan);

/// Permutation p-value of `observed` for the statistic named in the plan.
/// `observed` is a natural-scale Bayes factor for GeneBf and a p-value for MinP.
double permutation_pvalue(double observed, const GeneData& gene, double sigma, const OmegaGrid& grid,
                          const PermutationPlan& plan);

} // namespace bfdr
