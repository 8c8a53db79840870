#pragma once

// Synthetic eQTL data sets with known truth, and FDP/FNP scoring.
//
// Scenario I: one variant per test, y = mu + beta g + e.
// Scenario II: 40-120 correlated variants per gene and 1-5 causal variants
// under the alternative. Genotypes come from a Gaussian copula: each
// haplotype is an AR(1) latent sequence with adjacent correlation
// `ld_decay`, thresholded at the variant's allele frequency.
//
// Every test or gene draws from its own stream keyed by (seed, index).

#include "bfdr/bayes_factor.hpp"
#include "bfdr/model.hpp"
#include "bfdr/permutation.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace bfdr {

struct Range {
    double low = 0.0;
    double high = 0.0;
};

struct CountRange {
    std::size_t low = 0;
    std::size_t high = 0;
};

struct SimIConfig {
    std::size_t m = 10000;
    std::size_t n = 100;
    double pi0 = 0.95;
    double mu = 1.0;
    double sigma = 1.0;
    Range phi{0.5, 1.5};
    Range maf{0.05, 0.5};
    std::uint64_t seed = 1;
    OmegaGrid grid;

    void check() const;
};

struct SimIIConfig {
    std::size_t m = 10000;
    std::size_t n = 85;
    double pi0 = 0.95;
    double mu = 1.0;
    double sigma = 1.0;
    Range phi{0.5, 1.5};
    Range maf{0.05, 0.5};
    std::uint64_t seed = 1;
    CountRange k{40, 120};
    CountRange n_causal{1, 5};
    double ld_decay = 0.5;

    void check() const;
};

struct SimIData {
    std::vector<TestRecord> records;
    SimTruth truth;
};

SimIData simulate_I(const SimIConfig& config, unsigned threads = 0);

struct SimIIGene {
    GeneData data;
    bool alternative = false;
    std::vector<std::size_t> causal;
    std::vector<double> beta; // aligned with `causal`
    std::vector<double> maf;  // one per variant
};

/// Gene `index` of the scenario-II data set; independent of every other gene.
SimIIGene simulate_II_gene(const SimIIConfig& config, std::size_t index);

struct SimIIData {
    std::vector<GeneData> genes;
    SimTruth truth;
};

SimIIData simulate_II(const SimIIConfig& config, unsigned threads = 0);

std::string sim_test_id(std::size_t index);
std::string sim_gene_id(std::size_t index);

/// Correlation between allele dosages at two adjacent variants implied by the
/// copula with latent correlation `ld_decay`.
double expected_adjacent_correlation(double maf1, double maf2, double ld_decay);

/// FDP and FNP of a rejection set against the truth. Unknown ids throw.
EvalReport score(const std::vector<std::string>& rejected, const SimTruth& truth);

} // namespace bfdr
