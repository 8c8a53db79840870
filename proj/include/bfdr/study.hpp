#pragma once

// End-to-end replicate runs for the two simulation scenarios: generate data,
// apply every decision procedure and score it against the truth.

#include "bfdr/simulation.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bfdr {

struct StudyOptions {
    double alpha = 0.05;
    double gamma = 0.5;
    unsigned threads = 0;
};

struct MethodOutcome {
    std::string method;
    std::optional<double> pi0_hat;
    EvalReport eval;
};

/// Scenario I. Methods: EBF, QBF, BH, Storey. QBF null quantiles come from
/// the chi-square(1) distribution of z^2; p-values are two-sided normal.
struct ReplicateI {
    SimIData data;
    std::vector<double> pvalues;
    std::vector<double> null_quantiles;
    std::vector<MethodOutcome> outcomes;
};

ReplicateI run_replicate_I(const SimIConfig& config, const StudyOptions& options);

struct StudyIIOptions : StudyOptions {
    std::vector<std::size_t> qbf_perms{100};
    std::size_t pvalue_perms = 500; // 0 skips permutation p-values
    OmegaGrid grid;
};

struct GeneRow {
    std::string id;
    std::size_t n_variants = 0;
    double log_bf = 0.0;
    double min_p = 1.0;
    std::vector<double> null_quantiles; // one per StudyIIOptions::qbf_perms entry
    double p_bf = 1.0;
    double p_minp = 1.0;
};

/// Per-gene statistics and permutations. Permutation streams are keyed by
/// `perm_seed` and the gene id.
GeneRow analyze_gene(const GeneData& gene, double sigma, const StudyIIOptions& options,
                     std::uint64_t perm_seed);

/// Scenario II. Methods: EBF, QBF(P) for each P in qbf_perms, and when
/// pvalue_perms > 0: BH and Storey on the permutation p-values of the gene
/// Bayes factor and of the min-p statistic.
struct ReplicateII {
    std::vector<GeneRow> rows;
    SimTruth truth;
    std::vector<MethodOutcome> outcomes;
};

ReplicateII run_replicate_II(const SimIIConfig& config, const StudyIIOptions& options);

/// Same analysis on an already generated data set.
ReplicateII analyze_replicate_II(const SimIIData& data, double sigma, const StudyIIOptions& options,
                                 std::uint64_t perm_seed);

/// Seed of the permutation streams derived from the generation seed.
std::uint64_t permutation_seed(std::uint64_t seed);

struct Summary {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct AggregateRow {
    std::string method;
    std::optional<Summary> pi0_hat;
    Summary fdp;
    Summary fnp;
};

/// Mean and range of each method across replicates. Every replicate must
/// list the same methods in the same order.
std::vector<AggregateRow> aggregate(const std::vector<std::vector<MethodOutcome>>& replicates);

const MethodOutcome& find_outcome(const std::vector<MethodOutcome>& outcomes, const std::string& method);
const AggregateRow& find_row(const std::vector<AggregateRow>& rows, const std::string& method);

} // namespace bfdr
