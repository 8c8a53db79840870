#pragma once

// Decision rules: the conservative Bayesian FDR rule on posteriors computed
// from an upper-bound pi0 estimate, plus the Benjamini-Hochberg and Storey
// q-value baselines on p-values.

#include "bfdr/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bfdr {

/// v_i = (1 - pi0) BF_i / (pi0 + (1 - pi0) BF_i), evaluated as a logistic
/// function of log BF_i so that astronomically large factors are safe.
PosteriorTable posterior_table(const std::vector<TestRecord>& records, const Pi0Estimate& pi0);

/// Rejects the largest upper level set {v > t}, t >= 0, whose mean of
/// (1 - v) is at most alpha. Tied posteriors are never split. Entries with
/// v = 0 are never rejected.
DecisionReport bfdr_decide(const PosteriorTable& table, double alpha);

/// Adds every record with bf >= m / alpha to `rejected` and `auto_rejected`.
DecisionReport apply_auto_reject(DecisionReport report, const std::vector<TestRecord>& records,
                                 std::size_t m, double alpha);

struct PValue {
    std::string id;
    double p = 1.0;
};

struct PValueDecision {
    double alpha = 0.05;
    double pi0 = 1.0;
    double p_cutoff = 0.0;              // largest rejected p-value, 0 if none
    std::vector<std::string> rejected;  // input order
    std::vector<double> q_values;       // aligned with input
};

/// Benjamini-Hochberg step-up: reject the i smallest p-values for the
/// largest i with m * p_(i) <= i * alpha.
PValueDecision bh_decide(const std::vector<PValue>& pvalues, double alpha);

/// Storey's q-value procedure. pi0 comes from storey_pi0(gamma) unless
/// `pi0_override` is given; with pi0 = 1 the result is exactly bh_decide.
PValueDecision storey_decide(const std::vector<PValue>& pvalues, double gamma, double alpha,
                             std::optional<double> pi0_override = std::nullopt);

} // namespace bfdr
