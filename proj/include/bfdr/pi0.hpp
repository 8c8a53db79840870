#pragma once

// Upper-bound estimators of the null proportion pi0.

#include "bfdr/model.hpp"

#include <cstddef>
#include <span>

namespace bfdr {

inline constexpr double kDefaultGamma = 0.5;

/// Sample-mean estimator. Sorts the Bayes factors ascending and returns
/// d0 / m, where d0 is the longest prefix whose mean is strictly below 1.
/// A +inf Bayes factor (overflowed) forces every prefix containing it to
/// have mean >= 1. d0 = 0 is a valid outcome and sets `empty_prefix`.
Pi0Estimate ebf_pi0(std::span<const double> bfs);
Pi0Estimate ebf_pi0(const std::vector<TestRecord>& records);

/// Sample-quantile estimator: #{bf_i <= q_i} / (m * gamma), clamped to 1.
Pi0Estimate qbf_pi0(std::span<const double> bfs, std::span<const double> null_quantiles,
                    double gamma = kDefaultGamma);

/// Storey's estimator: #{p_i > 1 - gamma} / (m * gamma), clamped to 1.
Pi0Estimate storey_pi0(std::span<const double> pvalues, double gamma = kDefaultGamma);

/// Bayes factors at or above m / alpha are rejected under EBF regardless of
/// the remaining data.
double auto_reject_threshold(std::size_t m, double alpha);

} // namespace bfdr
