#pragma once

// Analytic Bayes factors for simple linear-regression association tests.
//
// For a single variant with z-statistic z and standard error u, the Bayes
// factor of a N(0, w^2) effect prior against beta = 0 is
//
//     BF(w) = sqrt(u^2 / (w^2 + u^2)) * exp(z^2 / 2 * w^2 / (w^2 + u^2))
//
// Averaging over a grid of prior scales and then over a gene's candidate
// variants yields gene-level Bayes factors. Everything is evaluated on the
// log scale; natural-scale accessors simply exponentiate.

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace bfdr {

/// Prior standard deviations of the effect size, averaged with equal weight.
class OmegaGrid {
public:
    /// The default grid {0.1, 0.2, 0.4, 0.8, 1.6}.
    OmegaGrid();
    explicit OmegaGrid(std::vector<double> omegas);

    std::span<const double> values() const noexcept { return omegas_; }
    std::size_t size() const noexcept { return omegas_.size(); }

    bool operator==(const OmegaGrid&) const = default;

private:
    std::vector<double> omegas_;
};

double log_bf_cox(double z, double se, double omega);
double bf_cox(double z, double se, double omega);

double log_bf_averaged(double z, double se, const OmegaGrid& grid);
double bf_averaged(double z, double se, const OmegaGrid& grid);

/// Arithmetic mean of per-variant Bayes factors.
double bf_gene(std::span<const double> variant_bfs);
/// Same mean, for inputs and output on the log scale (log-sum-exp).
double log_bf_gene(std::span<const double> log_variant_bfs);

struct RegressionFit {
    double beta_hat = 0.0;
    double se = 0.0;
    double z = 0.0;
    double log_bf = 0.0;

    double bf() const;
};

/// Least-squares fit of y on g with an intercept and known residual sd
/// `sigma`, followed by the grid-averaged Bayes factor of the slope.
RegressionFit bf_from_regression(std::span<const double> y, std::span<const double> g, double sigma,
                                 const OmegaGrid& grid);

/// sqrt(RSS / (n - 2)) from the same simple regression; for callers that do
/// not know the residual variance.
double estimate_residual_sigma(std::span<const double> y, std::span<const double> g);

/// gamma-quantile of bf_averaged under the null, where z ~ N(0, 1) and hence
/// z^2 ~ chi-square(1). The averaged factor is increasing in z^2, so the
/// quantile is the factor evaluated at the chi-square quantile.
double null_quantile_chi2(double se, double gamma, const OmegaGrid& grid);

/// Precomputed single-variant regressions for one gene. Columns with zero
/// genotype variance carry no information and are dropped; a matrix with no
/// informative column is rejected.
class GeneModel {
public:
    GeneModel(const Eigen::MatrixXd& genotypes, double sigma, const OmegaGrid& grid);

    std::size_t n_samples() const noexcept { return n_; }
    std::size_t n_variants() const noexcept { return k_; }
    const std::vector<Eigen::Index>& columns() const noexcept { return columns_; }
    std::span<const double> standard_errors() const noexcept { return se_; }

    /// z_j = beta_hat_j / u_j for every informative variant. The sum over
    /// samples runs in a fixed order, so identical y give identical bits.
    void z_scores(std::span<const double> y, std::span<double> z) const;

    /// log of the gene-level Bayes factor: mean over variants and grid points.
    double log_bf(std::span<const double> z) const;

private:
    std::size_t n_ = 0;
    std::size_t k_ = 0;
    std::size_t grid_size_ = 0;
    std::vector<Eigen::Index> columns_;
    std::vector<double> se_;
    std::vector<double> weights_;   // sample-major: weights_[i * k_ + j]
    std::vector<double> log_scale_; // variant-major: [j * L + l]
    std::vector<double> shrink_;    // w^2 / (2 (w^2 + u^2)), same layout
};

} // namespace bfdr
