#include "bfdr/bayes_factor.hpp"

#include "bfdr/numeric.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bfdr {

namespace {

void require_finite(double x, const char* name)
{
    if (!std::isfinite(x))
        throw std::invalid_argument(std::string(name) + " must be finite");
}

void require_positive(double x, const char* name)
{
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::invalid_argument(std::string(name) + " must be positive and finite");
}

// log BF(w) = -1/2 log(1 + w^2/u^2) + z^2/2 * w^2/(w^2+u^2)
double log_cox_unchecked(double z, double se, double omega)
{
    const double w2 = omega * omega;
    const double u2 = se * se;
    return -0.5 * std::log1p(w2 / u2) + 0.5 * z * z * (w2 / (w2 + u2));
}

struct Centered {
    std::vector<double> values;
    double sum_sq = 0.0;
};

Centered center(std::span<const double> x)
{
    numeric::CompensatedSum s;
    for (double v : x)
        s.add(v);
    const double mean = s.value() / static_cast<double>(x.size());
    Centered c;
    c.values.reserve(x.size());
    numeric::CompensatedSum ss;
    for (double v : x) {
        c.values.push_back(v - mean);
        ss.add((v - mean) * (v - mean));
    }
    c.sum_sq = ss.value();
    return c;
}

void check_regression_inputs(std::span<const double> y, std::span<const double> g)
{
    if (y.size() != g.size())
        throw std::invalid_argument("y and g must have the same length");
    if (y.size() < 3)
        throw std::invalid_argument("regression needs at least 3 samples");
    for (std::size_t i = 0; i < y.size(); ++i) {
        require_finite(y[i], "y");
        require_finite(g[i], "g");
    }
}

} // namespace

OmegaGrid::OmegaGrid() : omegas_{0.1, 0.2, 0.4, 0.8, 1.6} {}

OmegaGrid::OmegaGrid(std::vector<double> omegas) : omegas_(std::move(omegas))
{
    if (omegas_.empty())
        throw std::invalid_argument("omega grid must not be empty");
    for (double w : omegas_)
        require_positive(w, "omega");
}

double log_bf_cox(double z, double se, double omega)
{
    require_finite(z, "z");
    require_positive(se, "se");
    require_positive(omega, "omega");
    return log_cox_unchecked(z, se, omega);
}

double bf_cox(double z, double se, double omega)
{
    return std::exp(log_bf_cox(z, se, omega));
}

double log_bf_averaged(double z, double se, const OmegaGrid& grid)
{
    require_finite(z, "z");
    require_positive(se, "se");
    std::vector<double> terms;
    terms.reserve(grid.size());
    for (double w : grid.values())
        terms.push_back(log_cox_unchecked(z, se, w));
    return numeric::log_sum_exp(terms) - std::log(static_cast<double>(grid.size()));
}

double bf_averaged(double z, double se, const OmegaGrid& grid)
{
    return std::exp(log_bf_averaged(z, se, grid));
}

double bf_gene(std::span<const double> variant_bfs)
{
    if (variant_bfs.empty())
        throw std::invalid_argument("gene Bayes factor needs at least one variant");
    numeric::CompensatedSum s;
    for (double b : variant_bfs) {
        if (!(b > 0.0))
            throw std::invalid_argument("variant Bayes factors must be positive");
        if (std::isinf(b))
            return b;
        s.add(b);
    }
    return s.value() / static_cast<double>(variant_bfs.size());
}

double log_bf_gene(std::span<const double> log_variant_bfs)
{
    if (log_variant_bfs.empty())
        throw std::invalid_argument("gene Bayes factor needs at least one variant");
    for (double lb : log_variant_bfs)
        if (std::isnan(lb) || lb == std::numeric_limits<double>::infinity())
            throw std::invalid_argument("variant log Bayes factors must be finite");
    return numeric::log_sum_exp(log_variant_bfs) - std::log(static_cast<double>(log_variant_bfs.size()));
}

double RegressionFit::bf() const { return std::exp(log_bf); }

RegressionFit bf_from_regression(std::span<const double> y, std::span<const double> g, double sigma,
                                 const OmegaGrid& grid)
{
    check_regression_inputs(y, g);
    require_positive(sigma, "sigma");

    const Centered gc = center(g);
    if (!(gc.sum_sq > 0.0))
        throw std::invalid_argument("genotype vector is constant (zero variance)");
    const Centered yc = center(y);

    numeric::CompensatedSum sxy;
    for (std::size_t i = 0; i < y.size(); ++i)
        sxy.add(gc.values[i] * yc.values[i]);

    RegressionFit fit;
    fit.beta_hat = sxy.value() / gc.sum_sq;
    fit.se = sigma / std::sqrt(gc.sum_sq);
    fit.z = fit.beta_hat / fit.se;
    fit.log_bf = log_bf_averaged(fit.z, fit.se, grid);
    return fit;
}

double estimate_residual_sigma(std::span<const double> y, std::span<const double> g)
{
    check_regression_inputs(y, g);
    const Centered gc = center(g);
    if (!(gc.sum_sq > 0.0))
        throw std::invalid_argument("genotype vector is constant (zero variance)");
    const Centered yc = center(y);
    numeric::CompensatedSum sxy;
    for (std::size_t i = 0; i < y.size(); ++i)
        sxy.add(gc.values[i] * yc.values[i]);
    const double beta = sxy.value() / gc.sum_sq;
    numeric::CompensatedSum rss;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = yc.values[i] - beta * gc.values[i];
        rss.add(r * r);
    }
    return std::sqrt(rss.value() / static_cast<double>(y.size() - 2));
}

double null_quantile_chi2(double se, double gamma, const OmegaGrid& grid)
{
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("gamma must lie in (0, 1)");
    const boost::math::chi_squared chi2(1.0);
    const double z = std::sqrt(boost::math::quantile(chi2, gamma));
    return bf_averaged(z, se, grid);
}

GeneModel::GeneModel(const Eigen::MatrixXd& genotypes, double sigma, const OmegaGrid& grid)
    : n_(static_cast<std::size_t>(genotypes.rows())), grid_size_(grid.size())
{
    require_positive(sigma, "sigma");
    if (n_ < 3)
        throw std::invalid_argument("gene model needs at least 3 samples");
    if (!genotypes.allFinite())
        throw std::invalid_argument("genotype matrix contains non-finite values");

    std::vector<std::vector<double>> centered;
    for (Eigen::Index j = 0; j < genotypes.cols(); ++j) {
        const Eigen::VectorXd col = genotypes.col(j);
        Centered c = center(std::span<const double>(col.data(), n_));
        if (!(c.sum_sq > 0.0))
            continue;
        columns_.push_back(j);
        const double scale = 1.0 / (sigma * std::sqrt(c.sum_sq));
        for (double& v : c.values)
            v *= scale;
        centered.push_back(std::move(c.values));
        se_.push_back(sigma / std::sqrt(c.sum_sq));
    }
    k_ = columns_.size();
    if (k_ == 0)
        throw std::invalid_argument("genotype matrix has no non-constant column");

    weights_.resize(n_ * k_);
    for (std::size_t j = 0; j < k_; ++j)
        for (std::size_t i = 0; i < n_; ++i)
            weights_[i * k_ + j] = centered[j][i];

    log_scale_.resize(k_ * grid_size_);
    shrink_.resize(k_ * grid_size_);
    for (std::size_t j = 0; j < k_; ++j) {
        const double u2 = se_[j] * se_[j];
        for (std::size_t l = 0; l < grid_size_; ++l) {
            const double w2 = grid.values()[l] * grid.values()[l];
            log_scale_[j * grid_size_ + l] = -0.5 * std::log1p(w2 / u2);
            shrink_[j * grid_size_ + l] = 0.5 * (w2 / (w2 + u2));
        }
    }
}

void GeneModel::z_scores(std::span<const double> y, std::span<double> z) const
{
    if (y.size() != n_ || z.size() != k_)
        throw std::invalid_argument("z_scores: dimension mismatch");
    std::fill(z.begin(), z.end(), 0.0);
    const double* w = weights_.data();
    double* out = z.data();
    for (std::size_t i = 0; i < n_; ++i) {
        const double yi = y[i];
        const double* row = w + i * k_;
        for (std::size_t j = 0; j < k_; ++j)
            out[j] += row[j] * yi;
    }
}

double GeneModel::log_bf(std::span<const double> z) const
{
    if (z.size() != k_)
        throw std::invalid_argument("log_bf: dimension mismatch");
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k_; ++j) {
        const double z2 = z[j] * z[j];
        for (std::size_t l = 0; l < grid_size_; ++l)
            hi = std::max(hi, log_scale_[j * grid_size_ + l] + shrink_[j * grid_size_ + l] * z2);
    }
    double s = 0.0;
    for (std::size_t j = 0; j < k_; ++j) {
        const double z2 = z[j] * z[j];
        for (std::size_t l = 0; l < grid_size_; ++l)
            s += std::exp(log_scale_[j * grid_size_ + l] + shrink_[j * grid_size_ + l] * z2 - hi);
    }
    return hi + std::log(s) - std::log(static_cast<double>(k_ * grid_size_));
}

} // namespace bfdr
