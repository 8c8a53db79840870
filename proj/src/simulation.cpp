#include "bfdr/simulation.hpp"

#include "bfdr/parallel.hpp"
#include "bfdr/rng.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace bfdr {

namespace {

// Offsets that separate the generation streams of the two scenarios.
constexpr std::uint64_t kScenarioOneSalt = 0x51a1u;
constexpr std::uint64_t kScenarioTwoSalt = 0x51a2u;

void check_common(std::size_t m, std::size_t n, double pi0, double sigma, Range phi, Range maf)
{
    if (m == 0)
        throw std::invalid_argument("m must be positive");
    if (n < 3)
        throw std::invalid_argument("n must be at least 3");
    if (!(pi0 >= 0.0 && pi0 <= 1.0))
        throw std::invalid_argument("pi0 must lie in [0, 1]");
    if (!(sigma > 0.0))
        throw std::invalid_argument("sigma must be positive");
    if (!(phi.low > 0.0 && phi.low <= phi.high))
        throw std::invalid_argument("phi range must satisfy 0 < low <= high");
    if (!(maf.low > 0.0 && maf.low <= maf.high && maf.high <= 0.5))
        throw std::invalid_argument("maf range must satisfy 0 < low <= high <= 0.5");
}

double uniform_in(CounterRng& rng, Range r)
{
    return r.low + (r.high - r.low) * uniform01(rng);
}

SimParams params_of(double pi0, std::size_t n, Range phi, std::uint64_t seed)
{
    return SimParams{pi0, n, phi.low, phi.high, seed};
}

} // namespace

void SimIConfig::check() const
{
    check_common(m, n, pi0, sigma, phi, maf);
}

void SimIIConfig::check() const
{
    check_common(m, n, pi0, sigma, phi, maf);
    if (!(k.low >= 1 && k.low <= k.high))
        throw std::invalid_argument("variant count range must satisfy 1 <= low <= high");
    if (!(n_causal.low >= 1 && n_causal.low <= n_causal.high))
        throw std::invalid_argument("causal count range must satisfy 1 <= low <= high");
    if (n_causal.low > k.low)
        throw std::invalid_argument("minimum causal count exceeds minimum variant count");
    if (!(ld_decay >= 0.0 && ld_decay <= 1.0))
        throw std::invalid_argument("ld_decay must lie in [0, 1]");
}

std::string sim_test_id(std::size_t index)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "test_%06zu", index + 1);
    return buf;
}

std::string sim_gene_id(std::size_t index)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "gene_%06zu", index + 1);
    return buf;
}

SimIData simulate_I(const SimIConfig& config, unsigned threads)
{
    config.check();
    SimIData out;
    out.records.resize(config.m);
    out.truth.ids.resize(config.m);
    out.truth.z.resize(config.m);
    out.truth.params = params_of(config.pi0, config.n, config.phi, config.seed);

    parallel_for(config.m, threads, [&](std::size_t i) {
        CounterRng rng(stream_key(config.seed ^ kScenarioOneSalt, i));
        std::normal_distribution<double> normal(0.0, 1.0);

        const bool alt = uniform01(rng) < 1.0 - config.pi0;
        const double f = uniform_in(rng, config.maf);
        const double phi = uniform_in(rng, config.phi);
        const double beta = alt ? phi * normal(rng) : 0.0;

        std::vector<double> g(config.n);
        bool polymorphic = false;
        while (!polymorphic) {
            for (double& gi : g)
                gi = static_cast<double>((uniform01(rng) < f) + (uniform01(rng) < f));
            polymorphic = std::any_of(g.begin(), g.end(), [&](double v) { return v != g.front(); });
        }
        std::vector<double> y(config.n);
        for (std::size_t s = 0; s < config.n; ++s)
            y[s] = config.mu + beta * g[s] + config.sigma * normal(rng);

        const RegressionFit fit = bf_from_regression(y, g, config.sigma, config.grid);
        TestRecord r = TestRecord::from_log_bf(sim_test_id(i), fit.log_bf);
        r.z = fit.z;
        r.se = fit.se;
        out.records[i] = std::move(r);
        out.truth.ids[i] = out.records[i].id;
        out.truth.z[i] = alt ? 1 : 0;
    });
    return out;
}

SimIIGene simulate_II_gene(const SimIIConfig& config, std::size_t index)
{
    CounterRng rng(stream_key(config.seed ^ kScenarioTwoSalt, index));
    std::normal_distribution<double> normal(0.0, 1.0);
    const boost::math::normal std_normal;

    SimIIGene gene;
    gene.data.id = sim_gene_id(index);
    gene.alternative = uniform01(rng) < 1.0 - config.pi0;
    const std::size_t k = std::uniform_int_distribution<std::size_t>(config.k.low, config.k.high)(rng);
    const std::size_t n = config.n;

    gene.maf.resize(k);
    std::vector<double> cut(k);
    for (std::size_t j = 0; j < k; ++j) {
        gene.maf[j] = uniform_in(rng, config.maf);
        cut[j] = boost::math::quantile(std_normal, gene.maf[j]);
    }

    const double rho = config.ld_decay;
    const double innovation = std::sqrt(1.0 - rho * rho);
    Eigen::MatrixXd& G = gene.data.genotypes;
    G.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    bool polymorphic = false;
    while (!polymorphic) {
        G.setZero();
        for (std::size_t s = 0; s < n; ++s) {
            for (int hap = 0; hap < 2; ++hap) {
                double x = normal(rng);
                for (std::size_t j = 0; j < k; ++j) {
                    if (j > 0)
                        x = rho * x + innovation * normal(rng);
                    if (x < cut[j])
                        G(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(j)) += 1.0;
                }
            }
        }
        polymorphic = true;
        for (Eigen::Index j = 0; j < G.cols() && polymorphic; ++j)
            polymorphic = G.col(j).maxCoeff() != G.col(j).minCoeff();
    }

    Eigen::VectorXd& y = gene.data.y;
    y.setConstant(static_cast<Eigen::Index>(n), config.mu);
    if (gene.alternative) {
        const std::size_t hi = std::min(config.n_causal.high, k);
        const std::size_t n_causal = std::uniform_int_distribution<std::size_t>(config.n_causal.low, hi)(rng);
        std::vector<std::size_t> idx(k);
        for (std::size_t j = 0; j < k; ++j)
            idx[j] = j;
        for (std::size_t c = 0; c < n_causal; ++c) {
            const std::size_t pick = std::uniform_int_distribution<std::size_t>(c, k - 1)(rng);
            std::swap(idx[c], idx[pick]);
            const double phi = uniform_in(rng, config.phi);
            const double beta = phi * normal(rng);
            gene.causal.push_back(idx[c]);
            gene.beta.push_back(beta);
            y += beta * G.col(static_cast<Eigen::Index>(idx[c]));
        }
    }
    for (Eigen::Index s = 0; s < y.size(); ++s)
        y(s) += config.sigma * normal(rng);
    return gene;
}

SimIIData simulate_II(const SimIIConfig& config, unsigned threads)
{
    config.check();
    SimIIData out;
    out.genes.resize(config.m);
    out.truth.ids.resize(config.m);
    out.truth.z.resize(config.m);
    out.truth.params = params_of(config.pi0, config.n, config.phi, config.seed);
    parallel_for(config.m, threads, [&](std::size_t i) {
        SimIIGene g = simulate_II_gene(config, i);
        out.truth.ids[i] = g.data.id;
        out.truth.z[i] = g.alternative ? 1 : 0;
        out.genes[i] = std::move(g.data);
    });
    return out;
}

double expected_adjacent_correlation(double maf1, double maf2, double ld_decay)
{
    if (!(maf1 > 0.0 && maf1 < 1.0 && maf2 > 0.0 && maf2 < 1.0))
        throw std::invalid_argument("allele frequencies must lie in (0, 1)");
    if (!(ld_decay >= 0.0 && ld_decay <= 1.0))
        throw std::invalid_argument("ld_decay must lie in [0, 1]");
    const double scale = std::sqrt(maf1 * (1.0 - maf1) * maf2 * (1.0 - maf2));
    if (ld_decay == 1.0)
        return (std::min(maf1, maf2) - maf1 * maf2) / scale;
    const boost::math::normal std_normal;
    const double a = boost::math::quantile(std_normal, maf1);
    const double b = boost::math::quantile(std_normal, maf2);

    // Plackett: d Phi2(a, b; r) / dr = phi2(a, b; r).
    auto density = [a, b](double r) {
        const double one_minus = 1.0 - r * r;
        return std::exp(-(a * a - 2.0 * r * a * b + b * b) / (2.0 * one_minus)) /
               (2.0 * std::numbers::pi * std::sqrt(one_minus));
    };
    double joint_excess = 0.0;
    if (ld_decay > 0.0)
        joint_excess = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(density, 0.0, ld_decay, 15, 1e-12);
    return joint_excess / scale;
}

EvalReport score(const std::vector<std::string>& rejected, const SimTruth& truth)
{
    if (truth.ids.size() != truth.z.size())
        throw std::invalid_argument("truth ids and indicators differ in length");
    std::unordered_map<std::string, std::size_t> index;
    index.reserve(truth.ids.size());
    for (std::size_t i = 0; i < truth.ids.size(); ++i)
        index.emplace(truth.ids[i], i);

    std::vector<char> mask(truth.size(), 0);
    for (const std::string& id : rejected) {
        auto it = index.find(id);
        if (it == index.end())
            throw std::invalid_argument("rejected id '" + id + "' is not in the truth table");
        mask[it->second] = 1;
    }

    std::size_t n_rej = 0, false_disc = 0, false_non = 0, n_alt = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool alt = truth.z[i] != 0;
        n_alt += alt;
        if (mask[i]) {
            ++n_rej;
            false_disc += !alt;
        } else {
            false_non += alt;
        }
    }
    const std::size_t n_kept = truth.size() - n_rej;
    EvalReport e;
    e.n_rejected = n_rej;
    e.n_true_alt = n_alt;
    e.fdp = static_cast<double>(false_disc) / static_cast<double>(std::max<std::size_t>(1, n_rej));
    e.fnp = static_cast<double>(false_non) / static_cast<double>(std::max<std::size_t>(1, n_kept));
    return e;
}

} // namespace bfdr
