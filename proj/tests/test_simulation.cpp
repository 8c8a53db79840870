#include "bfdr/simulation.hpp"

#include <boost/math/distributions/normal.hpp>
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace bfdr;

TEST_CASE("simulate_I truth follows pi0 at the extremes")
{
    SimIConfig c;
    c.m = 300;
    c.pi0 = 1.0;
    const SimIData null = simulate_I(c);
    CHECK(null.truth.n_alternative() == 0);
    c.pi0 = 0.0;
    const SimIData alt = simulate_I(c);
    CHECK(alt.truth.n_alternative() == 300);
    CHECK(alt.records.front().id == "test_000001");
}

TEST_CASE("simulate_I rejects degenerate configurations")
{
    SimIConfig c;
    c.n = 2;
    CHECK_THROWS(simulate_I(c));
    c = SimIConfig{};
    c.maf = {0.3, 0.2};
    CHECK_THROWS(simulate_I(c));
    c = SimIConfig{};
    c.pi0 = 1.2;
    CHECK_THROWS(simulate_I(c));
}

TEST_CASE("simulate_I is reproducible and thread-count independent")
{
    SimIConfig c;
    c.m = 500;
    c.pi0 = 0.5;
    c.seed = 42;
    const SimIData a = simulate_I(c, 1);
    const SimIData b = simulate_I(c, 3);
    CHECK(a.records == b.records);
    CHECK(a.truth.z == b.truth.z);
    c.seed = 43;
    CHECK_FALSE(simulate_I(c, 1).records == a.records);
}

TEST_CASE("null z-scores are standard normal")
{
    SimIConfig c;
    c.m = 5000;
    c.pi0 = 1.0;
    c.seed = 5;
    const SimIData d = simulate_I(c);
    std::vector<double> z;
    for (const auto& r : d.records)
        z.push_back(*r.z);
    std::sort(z.begin(), z.end());
    const boost::math::normal nd;
    double ks = 0.0;
    const double m = static_cast<double>(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double f = boost::math::cdf(nd, z[i]);
        ks = std::max({ks, std::abs(f - i / m), std::abs((i + 1) / m - f)});
    }
    // 0.1% critical value of the Kolmogorov distribution.
    CHECK(ks * std::sqrt(m) < 1.95);
}

TEST_CASE("simulate_II genes respect the configuration")
{
    SimIIConfig c;
    c.m = 40;
    c.pi0 = 0.5;
    c.seed = 3;
    for (std::size_t i = 0; i < c.m; ++i) {
        const SimIIGene g = simulate_II_gene(c, i);
        const auto k = static_cast<std::size_t>(g.data.genotypes.cols());
        CHECK(k >= 40);
        CHECK(k <= 120);
        CHECK(g.data.genotypes.rows() == 85);
        CHECK(g.data.y.size() == 85);
        for (Eigen::Index j = 0; j < g.data.genotypes.cols(); ++j)
            CHECK(g.data.genotypes.col(j).maxCoeff() > g.data.genotypes.col(j).minCoeff());
        if (g.alternative) {
            CHECK(g.causal.size() >= 1);
            CHECK(g.causal.size() <= 5);
        } else {
            CHECK(g.causal.empty());
        }
    }
    c.pi0 = 1.0;
    const SimIIData d = simulate_II(c);
    CHECK(d.truth.n_alternative() == 0);

    c.pi0 = 0.0;
    c.n_causal = {1, 1};
    c.ld_decay = 0.0;
    for (std::size_t i = 0; i < 10; ++i)
        CHECK(simulate_II_gene(c, i).causal.size() == 1);

    c = SimIIConfig{};
    c.n_causal = {1, 50};
    CHECK_NOTHROW(c.check()); // clamped to k per gene
    c.n_causal = {50, 60};
    CHECK_THROWS(c.check());
    c = SimIIConfig{};
    c.ld_decay = 1.5;
    CHECK_THROWS(c.check());
}

TEST_CASE("simulate_II is reproducible across thread counts")
{
    SimIIConfig c;
    c.m = 30;
    c.pi0 = 0.5;
    c.seed = 11;
    const SimIIData a = simulate_II(c, 1);
    const SimIIData b = simulate_II(c, 4);
    for (std::size_t i = 0; i < c.m; ++i) {
        CHECK(a.genes[i].y == b.genes[i].y);
        CHECK(a.genes[i].genotypes == b.genes[i].genotypes);
    }
}

TEST_CASE("expected adjacent correlation")
{
    // At allele frequency 1/2 the latent correlation maps to 2 asin(rho) / pi.
    for (double rho : {0.0, 0.2, 0.5, 0.8, 0.95})
        CHECK(expected_adjacent_correlation(0.5, 0.5, rho) ==
              doctest::Approx(2.0 * std::asin(rho) / std::numbers::pi).epsilon(1e-9));
    CHECK(expected_adjacent_correlation(0.5, 0.5, 1.0) == doctest::Approx(1.0));
    CHECK(expected_adjacent_correlation(0.2, 0.4, 1.0) ==
          doctest::Approx((0.2 - 0.08) / std::sqrt(0.2 * 0.8 * 0.4 * 0.6)));
    CHECK_THROWS(expected_adjacent_correlation(0.0, 0.5, 0.5));
}

TEST_CASE("synthetic LD matches its target correlation")
{
    SimIIConfig c;
    c.n = 4000;
    c.k = {40, 40};
    c.maf = {0.3, 0.3};
    c.ld_decay = 0.7;
    c.pi0 = 1.0;
    const SimIIGene g = simulate_II_gene(c, 0);
    const Eigen::MatrixXd& G = g.data.genotypes;
    const double target = expected_adjacent_correlation(0.3, 0.3, 0.7);
    double mean_r = 0.0;
    for (Eigen::Index j = 0; j + 1 < G.cols(); ++j) {
        const Eigen::VectorXd a = G.col(j).array() - G.col(j).mean();
        const Eigen::VectorXd b = G.col(j + 1).array() - G.col(j + 1).mean();
        const double r = a.dot(b) / std::sqrt(a.squaredNorm() * b.squaredNorm());
        CHECK(std::abs(r - target) < 0.1);
        mean_r += r / static_cast<double>(G.cols() - 1);
    }
    CHECK(std::abs(mean_r - target) < 0.02);
}

TEST_CASE("score")
{
    SimTruth t;
    t.ids = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"};
    t.z = {1, 1, 0, 0, 0, 0, 0, 0, 0, 0};

    const EvalReport exact = score({"a", "b"}, t);
    CHECK(exact.fdp == 0.0);
    CHECK(exact.fnp == 0.0);

    const EvalReport none = score({}, t);
    CHECK(none.fdp == 0.0);
    CHECK(none.fnp == doctest::Approx(0.2));

    const EvalReport all = score(t.ids, t);
    CHECK(all.fnp == 0.0);
    CHECK(all.fdp == doctest::Approx(0.8));

    const EvalReport mixed = score({"a", "c"}, t);
    CHECK(mixed.fdp == 0.5);
    CHECK(mixed.fnp == doctest::Approx(1.0 / 8.0));

    // Consistent relabelling leaves the proportions alone.
    SimTruth r = t;
    for (auto& id : r.ids)
        id = "x" + id;
    const EvalReport relabel = score({"xa", "xc"}, r);
    CHECK(relabel.fdp == mixed.fdp);
    CHECK(relabel.fnp == mixed.fnp);

    CHECK_THROWS(score({"zz"}, t));
}
