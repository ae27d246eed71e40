#include "rmtfin/error.hpp"
#include "rmtfin/estimation.hpp"
#include "rmtfin/simulation.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace rmtfin;
using rmtfin::testing::random_pd;

namespace {

KBesselModel model_for(const Matrix& cov, int n) { return KBesselModel(n, CovarianceEstimate::from_covariance(cov)); }

} // namespace

TEST(Rng, Deterministic)
{
    Rng a({123, 4}), b({123, 4}), c({123, 5});
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
        const double x = a.normal();
        EXPECT_EQ(x, b.normal());
        differs |= x != c.normal();
    }
    EXPECT_TRUE(differs);
}

TEST(Rng, UniformOpenInterval)
{
    Rng rng({1, 0});
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / 100000.0, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / 100000.0));
}

TEST(Rng, NormalAndGammaMoments)
{
    Rng rng({2, 0});
    const int n = 200000;
    double s1 = 0, s2 = 0, s4 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        s1 += x;
        s2 += x * x;
        s4 += x * x * x * x;
    }
    EXPECT_LT(std::abs(s1 / n), 5.0 / std::sqrt(n));
    EXPECT_LT(std::abs(s2 / n - 1.0), 5.0 * std::sqrt(2.0 / n));
    EXPECT_LT(std::abs(s4 / n - 3.0), 5.0 * std::sqrt(96.0 / n));
    for (double shape : {0.3, 1.0, 2.5, 12.0}) {
        double m = 0, v = 0;
        for (int i = 0; i < n; ++i) {
            const double g = rng.gamma(shape);
            m += g;
            v += g * g;
        }
        m /= n;
        v = v / n - m * m;
        EXPECT_LT(std::abs(m - shape), 5.0 * std::sqrt(shape / n)) << shape;
        EXPECT_LT(std::abs(v - shape), 5.0 * std::sqrt((6.0 * shape + 2.0 * shape * shape) / n)) << shape;
    }
}

TEST(Rng, NormalPassesCvm)
{
    Rng rng({3, 0});
    std::vector<double> x(20000);
    for (auto& v : x)
        v = rng.normal();
    EXPECT_LT(cvm_statistic(EmpiricalDistribution(x), standard_normal_cdf), 0.743);
}

TEST(Route, Parse)
{
    EXPECT_EQ(parse_route("matrix"), Route::matrix);
    EXPECT_EQ(parse_route("scalar"), Route::scalar);
    EXPECT_EQ(route_name(Route::scalar), "scalar");
    EXPECT_THROW(parse_route("other"), InvalidArgument);
}

TEST(Wishart, MeanIsSigma)
{
    const int n = 3;
    auto model = model_for(Matrix::Identity(4, 4), n);
    Rng rng({4, 0});
    const int draws = 10000;
    Matrix sum = Matrix::Zero(4, 4);
    for (int i = 0; i < draws; ++i)
        sum += sample_wishart(model, rng).cov_realization;
    const Matrix mean = sum / draws;
    for (Eigen::Index a = 0; a < 4; ++a)
        for (Eigen::Index b = 0; b < 4; ++b) {
            const double var = ((a == b ? 1.0 : 0.0) + 1.0) / n; // (S_aa S_bb + S_ab^2) / N
            EXPECT_LT(std::abs(mean(a, b) - (a == b ? 1.0 : 0.0)), 5.0 * std::sqrt(var / draws));
        }
}

TEST(Wishart, EntrywiseVariance)
{
    Rng seed_rng({5, 0});
    const Matrix s = random_pd(3, seed_rng);
    const int n = 4;
    auto model = model_for(s, n);
    Rng rng({6, 0});
    const int draws = 40000;
    Matrix m1 = Matrix::Zero(3, 3), m2 = Matrix::Zero(3, 3);
    for (int i = 0; i < draws; ++i) {
        const Matrix w = sample_wishart(model, rng).cov_realization;
        m1 += w;
        m2 += w.cwiseProduct(w);
    }
    m1 /= draws;
    m2 /= draws;
    for (Eigen::Index a = 0; a < 3; ++a)
        for (Eigen::Index b = 0; b < 3; ++b) {
            const double expect = (s(a, a) * s(b, b) + s(a, b) * s(a, b)) / n;
            const double got = m2(a, b) - m1(a, b) * m1(a, b);
            // The variance estimate has a relative standard error near 1%
            // at 4e4 draws.
            EXPECT_LT(std::abs(got - expect) / expect, 0.05) << a << "," << b;
        }
}

TEST(Wishart, RankAndSymmetry)
{
    Rng rng({7, 0});
    const Matrix s = random_pd(5, rng);
    for (int n : {1, 2, 7}) {
        auto draw = sample_wishart(model_for(s, n), rng);
        EXPECT_EQ(draw.a_matrix.rows(), 5);
        EXPECT_EQ(draw.a_matrix.cols(), n);
        EXPECT_EQ(draw.cov_realization, draw.cov_realization.transpose());
        auto e = sym_eigen(draw.cov_realization);
        EXPECT_GE(e.eigenvalues.minCoeff(), -1e-12 * e.eigenvalues(0));
        const auto rank = (e.eigenvalues.array() > 1e-10 * e.eigenvalues(0)).count();
        EXPECT_EQ(rank, std::min(5, n));
    }
}

TEST(Wishart, SpecDeterminism)
{
    auto model = model_for(Matrix::Identity(3, 3), 4);
    EXPECT_EQ(sample_wishart(model, RngSpec{9, 1}).a_matrix, sample_wishart(model, RngSpec{9, 1}).a_matrix);
}

TEST(Compound, SecondMomentIsSigma)
{
    Rng seed_rng({10, 0});
    const Matrix s = random_pd(3, seed_rng);
    for (Route route : {Route::matrix, Route::scalar}) {
        const std::size_t count = 200000;
        const Matrix r = sample_compound_returns(model_for(s, 5), count, RngSpec{11, 0}, route);
        const Matrix c = r * r.transpose() / static_cast<double>(count);
        for (Eigen::Index a = 0; a < 3; ++a)
            for (Eigen::Index b = 0; b < 3; ++b) {
                // var(r_a r_b) = E[(z/N)^2] (S_aa S_bb + S_ab^2), E[(z/N)^2] = 1 + 2/N.
                const double sd = std::sqrt((1.0 + 2.0 / 5.0) * (s(a, a) * s(b, b) + s(a, b) * s(a, b)) / count);
                EXPECT_LT(std::abs(c(a, b) - s(a, b)), 5.0 * sd) << route_name(route);
            }
    }
}

TEST(Compound, RoutesAgree)
{
    Rng seed_rng({12, 0});
    const Matrix s = random_pd(3, seed_rng);
    auto model = model_for(s, 5);
    const std::size_t count = 200000;
    const Matrix a = sample_compound_returns(model, count, RngSpec{13, 0}, Route::matrix);
    const Matrix b = sample_compound_returns(model, count, RngSpec{14, 0}, Route::scalar);
    for (Eigen::Index i = 0; i < 3; ++i) {
        const double sd = std::sqrt(s(i, i) / count);
        EXPECT_LT(std::abs(a.row(i).mean() - b.row(i).mean()), 5.0 * std::sqrt(2.0) * sd);
    }
    // Histogram of the first whitened component, per bin within 3 sigma of
    // the pooled proportion, with a Bonferroni-style allowance of one bin.
    const Whitener w(s);
    const Matrix wa = w.transform() * a, wb = w.transform() * b;
    const int bins = 20;
    std::vector<double> ha(bins, 0.0), hb(bins, 0.0);
    for (Eigen::Index t = 0; t < static_cast<Eigen::Index>(count); ++t) {
        auto bin = [&](double x) { return static_cast<int>(std::floor((x + 4.0) / 8.0 * bins)); };
        const int ia = bin(wa(0, t)), ib = bin(wb(0, t));
        if (ia >= 0 && ia < bins)
            ha[static_cast<std::size_t>(ia)] += 1;
        if (ib >= 0 && ib < bins)
            hb[static_cast<std::size_t>(ib)] += 1;
    }
    int outside = 0;
    for (int i = 0; i < bins; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const double p = (ha[u] + hb[u]) / (2.0 * count);
        const double sd = std::sqrt(2.0 * count * p * (1.0 - p));
        outside += std::abs(ha[u] - hb[u]) > 3.0 * sd + 1e-9;
    }
    EXPECT_LE(outside, 1);
}

TEST(Compound, LargeNLooksGaussian)
{
    auto model = model_for(Matrix::Identity(2, 2), 10000);
    const Matrix r = sample_compound_returns(model, 10000, RngSpec{15, 0});
    std::vector<double> first;
    for (Eigen::Index t = 0; t < r.cols(); ++t)
        first.push_back(r(0, t));
    EXPECT_LT(cvm_statistic(EmpiricalDistribution(first), standard_normal_cdf), 0.743);
}

TEST(Compound, WhitenedMarginalMatchesModel)
{
    Rng seed_rng({16, 0});
    const Matrix s = random_pd(5, seed_rng);
    auto model = model_for(s, 4);
    const Matrix r = sample_compound_returns(model, 20000, RngSpec{17, 0});
    auto samples = aggregate_full(ReturnMatrix{{"a", "b", "c", "d", "e"}, 1, synthetic_dates(20000), r},
                                  CovarianceEstimate::from_covariance(s));
    MarginalCdfTable cdf(4);
    EXPECT_LT(cvm_statistic(EmpiricalDistribution(samples.values), cdf), 0.743);
}

TEST(BlockCorrelation, Structure)
{
    const Matrix c = block_correlation(10, {{5, 5}, 0.6, 0.2});
    EXPECT_EQ(c(0, 0), 1.0);
    EXPECT_EQ(c(0, 4), 0.6);
    EXPECT_EQ(c(0, 5), 0.2);
    EXPECT_EQ(c(9, 5), 0.6);
    EXPECT_EQ(block_correlation(3, {}), Matrix::Identity(3, 3));
}

TEST(BlockCorrelation, RejectsNonPd)
{
    try {
        block_correlation(10, {{5, 5}, 0.2, 0.9});
        FAIL() << "expected InvalidArgument";
    } catch (const InvalidArgument& e) {
        EXPECT_NE(std::string(e.what()).find("eigenvalue"), std::string::npos);
    }
    EXPECT_THROW(block_correlation(10, {{5, 4}, 0.1, 0.0}), InvalidArgument);
}

TEST(SyntheticMarket, RecoversBlockPattern)
{
    MarketSpec spec{.k = 10, .n_dof = 5, .blocks = {{5, 5}, 0.6, 0.2}, .length = 10000};
    auto m = sample_synthetic_market(spec, {18, 0});
    auto c = global_covariance(m);
    double in = 0, out = 0;
    int nin = 0, nout = 0;
    for (Eigen::Index a = 0; a < 10; ++a)
        for (Eigen::Index b = a + 1; b < 10; ++b) {
            if ((a < 5) == (b < 5)) {
                in += c.corr(a, b);
                ++nin;
            } else {
                out += c.corr(a, b);
                ++nout;
            }
            // Single-entry heavy-tailed sampling error is a few 1e-2.
            EXPECT_NEAR(c.corr(a, b), (a < 5) == (b < 5) ? 0.6 : 0.2, 0.08);
        }
    EXPECT_NEAR(in / nin, 0.6, 0.03);
    EXPECT_NEAR(out / nout, 0.2, 0.03);
}

TEST(SyntheticMarket, IndependentSingleBlock)
{
    auto m = sample_synthetic_market({.k = 4, .n_dof = 3, .length = 20000}, {19, 0});
    auto c = global_covariance(m);
    EXPECT_LT((c.corr - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 0.05);
    EXPECT_LT((c.sigma.array() - 1.0).abs().maxCoeff(), 0.05);
    EXPECT_EQ(m.tickers[3], "S003");
    EXPECT_EQ(m.dates[0], "2000-01-01");
    EXPECT_EQ(m.dates[366], "2001-01-01");
}

TEST(SyntheticMarket, DeterministicAndRoundTrips)
{
    MarketSpec spec{.k = 6, .n_dof = 2, .length = 500};
    auto a = sample_synthetic_market(spec, {20, 0});
    auto b = sample_synthetic_market(spec, {20, 0});
    EXPECT_EQ(a.returns, b.returns);
    std::stringstream io;
    write_return_csv(a, io);
    auto back = read_return_csv(io, 1);
    EXPECT_EQ(back.returns, a.returns);
    EXPECT_EQ(back.tickers, a.tickers);
}

TEST(SyntheticMarket, Validation)
{
    EXPECT_THROW(sample_synthetic_market({.k = 0}, {1, 0}), InvalidArgument);
    EXPECT_THROW(sample_synthetic_market({.k = 3, .length = 0}, {1, 0}), InvalidArgument);
    EXPECT_THROW(sample_synthetic_market({.k = 3, .n_dof = 0, .length = 5}, {1, 0}), InvalidArgument);
}
