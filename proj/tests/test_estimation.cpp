#include "rmtfin/error.hpp"
#include "rmtfin/estimation.hpp"
#include "rmtfin/simulation.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace rmtfin;
using rmtfin::testing::random_pd;

namespace {

std::vector<double> normal_draws(std::size_t n, std::uint64_t seed)
{
    Rng rng({seed, 0});
    std::vector<double> out(n);
    for (auto& x : out)
        x = rng.normal();
    return out;
}

ReturnMatrix panel(const Matrix& data)
{
    ReturnMatrix r;
    for (Eigen::Index k = 0; k < data.rows(); ++k)
        r.tickers.push_back("T" + std::to_string(k));
    r.dates = synthetic_dates(static_cast<std::size_t>(data.cols()));
    r.returns = data;
    return r;
}

double laplace_cdf(double x)
{
    const double a = std::sqrt(2.0);
    return x < 0 ? 0.5 * std::exp(a * x) : 1.0 - 0.5 * std::exp(-a * x);
}

} // namespace

TEST(EmpiricalDistribution, SortedStepCdf)
{
    EmpiricalDistribution e({3.0, -1.0, 2.0, 2.0});
    EXPECT_TRUE(std::is_sorted(e.sorted().begin(), e.sorted().end()));
    EXPECT_EQ(e.cdf(-2.0), 0.0);
    EXPECT_EQ(e.cdf(-1.0), 0.25);
    EXPECT_EQ(e.cdf(1.9), 0.25);
    EXPECT_EQ(e.cdf(2.0), 0.75);
    EXPECT_EQ(e.cdf(3.0), 1.0);
}

TEST(Cvm, MidQuantilesGiveMinimum)
{
    const std::size_t n = 200;
    std::vector<double> q(n);
    boost::math::normal_distribution<> nd;
    for (std::size_t i = 0; i < n; ++i)
        q[i] = boost::math::quantile(nd, (2.0 * static_cast<double>(i) + 1.0) / (2.0 * n));
    EXPECT_NEAR(cvm_statistic(EmpiricalDistribution(q), standard_normal_cdf), 1.0 / (12.0 * n), 1e-14);
}

TEST(Cvm, LowerBoundProperty)
{
    Rng rng({51, 0});
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 300);
        auto x = normal_draws(n, 1000 + static_cast<std::uint64_t>(rep));
        const double s = cvm_statistic(EmpiricalDistribution(x), standard_normal_cdf);
        EXPECT_GE(s, 1.0 / (12.0 * static_cast<double>(n)));
    }
}

TEST(Cvm, CalibratedUnderNull)
{
    int below = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto x = normal_draws(1000, seed);
        below += cvm_statistic(EmpiricalDistribution(x), standard_normal_cdf) < 0.347;
    }
    EXPECT_GE(below, 85);
}

TEST(Cvm, DetectsWrongFamily)
{
    auto x = normal_draws(1000, 77);
    EXPECT_GT(cvm_statistic(EmpiricalDistribution(x), laplace_cdf), 0.743);
}

TEST(Cvm, PermutationInvariant)
{
    auto x = normal_draws(500, 3);
    auto y = x;
    std::reverse(y.begin(), y.end());
    EXPECT_EQ(cvm_statistic(EmpiricalDistribution(x), standard_normal_cdf),
              cvm_statistic(EmpiricalDistribution(y), standard_normal_cdf));
}

TEST(Cvm, RejectsTinySamples)
{
    EXPECT_THROW(cvm_statistic(EmpiricalDistribution({1.0}), standard_normal_cdf), InvalidArgument);
}

TEST(AggregateFull, OneCompanyIsStandardized)
{
    Matrix data(1, 6);
    data << 0.01, -0.02, 0.03, 0.0, 0.015, -0.005;
    auto r = panel(data);
    auto cov = global_covariance(r);
    auto s = aggregate_full(r, cov);
    ASSERT_EQ(s.size(), 6u);
    for (std::size_t t = 0; t < 6; ++t)
        EXPECT_NEAR(s.values[t], data(0, static_cast<Eigen::Index>(t)) / cov.sigma(0), 1e-12);
}

TEST(AggregateFull, PoolsAllComponents)
{
    Rng rng({52, 0});
    const Matrix sigma = random_pd(4, rng);
    Matrix data = sym_sqrt(sigma) * Matrix::Random(4, 100);
    auto s = aggregate_full(panel(data), CovarianceEstimate::from_covariance(sigma));
    EXPECT_EQ(s.size(), 400u);
    EXPECT_THROW(aggregate_full(panel(data), CovarianceEstimate::from_covariance(Matrix::Identity(3, 3))),
                 InvalidArgument);
}

TEST(AggregatePairwise, IdentityWindowReturnsRawComponents)
{
    // Columns chosen so the window covariance is exactly the identity.
    Matrix data(2, 4);
    data << 1, -1, 1, -1, 1, 1, -1, -1;
    auto s = aggregate_pairwise(panel(data), 4);
    ASSERT_EQ(s.size(), 8u);
    std::vector<double> got;
    for (double v : s.values)
        got.push_back(std::abs(v));
    for (double v : got)
        EXPECT_NEAR(v, 1.0, 1e-14);
    EXPECT_EQ(s.skipped, 0u);
}

TEST(AggregatePairwise, CountsSingularPairs)
{
    Rng rng({53, 0});
    Matrix data(3, 50);
    rng.fill_normal(data);
    data.row(2) = -data.row(0); // perfectly anti-correlated with row 0
    auto s = aggregate_pairwise(panel(data), 25);
    EXPECT_EQ(s.skipped, 2u); // one pair per window
    EXPECT_EQ(s.size(), 2u * 2u * 2u * 25u);
}

TEST(AggregatePairwise, ConstantCovarianceIsGaussian)
{
    Rng rng({54, 0});
    Matrix c(2, 2);
    c << 1.0, 0.6, 0.6, 2.0;
    Matrix data(2, 5000);
    rng.fill_normal(data);
    data = sym_sqrt(c) * data;
    auto s = aggregate_pairwise(panel(data), 25);
    EXPECT_LT(cvm_statistic(EmpiricalDistribution(s.values), standard_normal_cdf), 0.743);
    EXPECT_EQ(s.skipped, 0u);
}

TEST(AggregatePairwise, Validation)
{
    Matrix data = Matrix::Random(2, 10);
    EXPECT_THROW(aggregate_pairwise(panel(data), 2), InvalidArgument);
    EXPECT_THROW(aggregate_pairwise(panel(data), 11), InvalidArgument);
    EXPECT_THROW(aggregate_pairwise(panel(Matrix::Random(1, 10)), 5), InvalidArgument);
}

TEST(FitN, SelectsMinimumOfTable)
{
    auto s = sample_synthetic_market({.k = 10, .n_dof = 4, .length = 3000}, {55, 0});
    auto samples = aggregate_full(s, global_covariance(s));
    auto report = fit_n(samples, 1, 20);
    ASSERT_EQ(report.cvm_by_n.size(), 20u);
    const auto best = std::min_element(report.cvm_by_n.begin(), report.cvm_by_n.end(),
                                       [](const auto& a, const auto& b) { return a.statistic < b.statistic; });
    EXPECT_EQ(report.n_selected, best->n);
    EXPECT_EQ(report.selected_statistic(), best->statistic);
    EXPECT_EQ(report.sample_count, 30000u);
}

TEST(FitN, RecoversModerateN)
{
    auto s = sample_synthetic_market({.k = 30, .n_dof = 5, .length = 20000}, {56, 0});
    auto report = fit_n(aggregate_full(s, global_covariance(s)));
    EXPECT_EQ(report.n_selected, 5);
}

TEST(FitN, ScaleConsistent)
{
    // Rescaling the raw panel is absorbed by the standardization step.
    auto s = sample_synthetic_market({.k = 8, .n_dof = 3, .length = 4000}, {57, 0});
    auto t = s;
    t.returns *= 0.01;
    auto a = fit_n(aggregate_full(s, global_covariance(s)), 1, 15);
    auto b = fit_n(aggregate_full(t, global_covariance(t)), 1, 15);
    EXPECT_EQ(a.n_selected, b.n_selected);
}

TEST(FitN, IndependentOfOrder)
{
    auto s = sample_synthetic_market({.k = 5, .n_dof = 6, .length = 2000}, {58, 0});
    auto samples = aggregate_full(s, global_covariance(s));
    auto reversed = samples;
    std::reverse(reversed.values.begin(), reversed.values.end());
    auto a = fit_n(samples, 1, 12);
    auto b = fit_n(reversed, 1, 12);
    EXPECT_EQ(a.n_selected, b.n_selected);
    for (std::size_t i = 0; i < a.cvm_by_n.size(); ++i)
        EXPECT_EQ(a.cvm_by_n[i].statistic, b.cvm_by_n[i].statistic);
}

TEST(FitN, Validation)
{
    EXPECT_THROW(fit_n(RotatedSamples{}, 1, 60), InvalidArgument);
    RotatedSamples s;
    s.values = {0.1, -0.2, 0.3};
    EXPECT_THROW(fit_n(s, 5, 4), InvalidArgument);
    EXPECT_THROW(fit_n(s, 0, 4), InvalidArgument);
}

TEST(MomentMatch, RecoversN)
{
    const Matrix sigma = Matrix::Identity(10, 10);
    auto model = KBesselModel(5, CovarianceEstimate::from_covariance(sigma));
    auto draws = sample_compound_returns(model, 100000, RngSpec{59, 0});
    auto est = moment_match_n(draws, CovarianceEstimate::from_covariance(sigma));
    EXPECT_GE(est.n, 4.0);
    EXPECT_LE(est.n, 6.0);
    EXPECT_FALSE(est.saturated);
}

TEST(MomentMatch, InvertsExpectation)
{
    for (int k : {1, 4, 30})
        for (double n : {0.5, 2.0, 7.3, 40.0, 300.0}) {
            auto est = moment_match_mean(bilinear_sqrt_expectation(n, k), k);
            EXPECT_NEAR(est.n, n, 1e-6 * n) << k << " " << n;
        }
}

TEST(MomentMatch, SaturatesAtLimit)
{
    auto est = moment_match_mean(bilinear_sqrt_expectation_limit(7), 7);
    EXPECT_TRUE(est.saturated);
    EXPECT_EQ(est.n, kMomentBracketHigh);
}

TEST(MomentMatch, OutOfRangeIsNoSolution)
{
    EXPECT_THROW(moment_match_mean(0.01, 5), NoSolution);
    EXPECT_THROW(moment_match_mean(1.01 * bilinear_sqrt_expectation_limit(5), 5), NoSolution);
    try {
        moment_match_mean(0.01, 5);
    } catch (const NoSolution& e) {
        EXPECT_NEAR(e.upper(), bilinear_sqrt_expectation_limit(5), 1e-12);
        EXPECT_LT(e.lower(), e.upper());
    }
}

TEST(MomentMatch, ConsistentWithCvmFit)
{
    for (int n : {3, 5, 10, 14}) {
        auto s = sample_synthetic_market({.k = 20, .n_dof = n, .length = 20000}, {60, static_cast<std::uint64_t>(n)});
        auto cov = global_covariance(s);
        auto fit = fit_n(aggregate_full(s, cov), 1, 30);
        auto est = moment_match_n(s.returns, cov);
        EXPECT_LE(std::abs(est.n - fit.n_selected), 2.0) << "true N " << n;
    }
}

TEST(Ndep, FlatOnIidControl)
{
    // For each interval the price path is built so that its dt-step returns
    // are fresh i.i.d. model draws with the same N.
    const int n = 6;
    const std::size_t k = 10, l = 6000;
    for (int dt : {1, 2, 5}) {
        const auto d = static_cast<std::size_t>(dt);
        auto s = sample_synthetic_market({.k = k, .n_dof = n, .length = l * d, .volatility = 0.01},
                                         {61, d});
        PriceTable p;
        p.tickers = s.tickers;
        p.dates = synthetic_dates(l * d + d);
        p.prices.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l * d + d));
        for (Eigen::Index t = 0; t < p.prices.cols(); ++t)
            p.prices.col(t) = t < dt ? Vector::Constant(static_cast<Eigen::Index>(k), 100.0)
                                     : Vector(p.prices.col(t - dt).cwiseProduct(
                                           (1.0 + s.returns.col(t - dt).array()).matrix()));
        auto rows = n_vs_delta_t(p, {dt}, 1, 20);
        ASSERT_EQ(rows.size(), 1u);
        EXPECT_EQ(rows[0].delta_t, dt);
        EXPECT_NEAR(rows[0].fit.n_selected, n, 1) << "dt " << dt;
        ASSERT_TRUE(rows[0].moment.has_value());
    }
    EXPECT_THROW(n_vs_delta_t(PriceTable{}, {}, 1, 5), InvalidArgument);
}

TEST(Histogram, FreedmanDiaconis)
{
    auto x = normal_draws(10000, 62);
    auto h = make_histogram(x);
    EXPECT_EQ(h.rule, "freedman-diaconis");
    EXPECT_EQ(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}), x.size());
    double mass = 0.0;
    for (std::size_t i = 0; i < h.bins(); ++i)
        mass += h.density(i) * h.width;
    EXPECT_NEAR(mass, 1.0, 1e-12);
    auto f = make_histogram(x, 17, std::make_pair(-2.0, 2.0));
    EXPECT_EQ(f.bins(), 17u);
    EXPECT_EQ(f.rule, "fixed");
    EXPECT_NEAR(f.center(0), -2.0 + 2.0 / 17.0, 1e-14);
    EXPECT_THROW(make_histogram({}), InvalidArgument);
}
