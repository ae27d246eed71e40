#include "rmtfin/estimation.hpp"

#include "rmtfin/error.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>
#include <thread>

namespace rmtfin {

namespace {

double cvm_sorted(const std::vector<double>& sorted, const auto& cdf)
{
    const double n = static_cast<double>(sorted.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double target = (2.0 * static_cast<double>(i) + 1.0) / (2.0 * n);
        const double d = cdf(sorted[i]) - target;
        sum += d * d;
    }
    return 1.0 / (12.0 * n) + sum;
}

double quantile_sorted(const std::vector<double>& sorted, double p)
{
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= sorted.size())
        return sorted.back();
    const double frac = pos - static_cast<double>(i);
    return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

} // namespace

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples) : sorted_(std::move(samples))
{
    std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalDistribution::cdf(double x) const
{
    if (sorted_.empty())
        return 0.0;
    auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

RotatedSamples aggregate_full(const ReturnMatrix& returns, const CovarianceEstimate& cov)
{
    if (returns.companies() != cov.dim())
        throw InvalidArgument("covariance dimension does not match the return panel");
    Whitener whitener(cov.cov);
    const Matrix rotated = whitener.transform() * returns.returns;
    RotatedSamples out;
    out.values.assign(rotated.data(), rotated.data() + rotated.size());
    return out;
}

RotatedSamples aggregate_pairwise(const ReturnMatrix& returns, std::size_t window, std::size_t stride)
{
    if (window < 3)
        throw InvalidArgument("pairwise window length must be at least 3");
    if (returns.companies() < 2)
        throw InvalidArgument("pairwise aggregation needs at least two companies");
    if (window > returns.length())
        throw InvalidArgument("pairwise window " + std::to_string(window) +
                              " exceeds series length " + std::to_string(returns.length()));

    RotatedSamples out;
    const auto k = static_cast<Eigen::Index>(returns.companies());
    std::vector<Eigen::Vector2d> pairs(window);
    for (const Window& w : rolling_windows(returns.length(), window, stride == 0 ? window : stride)) {
        const auto block = returns.returns.middleCols(static_cast<Eigen::Index>(w.start),
                                                      static_cast<Eigen::Index>(w.length));
        const Vector mean = block.rowwise().mean();
        const Matrix centered = block.colwise() - mean;
        const Matrix cov = centered * centered.transpose() / static_cast<double>(w.length);
        for (Eigen::Index a = 0; a < k; ++a) {
            for (Eigen::Index b = a + 1; b < k; ++b) {
                Eigen::Matrix2d cov2;
                cov2 << cov(a, a), cov(a, b), cov(a, b), cov(b, b);
                // Window-demeaned vectors, matching the window covariance.
                for (std::size_t t = 0; t < w.length; ++t)
                    pairs[t] = {centered(a, static_cast<Eigen::Index>(t)),
                                centered(b, static_cast<Eigen::Index>(t))};
                pairwise_rotate_normalize(pairs, cov2, out);
            }
        }
    }
    return out;
}

double cvm_statistic(const EmpiricalDistribution& samples, const std::function<double(double)>& cdf)
{
    if (samples.size() < 2)
        throw InvalidArgument("the Cramer-von Mises statistic needs at least two samples");
    return cvm_sorted(samples.sorted(), cdf);
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double FitReport::selected_statistic() const
{
    for (const auto& e : cvm_by_n)
        if (e.n == n_selected)
            return e.statistic;
    return std::numeric_limits<double>::quiet_NaN();
}

FitReport fit_n(const EmpiricalDistribution& samples, int n_min, int n_max)
{
    if (samples.size() < 2)
        throw InvalidArgument("fit_n needs at least two samples");
    if (n_min < 1 || n_max < n_min)
        throw InvalidArgument("invalid N range [" + std::to_string(n_min) + ", " +
                              std::to_string(n_max) + "]");

    const auto count = static_cast<std::size_t>(n_max - n_min + 1);
    std::vector<double> stats(count);
    const std::size_t workers =
        std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));

    auto work = [&](std::size_t first) {
        for (std::size_t i = first; i < count; i += workers) {
            MarginalCdfTable table(n_min + static_cast<int>(i));
            stats[i] = cvm_sorted(samples.sorted(), table);
        }
    };
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 1; w < workers; ++w)
        jobs.push_back(std::async(std::launch::async, work, w));
    work(0);
    for (auto& job : jobs)
        job.get();

    FitReport report;
    report.sample_count = samples.size();
    std::size_t best = 0;
    for (std::size_t i = 0; i < count; ++i) {
        report.cvm_by_n.push_back({n_min + static_cast<int>(i), stats[i]});
        if (stats[i] < stats[best])
            best = i;
    }
    report.n_selected = n_min + static_cast<int>(best);
    return report;
}

FitReport fit_n(const RotatedSamples& samples, int n_min, int n_max)
{
    if (samples.values.empty())
        throw InvalidArgument("fit_n received no samples");
    return fit_n(EmpiricalDistribution(samples.values), n_min, n_max);
}

MomentEstimate moment_match_mean(double sample_mean, int k)
{
    auto f = [k](double n) { return bilinear_sqrt_expectation(n, k); };
    const double f_lo = f(kMomentBracketLow);
    const double f_hi = f(kMomentBracketHigh);
    const double limit = bilinear_sqrt_expectation_limit(k);
    if (!(sample_mean >= f_lo) || sample_mean > limit * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "mean " << sample_mean << " of sqrt(r^T cov^-1 r) is outside the attainable range ["
            << f_lo << ", " << limit << "] for K = " << k;
        throw NoSolution(msg.str(), f_lo, limit);
    }
    MomentEstimate out;
    out.sample_mean = sample_mean;
    if (sample_mean >= f_hi) {
        out.n = kMomentBracketHigh;
        out.saturated = true;
        return out;
    }
    double lo = kMomentBracketLow;
    double hi = kMomentBracketHigh;
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < sample_mean ? lo : hi) = mid;
    }
    out.n = 0.5 * (lo + hi);
    return out;
}

MomentEstimate moment_match_n(const Matrix& vectors, const CovarianceEstimate& cov)
{
    if (vectors.cols() == 0)
        throw InvalidArgument("moment matching needs at least one return vector");
    if (static_cast<std::size_t>(vectors.rows()) != cov.dim())
        throw InvalidArgument("return vector dimension does not match the covariance");
    Eigen::LLT<Matrix> llt(cov.cov);
    if (llt.info() != Eigen::Success)
        throw InvalidArgument("covariance is not positive-definite");
    const Matrix white = llt.matrixL().solve(vectors);
    const double mean = white.colwise().norm().mean();
    return moment_match_mean(mean, static_cast<int>(vectors.rows()));
}

std::vector<NdepRow> n_vs_delta_t(const PriceTable& prices, const std::vector<int>& delta_ts,
                                  int n_min, int n_max)
{
    if (delta_ts.empty())
        throw InvalidArgument("empty list of return intervals");
    std::vector<NdepRow> rows;
    for (int dt : delta_ts) {
        ReturnMatrix returns = compute_returns(prices, dt);
        CovarianceEstimate cov = global_covariance(returns);
        NdepRow row;
        row.delta_t = dt;
        row.fit = fit_n(aggregate_full(returns, cov), n_min, n_max);
        row.fit.delta_t = dt;
        try {
            row.moment = moment_match_n(returns.returns, cov);
            row.fit.moment_n_estimate = row.moment->n;
            row.fit.moment_saturated = row.moment->saturated;
        } catch (const NoSolution&) {
            row.moment.reset();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Histogram make_histogram(const std::vector<double>& samples, std::size_t bins,
                         std::optional<std::pair<double, double>> range, std::size_t max_bins)
{
    if (samples.empty())
        throw InvalidArgument("cannot build a histogram of no samples");
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());

    Histogram h;
    h.total = sorted.size();
    double lo = range ? range->first : sorted.front();
    double hi = range ? range->second : sorted.back();
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    if (bins == 0) {
        const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
        const double width = 2.0 * iqr / std::cbrt(static_cast<double>(sorted.size()));
        bins = width > 0.0 ? static_cast<std::size_t>(std::ceil((hi - lo) / width)) : 1;
        bins = std::clamp<std::size_t>(bins, 1, max_bins);
        h.rule = "freedman-diaconis";
    } else {
        h.rule = "fixed";
    }
    h.lo = lo;
    h.width = (hi - lo) / static_cast<double>(bins);
    h.counts.assign(bins, 0);
    for (double x : sorted) {
        if (x < lo || x > hi)
            continue;
        auto i = static_cast<std::size_t>((x - lo) / h.width);
        if (i >= bins)
            i = bins - 1;
        ++h.counts[i];
    }
    return h;
}

} // namespace rmtfin
