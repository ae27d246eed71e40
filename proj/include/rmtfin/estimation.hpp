#pragma once

#include "rmtfin/distributions.hpp"
#include "rmtfin/ingestion.hpp"
#include "rmtfin/matrix_core.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rmtfin {

class EmpiricalDistribution {
public:
    explicit EmpiricalDistribution(std::vector<double> samples);

    const std::vector<double>& sorted() const { return sorted_; }
    std::size_t size() const { return sorted_.size(); }
    // Right-continuous step function with steps of 1/n.
    double cdf(double x) const;

private:
    std::vector<double> sorted_;
};

// Rotates every return vector into the eigenbasis of `cov`, scales by the
// inverse square root of the eigenvalues, and pools all K * L components.
RotatedSamples aggregate_full(const ReturnMatrix& returns, const CovarianceEstimate& cov);

// Per window of length `window` (advancing by `stride`, 0 = non-overlapping)
// and per pair of companies: estimates the 2x2 window covariance, rotates the
// window-demeaned vectors of the pair into its eigenbasis, scales by the
// eigenvalues, and pools both components. Singular pairs are skipped and
// counted.
RotatedSamples aggregate_pairwise(const ReturnMatrix& returns, std::size_t window = 25,
                                  std::size_t stride = 0);

// One-sample Cramer-von Mises statistic
//   1/(12n) + sum_i (F(x_(i)) - (2i - 1)/(2n))^2.
double cvm_statistic(const EmpiricalDistribution& samples, const std::function<double(double)>& cdf);

double standard_normal_cdf(double x);

struct CvmEntry {
    int n = 0;
    double statistic = 0.0;
};

struct FitReport {
    int n_selected = 0;
    std::vector<CvmEntry> cvm_by_n;
    std::size_t sample_count = 0;
    std::optional<double> moment_n_estimate;
    bool moment_saturated = false;
    int delta_t = 1;

    double selected_statistic() const;
};

// CvM against the K-Bessel marginal for every integer N in [n_min, n_max];
// the minimiser is selected, ties going to the smaller N. Candidates are
// evaluated concurrently; the report does not depend on scheduling.
FitReport fit_n(const RotatedSamples& samples, int n_min = 1, int n_max = 60);
FitReport fit_n(const EmpiricalDistribution& samples, int n_min = 1, int n_max = 60);

struct MomentEstimate {
    double n = 0.0;
    bool saturated = false; // mean reached the upper bracket, reported as ">= n"
    double sample_mean = 0.0;
};

inline constexpr double kMomentBracketLow = 0.1;
inline constexpr double kMomentBracketHigh = 1000.0;

// Solves bilinear_sqrt_expectation(N, K) = mean of sqrt(r^T cov^{-1} r) over
// the columns of `vectors` by bisection on [0.1, 1000]. Throws NoSolution if
// the mean lies outside the attainable range.
MomentEstimate moment_match_n(const Matrix& vectors, const CovarianceEstimate& cov);
MomentEstimate moment_match_mean(double sample_mean, int k);

struct NdepRow {
    int delta_t = 1;
    FitReport fit;
    std::optional<MomentEstimate> moment;
};

// returns -> global covariance -> aggregate_full -> fit_n, per return interval.
std::vector<NdepRow> n_vs_delta_t(const PriceTable& prices, const std::vector<int>& delta_ts,
                                  int n_min = 1, int n_max = 60);

struct Histogram {
    double lo = 0.0;
    double width = 1.0;
    std::vector<std::size_t> counts;
    std::size_t total = 0;
    std::string rule;

    std::size_t bins() const { return counts.size(); }
    double center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * width; }
    double density(std::size_t i) const
    {
        return static_cast<double>(counts[i]) / (static_cast<double>(total) * width);
    }
};

// bins == 0 selects the Freedman-Diaconis width 2 IQR n^{-1/3} (at most
// `max_bins` bins). Samples outside [lo, hi] when a range is given are
// counted in `total` but not binned.
Histogram make_histogram(const std::vector<double>& samples, std::size_t bins = 0,
                         std::optional<std::pair<double, double>> range = std::nullopt,
                         std::size_t max_bins = 2000);

} // namespace rmtfin
