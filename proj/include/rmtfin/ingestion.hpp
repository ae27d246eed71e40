#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace rmtfin {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Price panel: one row per company, one column per trading day.
struct PriceTable {
    std::vector<std::string> tickers;
    std::vector<std::string> dates; // ISO 8601, strictly increasing
    Matrix prices;                  // K x L_raw, strictly positive
    std::vector<std::string> dropped; // tickers removed by the loader for gaps

    std::size_t companies() const { return tickers.size(); }
    std::size_t length() const { return dates.size(); }

    // Throws InvalidArgument / DegenerateData if an invariant is broken.
    void validate() const;
};

// Simple returns r_k(t) = (S_k(t + dt) - S_k(t)) / S_k(t), stamped with the
// date of t. Panels produced by the simulator carry no prices and are not
// bounded below by -1.
struct ReturnMatrix {
    std::vector<std::string> tickers;
    int delta_t = 1;
    std::vector<std::string> dates;
    Matrix returns; // K x L

    std::size_t companies() const { return static_cast<std::size_t>(returns.rows()); }
    std::size_t length() const { return static_cast<std::size_t>(returns.cols()); }
    Vector vector_at(std::size_t t) const { return returns.col(static_cast<Eigen::Index>(t)); }
};

// Half-open interval [start, start + length) of time indices.
struct Window {
    std::size_t start = 0;
    std::size_t length = 0;
    std::size_t end() const { return start + length; }
};

struct NormalizedSeries {
    Window window;
    Matrix m; // K x T, rows with mean 0 and population variance 1
};

struct CovarianceEstimate {
    Window window;
    Vector sigma; // volatilities
    Matrix corr;  // Pearson correlation, C = M M^T / T
    Matrix cov;   // sigma C sigma
    bool rank_deficient = false; // T < K, so rank(cov) <= T

    std::size_t dim() const { return static_cast<std::size_t>(sigma.size()); }

    // Wraps a known covariance matrix (used for model parameters and
    // synthetic ground truth). Throws InvalidArgument if not symmetric or if
    // a diagonal entry is not positive.
    static CovarianceEstimate from_covariance(const Matrix& cov);
};

struct VolatilitySeries {
    std::vector<std::string> tickers;
    std::vector<Window> windows;
    std::vector<std::string> window_dates; // date of each window's first return
    Matrix vol; // K x number of windows
};

// --- CSV panel I/O ---------------------------------------------------------
//
// First column ISO dates, one column per ticker, header row "date,T1,T2,...".
// Empty cells or NA/NaN mark missing values; tickers with any gap are dropped
// and reported in PriceTable::dropped.

PriceTable read_price_csv(std::istream& in);
PriceTable read_price_csv(const std::filesystem::path& path);

// Reads a return panel in the same layout. No positivity or gap tolerance.
ReturnMatrix read_return_csv(std::istream& in, int delta_t);
ReturnMatrix read_return_csv(const std::filesystem::path& path, int delta_t);

void write_return_csv(const ReturnMatrix& returns, std::ostream& out);
void write_return_csv(const ReturnMatrix& returns, const std::filesystem::path& path);

// Dense K x K matrix with a header row of tickers and the ticker in column 0.
void write_matrix_csv(const Matrix& m, const std::vector<std::string>& tickers, std::ostream& out);

// Long format: date,ticker,volatility.
void write_volatility_csv(const VolatilitySeries& vol, std::ostream& out);

// --- operations ------------------------------------------------------------

ReturnMatrix compute_returns(const PriceTable& prices, int delta_t = 1);

// Windows of length `length` advancing by `stride` that fit in [0, total).
std::vector<Window> rolling_windows(std::size_t total, std::size_t length, std::size_t stride);

NormalizedSeries normalize_window(const ReturnMatrix& returns, Window window);

CovarianceEstimate window_covariance(const ReturnMatrix& returns, Window window);

// stride == 0 means non-overlapping windows (stride = window).
VolatilitySeries rolling_volatility(const ReturnMatrix& returns, std::size_t window = 60,
                                    std::size_t stride = 0);

CovarianceEstimate global_covariance(const ReturnMatrix& returns);

} // namespace rmtfin
