/*
 * rmtfin C API.
 *
 * Every object is an opaque handle created by a function returning
 * rmtfin_status and released with its matching *_free function (which
 * accepts NULL). On failure the out-parameter is left untouched and
 * rmtfin_last_error() describes the problem; the message is thread-local and
 * valid until the next failing call on the same thread.
 *
 * Matrices passed across the boundary are dense and row-major.
 */
#ifndef RMTFIN_H
#define RMTFIN_H

#include <stddef.h>
#include <stdint.h>

#if defined(RMTFIN_BUILDING_LIBRARY)
#define RMTFIN_API __attribute__((visibility("default")))
#else
#define RMTFIN_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rmtfin_status {
    RMTFIN_OK = 0,
    RMTFIN_ERR_INVALID_ARGUMENT = 1,
    RMTFIN_ERR_PARSE = 2,
    RMTFIN_ERR_NUMERICAL = 3,
    RMTFIN_ERR_DEGENERATE = 4,
    RMTFIN_ERR_NO_SOLUTION = 5,
    RMTFIN_ERR_IO = 6,
    RMTFIN_ERR_INTERNAL = 7
} rmtfin_status;

typedef enum rmtfin_route {
    RMTFIN_ROUTE_MATRIX = 0, /* draw the K x N matrix A, then r = A xi / sqrt(N) */
    RMTFIN_ROUTE_SCALAR = 1  /* draw z ~ chi2_N, then r ~ Gaussian(0, z cov / N) */
} rmtfin_route;

typedef struct rmtfin_prices rmtfin_prices;
typedef struct rmtfin_returns rmtfin_returns;
typedef struct rmtfin_volatility rmtfin_volatility;
typedef struct rmtfin_cov rmtfin_cov;
typedef struct rmtfin_samples rmtfin_samples;
typedef struct rmtfin_histogram rmtfin_histogram;
typedef struct rmtfin_fit rmtfin_fit;

RMTFIN_API const char* rmtfin_version(void);
RMTFIN_API const char* rmtfin_rng_algorithm(void);
RMTFIN_API const char* rmtfin_status_name(rmtfin_status status);
RMTFIN_API const char* rmtfin_last_error(void);
/* 1-based input line of the last parse error, 0 if not applicable. */
RMTFIN_API size_t rmtfin_last_error_line(void);

/* ---- price panels ------------------------------------------------------ */

RMTFIN_API rmtfin_status rmtfin_prices_read_csv(const char* path, rmtfin_prices** out);
RMTFIN_API size_t rmtfin_prices_companies(const rmtfin_prices* prices);
RMTFIN_API size_t rmtfin_prices_length(const rmtfin_prices* prices);
/* Tickers removed by the loader because of missing values. */
RMTFIN_API size_t rmtfin_prices_dropped_count(const rmtfin_prices* prices);
RMTFIN_API const char* rmtfin_prices_dropped(const rmtfin_prices* prices, size_t index);
RMTFIN_API void rmtfin_prices_free(rmtfin_prices* prices);

/* ---- return panels ----------------------------------------------------- */

RMTFIN_API rmtfin_status rmtfin_returns_compute(const rmtfin_prices* prices, int delta_t,
                                                rmtfin_returns** out);
RMTFIN_API rmtfin_status rmtfin_returns_read_csv(const char* path, int delta_t, rmtfin_returns** out);
RMTFIN_API rmtfin_status rmtfin_returns_write_csv(const rmtfin_returns* returns, const char* path);
RMTFIN_API size_t rmtfin_returns_companies(const rmtfin_returns* returns);
RMTFIN_API size_t rmtfin_returns_length(const rmtfin_returns* returns);
RMTFIN_API int rmtfin_returns_delta_t(const rmtfin_returns* returns);
RMTFIN_API const char* rmtfin_returns_ticker(const rmtfin_returns* returns, size_t k);
RMTFIN_API const char* rmtfin_returns_date(const rmtfin_returns* returns, size_t t);
RMTFIN_API double rmtfin_returns_value(const rmtfin_returns* returns, size_t k, size_t t);
RMTFIN_API void rmtfin_returns_free(rmtfin_returns* returns);

/* ---- rolling volatility ------------------------------------------------ */

/* stride 0 selects non-overlapping windows. */
RMTFIN_API rmtfin_status rmtfin_volatility_compute(const rmtfin_returns* returns, size_t window,
                                                   size_t stride, rmtfin_volatility** out);
RMTFIN_API size_t rmtfin_volatility_windows(const rmtfin_volatility* vol);
RMTFIN_API double rmtfin_volatility_value(const rmtfin_volatility* vol, size_t k, size_t w);
RMTFIN_API rmtfin_status rmtfin_volatility_write_csv(const rmtfin_volatility* vol, const char* path);
RMTFIN_API void rmtfin_volatility_free(rmtfin_volatility* vol);

/* ---- covariance estimates ---------------------------------------------- */

RMTFIN_API rmtfin_status rmtfin_cov_global(const rmtfin_returns* returns, rmtfin_cov** out);
RMTFIN_API rmtfin_status rmtfin_cov_window(const rmtfin_returns* returns, size_t start,
                                           size_t length, rmtfin_cov** out);
RMTFIN_API size_t rmtfin_cov_dim(const rmtfin_cov* cov);
RMTFIN_API size_t rmtfin_cov_window_start(const rmtfin_cov* cov);
RMTFIN_API size_t rmtfin_cov_window_length(const rmtfin_cov* cov);
RMTFIN_API int rmtfin_cov_rank_deficient(const rmtfin_cov* cov);
RMTFIN_API double rmtfin_cov_entry(const rmtfin_cov* cov, size_t i, size_t j);
RMTFIN_API double rmtfin_corr_entry(const rmtfin_cov* cov, size_t i, size_t j);
RMTFIN_API double rmtfin_cov_sigma(const rmtfin_cov* cov, size_t i);
/* Writes the covariance and, when corr_path is not NULL, the correlation. */
RMTFIN_API rmtfin_status rmtfin_cov_write_csv(const rmtfin_cov* cov, const char* cov_path,
                                              const char* corr_path);
RMTFIN_API void rmtfin_cov_free(rmtfin_cov* cov);

/* ---- rotated samples --------------------------------------------------- */

RMTFIN_API rmtfin_status rmtfin_aggregate_full(const rmtfin_returns* returns, const rmtfin_cov* cov,
                                               rmtfin_samples** out);
RMTFIN_API rmtfin_status rmtfin_aggregate_pairwise(const rmtfin_returns* returns, size_t window,
                                                   size_t stride, rmtfin_samples** out);
RMTFIN_API size_t rmtfin_samples_size(const rmtfin_samples* samples);
RMTFIN_API const double* rmtfin_samples_data(const rmtfin_samples* samples);
RMTFIN_API size_t rmtfin_samples_skipped(const rmtfin_samples* samples);
/* Single column with header "r_tilde". */
RMTFIN_API rmtfin_status rmtfin_samples_write_csv(const rmtfin_samples* samples, const char* path);
RMTFIN_API rmtfin_status rmtfin_samples_cvm_normal(const rmtfin_samples* samples, double* out);
RMTFIN_API rmtfin_status rmtfin_samples_cvm_kbessel(const rmtfin_samples* samples, int n, double* out);
RMTFIN_API void rmtfin_samples_free(rmtfin_samples* samples);

/* ---- histograms -------------------------------------------------------- */

/* bins 0 selects the Freedman-Diaconis rule. */
RMTFIN_API rmtfin_status rmtfin_histogram_make(const rmtfin_samples* samples, size_t bins,
                                               rmtfin_histogram** out);
RMTFIN_API size_t rmtfin_histogram_bins(const rmtfin_histogram* h);
RMTFIN_API double rmtfin_histogram_width(const rmtfin_histogram* h);
RMTFIN_API double rmtfin_histogram_center(const rmtfin_histogram* h, size_t i);
RMTFIN_API size_t rmtfin_histogram_count(const rmtfin_histogram* h, size_t i);
RMTFIN_API double rmtfin_histogram_density(const rmtfin_histogram* h, size_t i);
RMTFIN_API const char* rmtfin_histogram_rule(const rmtfin_histogram* h);
RMTFIN_API void rmtfin_histogram_free(rmtfin_histogram* h);

/* ---- fitting N --------------------------------------------------------- */

RMTFIN_API rmtfin_status rmtfin_fit_n(const rmtfin_samples* samples, int n_min, int n_max,
                                      rmtfin_fit** out);
RMTFIN_API int rmtfin_fit_selected(const rmtfin_fit* fit);
RMTFIN_API size_t rmtfin_fit_sample_count(const rmtfin_fit* fit);
RMTFIN_API size_t rmtfin_fit_entries(const rmtfin_fit* fit);
RMTFIN_API rmtfin_status rmtfin_fit_entry(const rmtfin_fit* fit, size_t index, int* n, double* statistic);
RMTFIN_API void rmtfin_fit_free(rmtfin_fit* fit);

/* Real-valued N from the mean of sqrt(r^T cov^-1 r). *saturated is set to 1
 * when the estimate sits at the upper bracket (reported as ">= n"). */
RMTFIN_API rmtfin_status rmtfin_moment_match_n(const rmtfin_returns* returns, const rmtfin_cov* cov,
                                               double* n, int* saturated, double* sample_mean);

/* ---- distributions ----------------------------------------------------- */

RMTFIN_API rmtfin_status rmtfin_bessel_k(double nu, double x, double* out);
RMTFIN_API rmtfin_status rmtfin_chi2_pdf(double z, int n, double* out);
RMTFIN_API rmtfin_status rmtfin_marginal_pdf(double r, int n, double* out);
RMTFIN_API rmtfin_status rmtfin_marginal_cdf(double r, int n, double* out);
RMTFIN_API rmtfin_status rmtfin_bilinear_sqrt_expectation(double n, int k, double* out);
/* cov is K x K row-major; r has K entries. */
RMTFIN_API rmtfin_status rmtfin_kbessel_mv_pdf(const double* r, const double* cov, size_t k, int n,
                                               double* out);
RMTFIN_API rmtfin_status rmtfin_compound_pdf_quadrature(const double* r, const double* cov, size_t k,
                                                        int n, double* out);

/* ---- simulation -------------------------------------------------------- */

typedef struct rmtfin_market_spec {
    size_t k;                  /* number of companies */
    int n_dof;                 /* ensemble degrees of freedom N */
    const size_t* block_sizes; /* sector sizes summing to k; NULL for one block */
    size_t block_count;
    double c_in;               /* correlation inside a sector */
    double c_out;              /* correlation across sectors */
    size_t length;             /* number of return vectors */
    double volatility;         /* common volatility of every company */
    rmtfin_route route;
} rmtfin_market_spec;

/* Defaults: k 30, N 5, one block, c_in = c_out = 0, length 100000,
 * volatility 1, matrix route. */
RMTFIN_API rmtfin_market_spec rmtfin_market_spec_default(void);
RMTFIN_API rmtfin_status rmtfin_simulate_market(const rmtfin_market_spec* spec, uint64_t seed,
                                                rmtfin_returns** out);

#ifdef __cplusplus
}
#endif

#endif /* RMTFIN_H */
