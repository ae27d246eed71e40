#include "rmtfin/rmtfin.h"

#include "rmtfin/distributions.hpp"
#include "rmtfin/error.hpp"
#include "rmtfin/estimation.hpp"
#include "rmtfin/ingestion.hpp"
#include "rmtfin/simulation.hpp"
#include "rmtfin/bessel.hpp"

#include <fstream>
#include <iomanip>
#include <new>
#include <string>

struct rmtfin_prices {
    rmtfin::PriceTable value;
};
struct rmtfin_returns {
    rmtfin::ReturnMatrix value;
};
struct rmtfin_volatility {
    rmtfin::VolatilitySeries value;
};
struct rmtfin_cov {
    rmtfin::CovarianceEstimate value;
    std::vector<std::string> tickers;
};
struct rmtfin_samples {
    rmtfin::RotatedSamples value;
};
struct rmtfin_histogram {
    rmtfin::Histogram value;
};
struct rmtfin_fit {
    rmtfin::FitReport value;
};

namespace {

thread_local std::string last_error;
thread_local std::size_t last_error_line = 0;

rmtfin_status fail(rmtfin_status status, const char* what, std::size_t line = 0)
{
    last_error = what;
    last_error_line = line;
    return status;
}

template <class F>
rmtfin_status guarded(F&& body)
{
    try {
        body();
        return RMTFIN_OK;
    } catch (const rmtfin::ParseError& e) {
        return fail(RMTFIN_ERR_PARSE, e.what(), e.line());
    } catch (const rmtfin::InvalidArgument& e) {
        return fail(RMTFIN_ERR_INVALID_ARGUMENT, e.what());
    } catch (const rmtfin::NumericalError& e) {
        return fail(RMTFIN_ERR_NUMERICAL, e.what());
    } catch (const rmtfin::DegenerateData& e) {
        return fail(RMTFIN_ERR_DEGENERATE, e.what());
    } catch (const rmtfin::NoSolution& e) {
        return fail(RMTFIN_ERR_NO_SOLUTION, e.what());
    } catch (const rmtfin::IoError& e) {
        return fail(RMTFIN_ERR_IO, e.what());
    } catch (const std::bad_alloc&) {
        return fail(RMTFIN_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(RMTFIN_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(RMTFIN_ERR_INTERNAL, "unknown error");
    }
}

void require(const void* p, const char* name)
{
    if (!p)
        throw rmtfin::InvalidArgument(std::string(name) + " must not be NULL");
}

std::ofstream open_output(const char* path)
{
    require(path, "path");
    std::ofstream out(path);
    if (!out)
        throw rmtfin::IoError(std::string("cannot write '") + path + "'");
    out << std::setprecision(17);
    return out;
}

rmtfin::Matrix matrix_from_row_major(const double* data, std::size_t k)
{
    require(data, "cov");
    const auto n = static_cast<Eigen::Index>(k);
    rmtfin::Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            m(i, j) = data[i * n + j];
    return m;
}

rmtfin::Vector vector_from(const double* data, std::size_t k)
{
    require(data, "r");
    return Eigen::Map<const rmtfin::Vector>(data, static_cast<Eigen::Index>(k));
}

template <class Handle, class Value>
void emit(Handle** out, Value&& value)
{
    require(out, "out");
    *out = new Handle{std::forward<Value>(value)};
}

} // namespace

extern "C" {

const char* rmtfin_version(void) { return RMTFIN_VERSION_STRING; }

const char* rmtfin_rng_algorithm(void) { return rmtfin::kRngAlgorithm.data(); }

const char* rmtfin_status_name(rmtfin_status status)
{
    switch (status) {
    case RMTFIN_OK: return "ok";
    case RMTFIN_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case RMTFIN_ERR_PARSE: return "parse-error";
    case RMTFIN_ERR_NUMERICAL: return "numerical-error";
    case RMTFIN_ERR_DEGENERATE: return "degenerate-data";
    case RMTFIN_ERR_NO_SOLUTION: return "no-solution";
    case RMTFIN_ERR_IO: return "io-error";
    case RMTFIN_ERR_INTERNAL: return "internal-error";
    }
    return "unknown";
}

const char* rmtfin_last_error(void) { return last_error.c_str(); }

size_t rmtfin_last_error_line(void) { return last_error_line; }

// prices

rmtfin_status rmtfin_prices_read_csv(const char* path, rmtfin_prices** out)
{
    return guarded([&] {
        require(path, "path");
        emit(out, rmtfin::read_price_csv(std::filesystem::path(path)));
    });
}

size_t rmtfin_prices_companies(const rmtfin_prices* prices) { return prices ? prices->value.companies() : 0; }

size_t rmtfin_prices_length(const rmtfin_prices* prices) { return prices ? prices->value.length() : 0; }

size_t rmtfin_prices_dropped_count(const rmtfin_prices* prices)
{
    return prices ? prices->value.dropped.size() : 0;
}

const char* rmtfin_prices_dropped(const rmtfin_prices* prices, size_t index)
{
    if (!prices || index >= prices->value.dropped.size())
        return nullptr;
    return prices->value.dropped[index].c_str();
}

void rmtfin_prices_free(rmtfin_prices* prices) { delete prices; }

// returns

rmtfin_status rmtfin_returns_compute(const rmtfin_prices* prices, int delta_t, rmtfin_returns** out)
{
    return guarded([&] {
        require(prices, "prices");
        emit(out, rmtfin::compute_returns(prices->value, delta_t));
    });
}

rmtfin_status rmtfin_returns_read_csv(const char* path, int delta_t, rmtfin_returns** out)
{
    return guarded([&] {
        require(path, "path");
        emit(out, rmtfin::read_return_csv(std::filesystem::path(path), delta_t));
    });
}

rmtfin_status rmtfin_returns_write_csv(const rmtfin_returns* returns, const char* path)
{
    return guarded([&] {
        require(returns, "returns");
        auto file = open_output(path);
        rmtfin::write_return_csv(returns->value, file);
    });
}

size_t rmtfin_returns_companies(const rmtfin_returns* returns)
{
    return returns ? returns->value.companies() : 0;
}

size_t rmtfin_returns_length(const rmtfin_returns* returns) { return returns ? returns->value.length() : 0; }

int rmtfin_returns_delta_t(const rmtfin_returns* returns) { return returns ? returns->value.delta_t : 0; }

const char* rmtfin_returns_ticker(const rmtfin_returns* returns, size_t k)
{
    if (!returns || k >= returns->value.tickers.size())
        return nullptr;
    return returns->value.tickers[k].c_str();
}

const char* rmtfin_returns_date(const rmtfin_returns* returns, size_t t)
{
    if (!returns || t >= returns->value.dates.size())
        return nullptr;
    return returns->value.dates[t].c_str();
}

double rmtfin_returns_value(const rmtfin_returns* returns, size_t k, size_t t)
{
    if (!returns || k >= returns->value.companies() || t >= returns->value.length())
        return 0.0;
    return returns->value.returns(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t));
}

void rmtfin_returns_free(rmtfin_returns* returns) { delete returns; }

// volatility

rmtfin_status rmtfin_volatility_compute(const rmtfin_returns* returns, size_t window, size_t stride,
                                        rmtfin_volatility** out)
{
    return guarded([&] {
        require(returns, "returns");
        emit(out, rmtfin::rolling_volatility(returns->value, window, stride));
    });
}

size_t rmtfin_volatility_windows(const rmtfin_volatility* vol) { return vol ? vol->value.windows.size() : 0; }

double rmtfin_volatility_value(const rmtfin_volatility* vol, size_t k, size_t w)
{
    if (!vol || k >= vol->value.tickers.size() || w >= vol->value.windows.size())
        return 0.0;
    return vol->value.vol(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(w));
}

rmtfin_status rmtfin_volatility_write_csv(const rmtfin_volatility* vol, const char* path)
{
    return guarded([&] {
        require(vol, "vol");
        auto file = open_output(path);
        rmtfin::write_volatility_csv(vol->value, file);
    });
}

void rmtfin_volatility_free(rmtfin_volatility* vol) { delete vol; }

// covariance

rmtfin_status rmtfin_cov_global(const rmtfin_returns* returns, rmtfin_cov** out)
{
    return guarded([&] {
        require(returns, "returns");
        require(out, "out");
        *out = new rmtfin_cov{rmtfin::global_covariance(returns->value), returns->value.tickers};
    });
}

rmtfin_status rmtfin_cov_window(const rmtfin_returns* returns, size_t start, size_t length,
                                rmtfin_cov** out)
{
    return guarded([&] {
        require(returns, "returns");
        require(out, "out");
        *out = new rmtfin_cov{rmtfin::window_covariance(returns->value, {start, length}),
                              returns->value.tickers};
    });
}

size_t rmtfin_cov_dim(const rmtfin_cov* cov) { return cov ? cov->value.dim() : 0; }

size_t rmtfin_cov_window_start(const rmtfin_cov* cov) { return cov ? cov->value.window.start : 0; }

size_t rmtfin_cov_window_length(const rmtfin_cov* cov) { return cov ? cov->value.window.length : 0; }

int rmtfin_cov_rank_deficient(const rmtfin_cov* cov) { return cov && cov->value.rank_deficient ? 1 : 0; }

double rmtfin_cov_entry(const rmtfin_cov* cov, size_t i, size_t j)
{
    if (!cov || i >= cov->value.dim() || j >= cov->value.dim())
        return 0.0;
    return cov->value.cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

double rmtfin_corr_entry(const rmtfin_cov* cov, size_t i, size_t j)
{
    if (!cov || i >= cov->value.dim() || j >= cov->value.dim())
        return 0.0;
    return cov->value.corr(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

double rmtfin_cov_sigma(const rmtfin_cov* cov, size_t i)
{
    if (!cov || i >= cov->value.dim())
        return 0.0;
    return cov->value.sigma(static_cast<Eigen::Index>(i));
}

rmtfin_status rmtfin_cov_write_csv(const rmtfin_cov* cov, const char* cov_path, const char* corr_path)
{
    return guarded([&] {
        require(cov, "cov");
        {
            auto file = open_output(cov_path);
            rmtfin::write_matrix_csv(cov->value.cov, cov->tickers, file);
        }
        if (corr_path) {
            auto file = open_output(corr_path);
            rmtfin::write_matrix_csv(cov->value.corr, cov->tickers, file);
        }
    });
}

void rmtfin_cov_free(rmtfin_cov* cov) { delete cov; }

// samples

rmtfin_status rmtfin_aggregate_full(const rmtfin_returns* returns, const rmtfin_cov* cov,
                                    rmtfin_samples** out)
{
    return guarded([&] {
        require(returns, "returns");
        require(cov, "cov");
        emit(out, rmtfin::aggregate_full(returns->value, cov->value));
    });
}

rmtfin_status rmtfin_aggregate_pairwise(const rmtfin_returns* returns, size_t window, size_t stride,
                                        rmtfin_samples** out)
{
    return guarded([&] {
        require(returns, "returns");
        emit(out, rmtfin::aggregate_pairwise(returns->value, window, stride));
    });
}

size_t rmtfin_samples_size(const rmtfin_samples* samples) { return samples ? samples->value.size() : 0; }

const double* rmtfin_samples_data(const rmtfin_samples* samples)
{
    return samples ? samples->value.values.data() : nullptr;
}

size_t rmtfin_samples_skipped(const rmtfin_samples* samples) { return samples ? samples->value.skipped : 0; }

rmtfin_status rmtfin_samples_write_csv(const rmtfin_samples* samples, const char* path)
{
    return guarded([&] {
        require(samples, "samples");
        auto file = open_output(path);
        file << "r_tilde\n";
        for (double v : samples->value.values)
            file << v << '\n';
    });
}

rmtfin_status rmtfin_samples_cvm_normal(const rmtfin_samples* samples, double* out)
{
    return guarded([&] {
        require(samples, "samples");
        require(out, "out");
        *out = rmtfin::cvm_statistic(rmtfin::EmpiricalDistribution(samples->value.values),
                                     rmtfin::standard_normal_cdf);
    });
}

rmtfin_status rmtfin_samples_cvm_kbessel(const rmtfin_samples* samples, int n, double* out)
{
    return guarded([&] {
        require(samples, "samples");
        require(out, "out");
        rmtfin::MarginalCdfTable table(n);
        *out = rmtfin::cvm_statistic(rmtfin::EmpiricalDistribution(samples->value.values),
                                     [&](double x) { return table(x); });
    });
}

void rmtfin_samples_free(rmtfin_samples* samples) { delete samples; }

// histograms

rmtfin_status rmtfin_histogram_make(const rmtfin_samples* samples, size_t bins, rmtfin_histogram** out)
{
    return guarded([&] {
        require(samples, "samples");
        emit(out, rmtfin::make_histogram(samples->value.values, bins));
    });
}

size_t rmtfin_histogram_bins(const rmtfin_histogram* h) { return h ? h->value.bins() : 0; }

double rmtfin_histogram_width(const rmtfin_histogram* h) { return h ? h->value.width : 0.0; }

double rmtfin_histogram_center(const rmtfin_histogram* h, size_t i)
{
    return h && i < h->value.bins() ? h->value.center(i) : 0.0;
}

size_t rmtfin_histogram_count(const rmtfin_histogram* h, size_t i)
{
    return h && i < h->value.bins() ? h->value.counts[i] : 0;
}

double rmtfin_histogram_density(const rmtfin_histogram* h, size_t i)
{
    return h && i < h->value.bins() ? h->value.density(i) : 0.0;
}

const char* rmtfin_histogram_rule(const rmtfin_histogram* h) { return h ? h->value.rule.c_str() : nullptr; }

void rmtfin_histogram_free(rmtfin_histogram* h) { delete h; }

// fit

rmtfin_status rmtfin_fit_n(const rmtfin_samples* samples, int n_min, int n_max, rmtfin_fit** out)
{
    return guarded([&] {
        require(samples, "samples");
        emit(out, rmtfin::fit_n(samples->value, n_min, n_max));
    });
}

int rmtfin_fit_selected(const rmtfin_fit* fit) { return fit ? fit->value.n_selected : 0; }

size_t rmtfin_fit_sample_count(const rmtfin_fit* fit) { return fit ? fit->value.sample_count : 0; }

size_t rmtfin_fit_entries(const rmtfin_fit* fit) { return fit ? fit->value.cvm_by_n.size() : 0; }

rmtfin_status rmtfin_fit_entry(const rmtfin_fit* fit, size_t index, int* n, double* statistic)
{
    return guarded([&] {
        require(fit, "fit");
        if (index >= fit->value.cvm_by_n.size())
            throw rmtfin::InvalidArgument("fit entry index out of range");
        if (n)
            *n = fit->value.cvm_by_n[index].n;
        if (statistic)
            *statistic = fit->value.cvm_by_n[index].statistic;
    });
}

void rmtfin_fit_free(rmtfin_fit* fit) { delete fit; }

rmtfin_status rmtfin_moment_match_n(const rmtfin_returns* returns, const rmtfin_cov* cov, double* n,
                                    int* saturated, double* sample_mean)
{
    return guarded([&] {
        require(returns, "returns");
        require(cov, "cov");
        auto est = rmtfin::moment_match_n(returns->value.returns, cov->value);
        if (n)
            *n = est.n;
        if (saturated)
            *saturated = est.saturated ? 1 : 0;
        if (sample_mean)
            *sample_mean = est.sample_mean;
    });
}

// distributions

rmtfin_status rmtfin_bessel_k(double nu, double x, double* out)
{
    return guarded([&] {
        require(out, "out");
        *out = rmtfin::bessel_k(nu, x);
    });
}

rmtfin_status rmtfin_chi2_pdf(double z, int n, double* out)
{
    return guarded([&] {
        require(out, "out");
        *out = rmtfin::chi2_pdf(z, n);
    });
}

rmtfin_status rmtfin_marginal_pdf(double r, int n, double* out)
{
    return guarded([&] {
        require(out, "out");
        *out = rmtfin::kbessel_marginal_pdf(r, n);
    });
}

rmtfin_status rmtfin_marginal_cdf(double r, int n, double* out)
{
    return guarded([&] {
        require(out, "out");
        *out = rmtfin::kbessel_marginal_cdf(r, n);
    });
}

rmtfin_status rmtfin_bilinear_sqrt_expectation(double n, int k, double* out)
{
    return guarded([&] {
        require(out, "out");
        *out = rmtfin::bilinear_sqrt_expectation(n, k);
    });
}

rmtfin_status rmtfin_kbessel_mv_pdf(const double* r, const double* cov, size_t k, int n, double* out)
{
    return guarded([&] {
        require(out, "out");
        rmtfin::KBesselModel model(
            n, rmtfin::CovarianceEstimate::from_covariance(matrix_from_row_major(cov, k)));
        *out = rmtfin::kbessel_mv_pdf(vector_from(r, k), model);
    });
}

rmtfin_status rmtfin_compound_pdf_quadrature(const double* r, const double* cov, size_t k, int n,
                                             double* out)
{
    return guarded([&] {
        require(out, "out");
        rmtfin::KBesselModel model(
            n, rmtfin::CovarianceEstimate::from_covariance(matrix_from_row_major(cov, k)));
        *out = rmtfin::compound_pdf_quadrature(vector_from(r, k), model);
    });
}

// simulation

rmtfin_market_spec rmtfin_market_spec_default(void)
{
    rmtfin_market_spec spec{};
    spec.k = 30;
    spec.n_dof = 5;
    spec.block_sizes = nullptr;
    spec.block_count = 0;
    spec.c_in = 0.0;
    spec.c_out = 0.0;
    spec.length = 100000;
    spec.volatility = 1.0;
    spec.route = RMTFIN_ROUTE_MATRIX;
    return spec;
}

rmtfin_status rmtfin_simulate_market(const rmtfin_market_spec* spec, uint64_t seed, rmtfin_returns** out)
{
    return guarded([&] {
        require(spec, "spec");
        rmtfin::MarketSpec market;
        market.k = spec->k;
        market.n_dof = spec->n_dof;
        if (spec->block_count > 0) {
            require(spec->block_sizes, "block_sizes");
            market.blocks.sizes.assign(spec->block_sizes, spec->block_sizes + spec->block_count);
        }
        market.blocks.c_in = spec->c_in;
        market.blocks.c_out = spec->c_out;
        market.length = spec->length;
        market.volatility = spec->volatility;
        switch (spec->route) {
        case RMTFIN_ROUTE_MATRIX: market.route = rmtfin::Route::matrix; break;
        case RMTFIN_ROUTE_SCALAR: market.route = rmtfin::Route::scalar; break;
        default: throw rmtfin::InvalidArgument("unknown sampling route");
        }
        emit(out, rmtfin::sample_synthetic_market(market, rmtfin::RngSpec{seed, 0}));
    });
}

} // extern "C"
