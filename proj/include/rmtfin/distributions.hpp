#pragma once

#include "rmtfin/ingestion.hpp"

#include <cstddef>
#include <vector>

namespace rmtfin {

// Gaussian compounded over a Wishart ensemble of covariance matrices that
// fluctuate around a fixed empirical covariance. `n_dof` is the effective
// number of degrees of freedom; small values mean strong fluctuations and
// heavy tails.
class KBesselModel {
public:
    // Throws InvalidArgument if n_dof < 1 or the covariance is not
    // positive-definite.
    KBesselModel(int n_dof, CovarianceEstimate cov);

    int n_dof() const { return n_dof_; }
    std::size_t dim() const { return cov_.dim(); }
    const CovarianceEstimate& cov() const { return cov_; }
    const Matrix& cholesky_factor() const { return chol_; } // lower, cov = L L^T
    double log_det() const { return log_det_; }

    // r^T cov^{-1} r
    double bilinear(const Vector& r) const;

private:
    int n_dof_;
    CovarianceEstimate cov_;
    Matrix chol_;
    double log_det_;
};

// chi-square density with n degrees of freedom; 0 for z < 0.
double chi2_pdf(double z, int n);

// Multivariate normal log-density via a Cholesky factorization.
double mv_gaussian_logpdf(const Vector& r, const Matrix& cov);

// Closed-form ensemble-averaged density
//
//   2^{1-N/2} / (Gamma(N/2) sqrt(det(2 pi cov / N)))
//       * K_{(K-N)/2}(sqrt(N q)) / sqrt(N q)^{(K-N)/2},     q = r^T cov^{-1} r.
//
// It depends on r only through q. Below q = 1e-12 the density is +infinity
// for K >= N and the analytic finite limit for K < N.
double kbessel_mv_logpdf(const Vector& r, const KBesselModel& model);
double kbessel_mv_pdf(const Vector& r, const KBesselModel& model);

// Same density as a function of the bilinear form q alone.
double kbessel_mv_logpdf_bilinear(double q, std::size_t dim, int n_dof, double log_det_cov);

// One-dimensional marginal of the rotated, eigenvalue-normalised returns:
//
//   sqrt(2)^{1-N} sqrt(N) / (sqrt(pi) Gamma(N/2)) y^{(N-1)/2} K_{(N-1)/2}(y),  y = sqrt(N) |r|.
//
// Even in r, unit variance for every N. For N = 1 the value at r = 0 is
// +infinity (logarithmic divergence).
double kbessel_marginal_pdf(double r, int n);
double kbessel_marginal_logpdf(double r, int n);

// Direct adaptive quadrature of the marginal, absolute error <= 1e-10.
double kbessel_marginal_cdf(double r, int n);

// Integral over [0, inf) of chi2_N(z) * g(r | z cov / N) by adaptive
// Gauss-Kronrod in u = ln z, split at the peak and truncated where the
// integrand falls below e^{-80} of it. Returns +infinity at r = 0 when K >= N.
// Throws NumericalError if the relative error estimate exceeds 1e-9.
double compound_pdf_quadrature(const Vector& r, const KBesselModel& model);

// 2 Gamma((N+1)/2) Gamma((K+1)/2) / (sqrt(N) Gamma(N/2) Gamma(K/2)): the
// model expectation of sqrt(r^T cov^{-1} r), i.e. E[sqrt(z/N)] E[chi_K].
// Accepts real n > 0 so that it can be inverted for n.
double bilinear_sqrt_expectation(double n, int k);

// Limit of bilinear_sqrt_expectation as n -> infinity.
double bilinear_sqrt_expectation_limit(int k);

// Marginal CDF tabulated on a uniform |r| grid with cubic Hermite
// interpolation (CDF values and exact pdf slopes at the nodes). Points in the
// first cell or beyond the grid fall back to direct quadrature.
class MarginalCdfTable {
public:
    explicit MarginalCdfTable(int n, std::size_t points = 4097, double r_max = 12.0);

    double operator()(double r) const;
    int n() const { return n_; }

private:
    int n_;
    double r_max_;
    double step_;
    std::vector<double> cdf_;   // F(|r|) - 1/2 at the nodes
    std::vector<double> slope_; // pdf at the nodes
};

struct DensityCurve {
    std::vector<double> abscissae;
    std::vector<double> ordinates;
    int n_dof = 0;
    double scale = 1.0;
};

// Marginal density sampled on `points` equally spaced abscissae in [lo, hi].
DensityCurve marginal_curve(int n, double lo, double hi, std::size_t points);

} // namespace rmtfin
