#include "rmtfin/distributions.hpp"

#include "rmtfin/bessel.hpp"
#include "rmtfin/error.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace rmtfin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogTwo = std::numbers::ln2_v<double>;
constexpr double kLogPi = 1.1447298858494002; // log(pi)
constexpr double kLogTwoPi = kLogTwo + kLogPi;
// N = 1 has a logarithmic density singularity at the origin; the cubic
// interpolant is replaced by direct evaluation over this many grid steps.
constexpr double kLogSingularSteps = 64.0;

void require_dof(int n)
{
    if (n < 1)
        throw InvalidArgument("degrees of freedom must be >= 1, got " + std::to_string(n));
}

Eigen::LLT<Matrix> factorize(const Matrix& cov)
{
    if (cov.rows() != cov.cols() || cov.rows() == 0)
        throw InvalidArgument("covariance must be a non-empty square matrix");
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success)
        throw InvalidArgument("covariance is not positive-definite");
    const Matrix& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i)
        if (!(l(i, i) > 0.0))
            throw InvalidArgument("covariance is not positive-definite");
    return llt;
}

// log Gamma of positive arguments, including half-integers
double lgam(double x) { return std::lgamma(x); }

// integral of the marginal over [0, x] for x > 0
double marginal_half_mass(double x, int n)
{
    auto pdf = [n](double r) { return r > 0.0 ? kbessel_marginal_pdf(r, n) : 0.0; };
    double error = 0.0;
    double value = 0.0;
    if (x <= 1.0) {
        boost::math::quadrature::tanh_sinh<double> integrator;
        value = integrator.integrate(pdf, 0.0, x, 1e-14, &error);
    } else {
        boost::math::quadrature::exp_sinh<double> integrator;
        const double tail = integrator.integrate(pdf, x, kInf, 1e-14, &error);
        value = 0.5 - tail;
    }
    if (!(error <= 1e-11))
        throw NumericalError("marginal CDF quadrature error estimate " + std::to_string(error) +
                             " at r = " + std::to_string(x) + ", N = " + std::to_string(n));
    return value;
}

} // namespace

KBesselModel::KBesselModel(int n_dof, CovarianceEstimate cov) : n_dof_(n_dof), cov_(std::move(cov))
{
    require_dof(n_dof_);
    auto llt = factorize(cov_.cov);
    chol_ = llt.matrixL();
    log_det_ = 2.0 * chol_.diagonal().array().log().sum();
}

double KBesselModel::bilinear(const Vector& r) const
{
    if (r.size() != chol_.rows())
        throw InvalidArgument("return vector dimension does not match the model");
    return chol_.triangularView<Eigen::Lower>().solve(r).squaredNorm();
}

double chi2_pdf(double z, int n)
{
    require_dof(n);
    if (z < 0.0)
        return 0.0;
    const double half = 0.5 * n;
    if (z == 0.0) {
        if (n == 1)
            return kInf;
        return n == 2 ? 0.5 : 0.0;
    }
    return std::exp((half - 1.0) * std::log(z) - 0.5 * z - half * kLogTwo - lgam(half));
}

double mv_gaussian_logpdf(const Vector& r, const Matrix& cov)
{
    auto llt = factorize(cov);
    if (r.size() != cov.rows())
        throw InvalidArgument("return vector dimension does not match the covariance");
    const Matrix l = llt.matrixL();
    const double q = l.triangularView<Eigen::Lower>().solve(r).squaredNorm();
    const double log_det = 2.0 * l.diagonal().array().log().sum();
    return -0.5 * q - 0.5 * (static_cast<double>(r.size()) * kLogTwoPi + log_det);
}

double kbessel_mv_logpdf_bilinear(double q, std::size_t dim, int n_dof, double log_det_cov)
{
    require_dof(n_dof);
    if (!(q >= 0.0))
        throw InvalidArgument("bilinear form must be non-negative");
    const double n = n_dof;
    const double k = static_cast<double>(dim);
    const double nu = 0.5 * (k - n);
    const double prefactor = (1.0 - 0.5 * n) * kLogTwo - lgam(0.5 * n) -
                             0.5 * (k * (kLogTwoPi - std::log(n)) + log_det_cov);
    if (q < 1e-12) {
        if (nu >= 0.0)
            return kInf;
        // y^{|nu|} K_{|nu|}(y) -> 2^{|nu|-1} Gamma(|nu|)
        return prefactor + (-nu - 1.0) * kLogTwo + lgam(-nu);
    }
    const double y = std::sqrt(n * q);
    return prefactor + log_bessel_k(std::abs(nu), y) - nu * std::log(y);
}

double kbessel_mv_logpdf(const Vector& r, const KBesselModel& model)
{
    return kbessel_mv_logpdf_bilinear(model.bilinear(r), model.dim(), model.n_dof(), model.log_det());
}

double kbessel_mv_pdf(const Vector& r, const KBesselModel& model)
{
    return std::exp(kbessel_mv_logpdf(r, model));
}

double kbessel_marginal_logpdf(double r, int n)
{
    require_dof(n);
    const double nd = n;
    const double mu = 0.5 * (nd - 1.0);
    const double prefactor =
        0.5 * (1.0 - nd) * kLogTwo + 0.5 * std::log(nd) - 0.5 * kLogPi - lgam(0.5 * nd);
    const double a = std::abs(r);
    if (a == 0.0) {
        if (n == 1)
            return kInf;
        return prefactor + (mu - 1.0) * kLogTwo + lgam(mu);
    }
    const double y = std::sqrt(nd) * a;
    return prefactor + mu * std::log(y) + log_bessel_k(mu, y);
}

double kbessel_marginal_pdf(double r, int n) { return std::exp(kbessel_marginal_logpdf(r, n)); }

double kbessel_marginal_cdf(double r, int n)
{
    require_dof(n);
    if (r == 0.0)
        return 0.5;
    if (std::isinf(r))
        return r > 0.0 ? 1.0 : 0.0;
    const double half = marginal_half_mass(std::abs(r), n);
    return r > 0.0 ? 0.5 + half : 0.5 - half;
}

double compound_pdf_quadrature(const Vector& r, const KBesselModel& model)
{
    const double n = model.n_dof();
    const double k = static_cast<double>(model.dim());
    const double q = model.bilinear(r);
    // z^{a-1} exp(-z/2 - b/z) with a = (N-K)/2, b = N q / 2
    const double a = 0.5 * (n - k);
    const double b = 0.5 * n * q;
    if (b == 0.0 && a <= 0.0)
        return kInf;
    const double log_norm = -0.5 * n * kLogTwo - lgam(0.5 * n) -
                            0.5 * (k * (kLogTwoPi - std::log(n)) + model.log_det());

    // chi2_N(z) * g(r | z cov / N) dz with z = e^u; concave in u, peak at u0
    auto h = [&](double u) { return a * u - 0.5 * std::exp(u) - (b == 0.0 ? 0.0 : b * std::exp(-u)); };
    const double u0 = std::log(a + std::sqrt(a * a + 2.0 * b));
    const double h0 = h(u0);
    // Values below e^{-80} of the peak are dropped so that subnormal numbers
    // never reach the adaptive error estimate.
    constexpr double kDrop = -80.0;
    auto integrand = [&](double u) {
        const double d = h(u) - h0;
        return d < kDrop ? 0.0 : std::exp(d);
    };

    // Walk out until the integrand is below the drop level.
    auto edge = [&](double dir) {
        double step = 1.0;
        double u = u0 + dir * step;
        while (h(u) - h0 > kDrop && step < 1e6) {
            step *= 2.0;
            u = u0 + dir * step;
        }
        return u;
    };
    const double lo = edge(-1.0);
    const double hi = edge(1.0);

    using gk = boost::math::quadrature::gauss_kronrod<double, 31>;
    double err_lo = 0.0;
    double err_hi = 0.0;
    const double mass = gk::integrate(integrand, lo, u0, 20, 1e-12, &err_lo) +
                        gk::integrate(integrand, u0, hi, 20, 1e-12, &err_hi);
    const double value = std::exp(log_norm + h0) * mass;

    const double err = err_lo + err_hi;
    if (!(value > 0.0) || !std::isfinite(value) || err > 1e-9 * mass) {
        std::ostringstream msg;
        msg << "compound quadrature did not converge: value " << value << ", relative error estimate "
            << err / mass << ", bilinear form " << q << ", N " << n << ", K " << k;
        throw NumericalError(msg.str());
    }
    return value;
}

double bilinear_sqrt_expectation(double n, int k)
{
    if (!(n > 0.0) || k < 1)
        throw InvalidArgument("bilinear_sqrt_expectation requires n > 0 and k >= 1");
    const double kd = k;
    return std::exp(kLogTwo + lgam(0.5 * (n + 1.0)) + lgam(0.5 * (kd + 1.0)) -
                    0.5 * std::log(n) - lgam(0.5 * n) - lgam(0.5 * kd));
}

double bilinear_sqrt_expectation_limit(int k)
{
    if (k < 1)
        throw InvalidArgument("k must be >= 1");
    const double kd = k;
    return std::exp(0.5 * kLogTwo + lgam(0.5 * (kd + 1.0)) - lgam(0.5 * kd));
}

MarginalCdfTable::MarginalCdfTable(int n, std::size_t points, double r_max)
    : n_(n), r_max_(r_max)
{
    require_dof(n);
    if (points < 3 || !(r_max > 0.0))
        throw InvalidArgument("CDF table needs at least 3 points and a positive range");
    step_ = r_max / static_cast<double>(points - 1);
    cdf_.resize(points);
    slope_.resize(points);
    cdf_[0] = 0.0;
    slope_[0] = n == 1 ? kInf : kbessel_marginal_pdf(0.0, n);
    auto pdf = [n](double r) { return kbessel_marginal_pdf(r, n); };
    using gk = boost::math::quadrature::gauss_kronrod<double, 15>;
    for (std::size_t i = 1; i < points; ++i) {
        const double lo = static_cast<double>(i - 1) * step_;
        const double hi = static_cast<double>(i) * step_;
        if (i == 1)
            cdf_[i] = marginal_half_mass(hi, n);
        else
            cdf_[i] = cdf_[i - 1] + gk::integrate(pdf, lo, hi, 0);
        slope_[i] = pdf(hi);
    }
}

double MarginalCdfTable::operator()(double r) const
{
    const double a = std::abs(r);
    if (a >= r_max_ || (n_ == 1 && a < kLogSingularSteps * step_))
        return kbessel_marginal_cdf(r, n_);
    const auto i = static_cast<std::size_t>(a / step_);
    const double t = a / step_ - static_cast<double>(i);
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    const double half = h00 * cdf_[i] + h10 * step_ * slope_[i] + h01 * cdf_[i + 1] +
                        h11 * step_ * slope_[i + 1];
    return r >= 0.0 ? 0.5 + half : 0.5 - half;
}

DensityCurve marginal_curve(int n, double lo, double hi, std::size_t points)
{
    if (points < 2 || !(hi > lo))
        throw InvalidArgument("density curve needs at least two points on a non-empty range");
    DensityCurve curve;
    curve.n_dof = n;
    curve.abscissae.resize(points);
    curve.ordinates.resize(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        curve.abscissae[i] = x;
        curve.ordinates[i] = kbessel_marginal_pdf(x, n);
    }
    return curve;
}

} // namespace rmtfin
