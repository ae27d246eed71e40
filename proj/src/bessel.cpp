#include "rmtfin/bessel.hpp"

#include "rmtfin/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace rmtfin {

namespace {

constexpr int kMaxTerms = 10000;
constexpr double kEps = std::numeric_limits<double>::epsilon();

struct StartPair {
    double log_ks; // log(e^x K_mu(x))
    double ratio;  // K_{mu+1}(x) / K_mu(x)
};

// x <= 2: power series around the origin, returning log K_0 and K_1 / K_0.
StartPair integer_start_series(double x)
{
    const double q = 0.25 * x * x;
    const double lx = std::log(0.5 * x);

    // I_0 and sum of psi(k+1) q^k / (k!)^2
    double term = 1.0;
    double i0 = 0.0;
    double s0 = 0.0;
    double psi = -std::numbers::egamma_v<double>;
    // I_1 scaled by 2/x and sum of [psi(k+1) + psi(k+2)] q^k / (k!(k+1)!)
    double term1 = 1.0;
    double i1_scaled = 0.0;
    double s1 = 0.0;
    for (int k = 0; k < kMaxTerms; ++k) {
        const double psi_next = psi + 1.0 / (k + 1);
        i0 += term;
        s0 += psi * term;
        i1_scaled += term1;
        s1 += (psi + psi_next) * term1;
        if (term < 0.1 * kEps * i0 && term1 < 0.1 * kEps * i1_scaled)
            break;
        term *= q / ((k + 1.0) * (k + 1.0));
        term1 *= q / ((k + 1.0) * (k + 2.0));
        psi = psi_next;
    }
    const double k0 = -lx * i0 + s0;
    // x K_1 = 1 + x ln(x/2) I_1 - (x^2/4) s1, with I_1 = (x/2) i1_scaled
    const double xk1 = 1.0 + x * lx * (0.5 * x * i1_scaled) - q * s1;
    return {std::log(k0) + x, xk1 / (x * k0)};
}

// x > 2: Steed's method on the continued fraction for K_1 / K_0 together
// with the normalising series (order 0).
StartPair integer_start_cf(double x)
{
    const double a1 = 0.25;
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d;
    double delh = d;
    double q1 = 0.0;
    double q2 = 1.0;
    double q = a1;
    double c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    int i = 1;
    for (; i < kMaxTerms; ++i) {
        a -= 2.0 * i;
        c = -a * c / (i + 1.0);
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < kEps)
            break;
    }
    if (i == kMaxTerms)
        throw NumericalError("Bessel K continued fraction did not converge at x = " +
                             std::to_string(x));
    h *= a1;
    const double log_ks0 = 0.5 * std::log(std::numbers::pi / (2.0 * x)) - std::log(s);
    const double ratio = (x + 0.5 - h) / x;
    return {log_ks0, ratio};
}

void check_arguments(double nu, double x)
{
    if (!(x > 0.0) || !std::isfinite(x))
        throw InvalidArgument("Bessel K requires x > 0, got " + std::to_string(x));
    const double twice = 2.0 * nu;
    if (!(nu >= 0.0) || std::abs(twice - std::round(twice)) > 1e-12)
        throw InvalidArgument("Bessel K order must be a non-negative multiple of 1/2, got " +
                              std::to_string(nu));
}

} // namespace

// log(e^x K_nu(x)); the e^{-x} factor is applied by the callers so that the
// large-x regime keeps full relative precision.
double log_bessel_k_scaled(double nu, double x)
{
    check_arguments(nu, x);
    const long twice = std::lround(2.0 * nu);
    const bool half_integer = (twice % 2) != 0;

    StartPair start;
    double mu;
    if (half_integer) {
        // K_{1/2} = sqrt(pi / 2x) e^{-x}, K_{3/2} = K_{1/2} (1 + 1/x)
        start = {0.5 * std::log(std::numbers::pi / (2.0 * x)), 1.0 + 1.0 / x};
        mu = 0.5;
    } else {
        start = x <= 2.0 ? integer_start_series(x) : integer_start_cf(x);
        mu = 0.0;
    }

    double log_ks = start.log_ks;
    double ratio = start.ratio;
    const long steps = half_integer ? (twice - 1) / 2 : twice / 2;
    for (long i = 0; i < steps; ++i) {
        log_ks += std::log(ratio);
        mu += 1.0;
        ratio = 1.0 / ratio + 2.0 * mu / x;
    }
    return log_ks;
}

double log_bessel_k(double nu, double x) { return log_bessel_k_scaled(nu, x) - x; }

double bessel_k(double nu, double x)
{
    const double ls = log_bessel_k_scaled(nu, x);
    if (x < 700.0 && ls < 700.0)
        return std::exp(ls) * std::exp(-x);
    return std::exp(ls - x);
}

double bessel_k_scaled(double nu, double x) { return std::exp(log_bessel_k_scaled(nu, x)); }

} // namespace rmtfin
