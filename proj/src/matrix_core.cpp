#include "rmtfin/matrix_core.hpp"

#include "rmtfin/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace rmtfin {

namespace {

constexpr int kMaxSweeps = 100;

double off_diagonal_norm(const Matrix& a)
{
    double sum = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            if (i != j)
                sum += a(i, j) * a(i, j);
    return std::sqrt(sum);
}

void fix_sign(Eigen::Ref<Vector> v)
{
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (std::abs(v(i)) > std::abs(v(best)))
            best = i;
    if (v(best) < 0.0)
        v = -v;
}

} // namespace

SymEigen sym_eigen(const Matrix& input)
{
    const Eigen::Index n = input.rows();
    if (n < 1 || input.cols() != n)
        throw InvalidArgument("sym_eigen requires a non-empty square matrix");
    const double scale = std::max(1.0, input.cwiseAbs().maxCoeff());
    if ((input - input.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw InvalidArgument("sym_eigen requires a symmetric matrix");

    Matrix a = 0.5 * (input + input.transpose());
    Matrix v = Matrix::Identity(n, n);
    const double tol = 1e-14 * a.norm();

    int sweep = 0;
    while (off_diagonal_norm(a) > tol) {
        if (++sweep > kMaxSweeps)
            throw NumericalError("Jacobi iteration did not converge in " +
                                 std::to_string(kMaxSweeps) + " sweeps");
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0)
                    continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });

    SymEigen out;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto src = order[static_cast<std::size_t>(i)];
        out.eigenvalues(i) = a(src, src);
        out.eigenvectors.col(i) = v.col(src);
        fix_sign(out.eigenvectors.col(i));
    }
    return out;
}

bool pairwise_rotate_normalize(const std::vector<Eigen::Vector2d>& pairs, const Eigen::Matrix2d& cov2,
                               RotatedSamples& out)
{
    SymEigen eig = sym_eigen(Matrix(cov2));
    const double l1 = eig.eigenvalues(0);
    const double l2 = eig.eigenvalues(1);
    if (!(l1 > 0.0) || !(l2 > 1e-12 * l1)) {
        ++out.skipped;
        return false;
    }
    Eigen::Matrix2d transform;
    transform.row(0) = eig.eigenvectors.col(0).transpose() / std::sqrt(l1);
    transform.row(1) = eig.eigenvectors.col(1).transpose() / std::sqrt(l2);
    out.values.reserve(out.values.size() + 2 * pairs.size());
    for (const auto& x : pairs) {
        Eigen::Vector2d y = transform * x;
        out.values.push_back(y(0));
        out.values.push_back(y(1));
    }
    return true;
}

Whitener::Whitener(const Matrix& cov) : eigen_(sym_eigen(cov))
{
    const double lmax = eigen_.eigenvalues(0);
    const double lmin = eigen_.eigenvalues(eigen_.eigenvalues.size() - 1);
    if (!(lmax > 0.0) || lmin < 1e-12 * lmax)
        throw NumericalError("ill-conditioned covariance: smallest eigenvalue " +
                             std::to_string(lmin) + " against largest " + std::to_string(lmax));
    transform_ = eigen_.eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal() *
                 eigen_.eigenvectors.transpose();
}

Vector rotate_scale_full(const Vector& r, const CovarianceEstimate& cov)
{
    if (static_cast<std::size_t>(r.size()) != cov.dim())
        throw InvalidArgument("return vector dimension does not match the covariance");
    return Whitener(cov.cov).apply(r);
}

double rank_one_logdet(const Matrix& sigma, const Vector& omega, int n)
{
    if (n < 1)
        throw InvalidArgument("n must be positive");
    return std::log1p(omega.dot(sigma * omega) / static_cast<double>(n));
}

double rank_one_logdet_dense(const Matrix& sigma, const Vector& omega, int n)
{
    if (n < 1)
        throw InvalidArgument("n must be positive");
    const Eigen::Index k = sigma.rows();
    Matrix m = Matrix::Identity(k, k) + sigma * omega * omega.transpose() / static_cast<double>(n);
    Eigen::PartialPivLU<Matrix> lu(m);
    const Matrix& packed = lu.matrixLU();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < k; ++i)
        sum += std::log(std::abs(packed(i, i)));
    return sum;
}

Matrix sym_sqrt(const Matrix& a)
{
    SymEigen eig = sym_eigen(a);
    Vector root = eig.eigenvalues.cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors * root.asDiagonal() * eig.eigenvectors.transpose();
}

} // namespace rmtfin
