#pragma once

#include "rmtfin/ingestion.hpp"

#include <cstddef>
#include <vector>

namespace rmtfin {

struct SymEigen {
    Vector eigenvalues;  // descending
    Matrix eigenvectors; // orthogonal, column i belongs to eigenvalue i
};

// Cyclic Jacobi eigensolver for real symmetric matrices. Sweeps until the
// off-diagonal Frobenius norm falls below 1e-14 times the Frobenius norm of
// the input. Each eigenvector is signed so its largest-magnitude entry is
// positive (the first such entry on ties).
SymEigen sym_eigen(const Matrix& a);

// Pooled rotated and eigenvalue-normalized components (dimensionless).
struct RotatedSamples {
    std::vector<double> values;
    std::size_t skipped = 0; // pairs rejected as singular

    std::size_t size() const { return values.size(); }
};

// Maps each 2-vector x onto (u1.x / sqrt(l1), u2.x / sqrt(l2)) in the
// eigenbasis of `cov2`, appending both components to `out`. Returns false
// and appends nothing when the block is not positive-definite.
bool pairwise_rotate_normalize(const std::vector<Eigen::Vector2d>& pairs, const Eigen::Matrix2d& cov2,
                               RotatedSamples& out);

// Precomputed diag(l)^{-1/2} U^T for repeated application.
class Whitener {
public:
    // Throws NumericalError if an eigenvalue is below 1e-12 * l_max.
    explicit Whitener(const Matrix& cov);

    Vector apply(const Vector& r) const { return transform_ * r; }
    const Matrix& transform() const { return transform_; }
    const SymEigen& eigen() const { return eigen_; }

private:
    SymEigen eigen_;
    Matrix transform_;
};

Vector rotate_scale_full(const Vector& r, const CovarianceEstimate& cov);

// log(1 + w^T S w / n): log-determinant of 1_K + S w w^T / n.
double rank_one_logdet(const Matrix& sigma, const Vector& omega, int n);

// Cross-check path: dense LU log|det(1_K + S w w^T / n)|.
double rank_one_logdet_dense(const Matrix& sigma, const Vector& omega, int n);

// Symmetric square root U diag(sqrt(max(l, 0))) U^T of a PSD matrix.
Matrix sym_sqrt(const Matrix& a);

} // namespace rmtfin
