#pragma once

#include "rmtfin/ingestion.hpp"
#include "rmtfin/simulation.hpp"

#include <cmath>
#include <cstdint>

namespace rmtfin::testing {

// Random symmetric matrix with standard-normal entries.
inline Matrix random_symmetric(std::size_t k, Rng& rng)
{
    const auto n = static_cast<Eigen::Index>(k);
    Matrix g(n, n);
    rng.fill_normal(g);
    return 0.5 * (g + g.transpose());
}

// Random well-conditioned positive-definite matrix G G^T / k + 0.5 I.
inline Matrix random_pd(std::size_t k, Rng& rng)
{
    const auto n = static_cast<Eigen::Index>(k);
    Matrix g(n, n);
    rng.fill_normal(g);
    return g * g.transpose() / static_cast<double>(k) + 0.5 * Matrix::Identity(n, n);
}

inline Vector random_vector(std::size_t k, Rng& rng)
{
    Vector v(static_cast<Eigen::Index>(k));
    rng.fill_normal(v);
    return v;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace rmtfin::testing
