#pragma once

#include "rmtfin/distributions.hpp"
#include "rmtfin/ingestion.hpp"

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace rmtfin {

// Seed plus sub-stream index. Identical specs give bit-identical streams on
// the same build.
struct RngSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

inline constexpr std::string_view kRngAlgorithm =
    "mt19937_64 seeded by splitmix64(seed, stream); 53-bit uniforms; Marsaglia polar normals; "
    "Marsaglia-Tsang gamma";

// Portable variate generation over std::mt19937_64. The standard library's
// distribution objects are implementation-defined, so none are used.
class Rng {
public:
    explicit Rng(RngSpec spec);

    double uniform(); // (0, 1)
    double normal();
    double gamma(double shape); // unit scale
    double chi2(int dof) { return 2.0 * gamma(0.5 * dof); }

    void fill_normal(Eigen::Ref<Matrix> m);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

enum class Route {
    matrix, // draw A (K x N), then r = A xi / sqrt(N)
    scalar  // draw z ~ chi2_N, then r ~ Gaussian(0, z cov / N)
};

Route parse_route(std::string_view name);
std::string_view route_name(Route route);

struct WishartDraw {
    Matrix a_matrix;        // K x N, columns i.i.d. Gaussian(0, cov)
    Matrix cov_realization; // A A^T / N
};

// Holds the symmetric square root of the model covariance for repeated draws.
class EnsembleSampler {
public:
    explicit EnsembleSampler(const KBesselModel& model);

    WishartDraw wishart(Rng& rng) const;
    Vector compound(Rng& rng, Route route) const;

    const Matrix& root() const { return root_; }

private:
    int n_dof_;
    Matrix root_;
};

WishartDraw sample_wishart(const KBesselModel& model, Rng& rng);
WishartDraw sample_wishart(const KBesselModel& model, RngSpec spec);

// K x count matrix, one compound-model return vector per column.
Matrix sample_compound_returns(const KBesselModel& model, std::size_t count, Rng& rng,
                               Route route = Route::matrix);
Matrix sample_compound_returns(const KBesselModel& model, std::size_t count, RngSpec spec,
                               Route route = Route::matrix);

// Sector-block correlation: c_in inside a block, c_out across blocks. Empty
// `sizes` means one block covering every company.
struct SectorBlocks {
    std::vector<std::size_t> sizes;
    double c_in = 0.0;
    double c_out = 0.0;
};

// Throws InvalidArgument naming the offending eigenvalue if the resulting
// correlation matrix is not positive-definite.
Matrix block_correlation(std::size_t k, const SectorBlocks& blocks);

struct MarketSpec {
    std::size_t k = 30;
    int n_dof = 5;
    SectorBlocks blocks;
    std::size_t length = 100000;
    double volatility = 1.0;
    Route route = Route::matrix;
};

// Return panel with tickers S000, S001, ... and consecutive calendar dates
// from 2000-01-01. Values are not bounded below by -1 unless the volatility
// is small.
ReturnMatrix sample_synthetic_market(const MarketSpec& spec, RngSpec rng);

// Consecutive ISO dates starting at 2000-01-01.
std::vector<std::string> synthetic_dates(std::size_t count);

} // namespace rmtfin
