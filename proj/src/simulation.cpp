#include "rmtfin/simulation.hpp"

#include "rmtfin/error.hpp"
#include "rmtfin/matrix_core.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace rmtfin {

namespace {

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t mix_seed(RngSpec spec)
{
    std::uint64_t state = spec.seed;
    std::uint64_t a = splitmix64(state);
    state ^= spec.stream * 0xD1B54A32D192ED03ULL;
    return a ^ splitmix64(state);
}

// days since 1970-01-01 to civil date
void civil_from_days(long z, int& y, unsigned& m, unsigned& d)
{
    z += 719468;
    const long era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y = static_cast<int>(yoe) + static_cast<int>(era) * 400 + (m <= 2 ? 1 : 0);
}

} // namespace

Rng::Rng(RngSpec spec) : engine_(mix_seed(spec)) {}

double Rng::uniform()
{
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
}

double Rng::gamma(double shape)
{
    if (!(shape > 0.0))
        throw InvalidArgument("gamma shape must be positive");
    if (shape < 1.0) {
        const double g = gamma(shape + 1.0);
        return g * std::pow(uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2)
            return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v)))
            return d * v;
    }
}

void Rng::fill_normal(Eigen::Ref<Matrix> m)
{
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            m(i, j) = normal();
}

Route parse_route(std::string_view name)
{
    if (name == "matrix")
        return Route::matrix;
    if (name == "scalar")
        return Route::scalar;
    throw InvalidArgument("unknown route '" + std::string(name) + "', expected matrix or scalar");
}

std::string_view route_name(Route route) { return route == Route::matrix ? "matrix" : "scalar"; }

EnsembleSampler::EnsembleSampler(const KBesselModel& model)
    : n_dof_(model.n_dof()), root_(sym_sqrt(model.cov().cov))
{
}

WishartDraw EnsembleSampler::wishart(Rng& rng) const
{
    Matrix g(root_.rows(), n_dof_);
    rng.fill_normal(g);
    WishartDraw draw;
    draw.a_matrix = root_ * g;
    draw.cov_realization = draw.a_matrix * draw.a_matrix.transpose() / static_cast<double>(n_dof_);
    return draw;
}

Vector EnsembleSampler::compound(Rng& rng, Route route) const
{
    const Eigen::Index k = root_.rows();
    if (route == Route::matrix) {
        Matrix g(k, n_dof_);
        rng.fill_normal(g);
        Vector xi(n_dof_);
        rng.fill_normal(xi);
        return root_ * (g * xi) / std::sqrt(static_cast<double>(n_dof_));
    }
    const double z = rng.chi2(n_dof_);
    Vector xi(k);
    rng.fill_normal(xi);
    return std::sqrt(z / n_dof_) * (root_ * xi);
}

WishartDraw sample_wishart(const KBesselModel& model, Rng& rng)
{
    return EnsembleSampler(model).wishart(rng);
}

WishartDraw sample_wishart(const KBesselModel& model, RngSpec spec)
{
    Rng rng(spec);
    return sample_wishart(model, rng);
}

Matrix sample_compound_returns(const KBesselModel& model, std::size_t count, Rng& rng, Route route)
{
    EnsembleSampler sampler(model);
    Matrix out(static_cast<Eigen::Index>(model.dim()), static_cast<Eigen::Index>(count));
    for (Eigen::Index t = 0; t < out.cols(); ++t)
        out.col(t) = sampler.compound(rng, route);
    return out;
}

Matrix sample_compound_returns(const KBesselModel& model, std::size_t count, RngSpec spec,
                               Route route)
{
    Rng rng(spec);
    return sample_compound_returns(model, count, rng, route);
}

Matrix block_correlation(std::size_t k, const SectorBlocks& blocks)
{
    if (k == 0)
        throw InvalidArgument("market dimension must be positive");
    std::vector<std::size_t> sizes = blocks.sizes.empty() ? std::vector<std::size_t>{k} : blocks.sizes;
    if (std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}) != k)
        throw InvalidArgument("sector block sizes do not add up to " + std::to_string(k));
    std::vector<std::size_t> sector(k);
    std::size_t pos = 0;
    for (std::size_t b = 0; b < sizes.size(); ++b)
        for (std::size_t i = 0; i < sizes[b]; ++i)
            sector[pos++] = b;

    const auto n = static_cast<Eigen::Index>(k);
    Matrix c(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            c(i, j) = i == j ? 1.0
                             : (sector[static_cast<std::size_t>(i)] == sector[static_cast<std::size_t>(j)]
                                    ? blocks.c_in
                                    : blocks.c_out);
    SymEigen eig = sym_eigen(c);
    const double smallest = eig.eigenvalues(n - 1);
    if (!(smallest > 1e-12 * eig.eigenvalues(0))) {
        std::ostringstream msg;
        msg << "sector block correlation is not positive-definite: smallest eigenvalue "
            << smallest;
        throw InvalidArgument(msg.str());
    }
    return c;
}

std::vector<std::string> synthetic_dates(std::size_t count)
{
    std::vector<std::string> out;
    out.reserve(count);
    const long start = 10957; // 2000-01-01
    char buf[16];
    for (std::size_t i = 0; i < count; ++i) {
        int y;
        unsigned m, d;
        civil_from_days(start + static_cast<long>(i), y, m, d);
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", y, m, d);
        out.emplace_back(buf);
    }
    return out;
}

ReturnMatrix sample_synthetic_market(const MarketSpec& spec, RngSpec rng)
{
    if (spec.length == 0)
        throw InvalidArgument("market length must be positive");
    if (!(spec.volatility > 0.0))
        throw InvalidArgument("volatility must be positive");
    Matrix cov = spec.volatility * spec.volatility * block_correlation(spec.k, spec.blocks);
    KBesselModel model(spec.n_dof, CovarianceEstimate::from_covariance(cov));

    ReturnMatrix out;
    char buf[16];
    for (std::size_t i = 0; i < spec.k; ++i) {
        std::snprintf(buf, sizeof buf, "S%03zu", i);
        out.tickers.emplace_back(buf);
    }
    out.delta_t = 1;
    out.dates = synthetic_dates(spec.length);
    out.returns = sample_compound_returns(model, spec.length, rng, spec.route);
    return out;
}

} // namespace rmtfin
