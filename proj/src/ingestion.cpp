#include "rmtfin/ingestion.hpp"

#include "rmtfin/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string_view>

namespace rmtfin {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        auto comma = line.find(',', pos);
        out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos
                                                                            : comma - pos)));
        if (comma == std::string_view::npos)
            break;
        pos = comma + 1;
    }
    return out;
}

bool is_missing(std::string_view cell)
{
    return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == "null";
}

double parse_number(std::string_view cell, std::size_t line)
{
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value))
        throw ParseError("malformed number '" + std::string(cell) + "'", line);
    return value;
}

bool leap_year(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

bool valid_iso_date(std::string_view s)
{
    if (s.size() != 10 || s[4] != '-' || s[7] != '-')
        return false;
    for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9})
        if (s[i] < '0' || s[i] > '9')
            return false;
    int y = std::stoi(std::string(s.substr(0, 4)));
    int m = std::stoi(std::string(s.substr(5, 2)));
    int d = std::stoi(std::string(s.substr(8, 2)));
    static constexpr int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m < 1 || m > 12 || d < 1)
        return false;
    int limit = days[m - 1] + (m == 2 && leap_year(y) ? 1 : 0);
    return d <= limit;
}

struct RawPanel {
    std::vector<std::string> tickers;
    std::vector<std::string> dates;
    std::vector<std::vector<std::optional<double>>> columns; // per ticker
    std::vector<std::size_t> first_line;                     // per date row, for messages
};

RawPanel read_panel(std::istream& in)
{
    RawPanel panel;
    std::string line;
    std::size_t lineno = 0;

    while (std::getline(in, line)) {
        ++lineno;
        if (!trim(line).empty())
            break;
    }
    if (trim(line).empty())
        throw ParseError("empty input, expected a header row", 0);

    auto header = split_fields(line);
    if (header.size() < 2)
        throw ParseError("header must contain a date column and at least one ticker", lineno);
    for (std::size_t i = 1; i < header.size(); ++i) {
        if (header[i].empty())
            throw ParseError("empty ticker name in column " + std::to_string(i + 1), lineno);
        panel.tickers.emplace_back(header[i]);
    }
    {
        auto sorted = panel.tickers;
        std::sort(sorted.begin(), sorted.end());
        auto dup = std::adjacent_find(sorted.begin(), sorted.end());
        if (dup != sorted.end())
            throw ParseError("duplicate ticker '" + *dup + "'", lineno);
    }
    panel.columns.resize(panel.tickers.size());

    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty())
            continue;
        auto fields = split_fields(line);
        if (fields.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(fields.size()),
                             lineno);
        if (!valid_iso_date(fields[0]))
            throw ParseError("invalid ISO date '" + std::string(fields[0]) + "'", lineno);
        if (!panel.dates.empty() && !(panel.dates.back() < fields[0]))
            throw ParseError("dates must be strictly increasing", lineno);
        panel.dates.emplace_back(fields[0]);
        panel.first_line.push_back(lineno);
        for (std::size_t k = 0; k + 1 < fields.size(); ++k) {
            if (is_missing(fields[k + 1]))
                panel.columns[k].push_back(std::nullopt);
            else
                panel.columns[k].push_back(parse_number(fields[k + 1], lineno));
        }
    }
    if (panel.dates.empty())
        throw ParseError("no data rows", lineno);
    return panel;
}

std::ifstream open_input(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path.string() + "'");
    return in;
}

std::ofstream open_output(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write '" + path.string() + "'");
    out << std::setprecision(17);
    return out;
}

void require_window(const ReturnMatrix& returns, Window window)
{
    if (window.length < 2)
        throw InvalidArgument("window length must be at least 2");
    if (window.end() > returns.length())
        throw InvalidArgument("window [" + std::to_string(window.start) + ", " +
                              std::to_string(window.end()) + ") exceeds series length " +
                              std::to_string(returns.length()));
}

} // namespace

void PriceTable::validate() const
{
    if (static_cast<std::size_t>(prices.rows()) != tickers.size())
        throw InvalidArgument("price matrix has " + std::to_string(prices.rows()) + " rows for " +
                              std::to_string(tickers.size()) + " tickers");
    if (static_cast<std::size_t>(prices.cols()) != dates.size())
        throw InvalidArgument("price rows do not match the date axis length");
    for (std::size_t t = 1; t < dates.size(); ++t)
        if (!(dates[t - 1] < dates[t]))
            throw InvalidArgument("dates must be strictly increasing");
    for (Eigen::Index k = 0; k < prices.rows(); ++k)
        for (Eigen::Index t = 0; t < prices.cols(); ++t)
            if (!(prices(k, t) > 0.0))
                throw DegenerateData("non-positive price for '" + tickers[k] + "' on " +
                                     dates[t]);
}

CovarianceEstimate CovarianceEstimate::from_covariance(const Matrix& cov)
{
    if (cov.rows() != cov.cols() || cov.rows() == 0)
        throw InvalidArgument("covariance must be a non-empty square matrix");
    double scale = cov.cwiseAbs().maxCoeff();
    if (((cov - cov.transpose()).cwiseAbs().maxCoeff()) > 1e-12 * std::max(scale, 1.0))
        throw InvalidArgument("covariance is not symmetric");
    CovarianceEstimate est;
    est.sigma = cov.diagonal();
    if ((est.sigma.array() <= 0.0).any())
        throw InvalidArgument("covariance has a non-positive diagonal entry");
    est.sigma = est.sigma.cwiseSqrt();
    est.cov = 0.5 * (cov + cov.transpose());
    Vector inv = est.sigma.cwiseInverse();
    est.corr = inv.asDiagonal() * est.cov * inv.asDiagonal();
    est.corr.diagonal().setOnes();
    return est;
}

PriceTable read_price_csv(std::istream& in)
{
    RawPanel raw = read_panel(in);
    PriceTable table;
    table.dates = raw.dates;

    std::vector<std::size_t> kept;
    for (std::size_t k = 0; k < raw.tickers.size(); ++k) {
        const auto& col = raw.columns[k];
        bool gap = std::any_of(col.begin(), col.end(), [](const auto& v) { return !v; });
        if (gap) {
            table.dropped.push_back(raw.tickers[k]);
            continue;
        }
        for (std::size_t t = 0; t < col.size(); ++t)
            if (!(*col[t] > 0.0))
                throw ParseError("non-positive price for '" + raw.tickers[k] + "'", raw.first_line[t]);
        kept.push_back(k);
    }
    if (kept.empty())
        throw DegenerateData("every ticker has missing values");

    table.prices.resize(static_cast<Eigen::Index>(kept.size()),
                        static_cast<Eigen::Index>(raw.dates.size()));
    for (std::size_t i = 0; i < kept.size(); ++i) {
        table.tickers.push_back(raw.tickers[kept[i]]);
        for (std::size_t t = 0; t < raw.dates.size(); ++t)
            table.prices(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) =
                *raw.columns[kept[i]][t];
    }
    return table;
}

PriceTable read_price_csv(const std::filesystem::path& path)
{
    auto in = open_input(path);
    return read_price_csv(in);
}

ReturnMatrix read_return_csv(std::istream& in, int delta_t)
{
    if (delta_t < 1)
        throw InvalidArgument("delta_t must be positive");
    RawPanel raw = read_panel(in);
    ReturnMatrix out;
    out.tickers = raw.tickers;
    out.dates = raw.dates;
    out.delta_t = delta_t;
    out.returns.resize(static_cast<Eigen::Index>(raw.tickers.size()),
                       static_cast<Eigen::Index>(raw.dates.size()));
    for (std::size_t k = 0; k < raw.tickers.size(); ++k)
        for (std::size_t t = 0; t < raw.dates.size(); ++t) {
            const auto& v = raw.columns[k][t];
            if (!v)
                throw ParseError("missing return for '" + raw.tickers[k] + "'", raw.first_line[t]);
            out.returns(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t)) = *v;
        }
    return out;
}

ReturnMatrix read_return_csv(const std::filesystem::path& path, int delta_t)
{
    auto in = open_input(path);
    return read_return_csv(in, delta_t);
}

void write_return_csv(const ReturnMatrix& returns, std::ostream& out)
{
    auto old = out.precision(17);
    out << "date";
    for (const auto& t : returns.tickers)
        out << ',' << t;
    out << '\n';
    for (std::size_t t = 0; t < returns.length(); ++t) {
        out << returns.dates[t];
        for (std::size_t k = 0; k < returns.companies(); ++k)
            out << ',' << returns.returns(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t));
        out << '\n';
    }
    out.precision(old);
}

void write_return_csv(const ReturnMatrix& returns, const std::filesystem::path& path)
{
    auto out = open_output(path);
    write_return_csv(returns, out);
}

void write_matrix_csv(const Matrix& m, const std::vector<std::string>& tickers, std::ostream& out)
{
    auto old = out.precision(17);
    out << "ticker";
    for (const auto& t : tickers)
        out << ',' << t;
    out << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out << tickers[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out << ',' << m(i, j);
        out << '\n';
    }
    out.precision(old);
}

void write_volatility_csv(const VolatilitySeries& vol, std::ostream& out)
{
    auto old = out.precision(17);
    out << "date,ticker,volatility\n";
    for (std::size_t w = 0; w < vol.windows.size(); ++w)
        for (std::size_t k = 0; k < vol.tickers.size(); ++k)
            out << vol.window_dates[w] << ',' << vol.tickers[k] << ','
                << vol.vol(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(w)) << '\n';
    out.precision(old);
}

ReturnMatrix compute_returns(const PriceTable& prices, int delta_t)
{
    prices.validate();
    if (delta_t < 1)
        throw InvalidArgument("delta_t must be a positive number of trading days");
    if (static_cast<std::size_t>(delta_t) >= prices.length())
        throw InvalidArgument("delta_t = " + std::to_string(delta_t) +
                              " is not shorter than the series length " +
                              std::to_string(prices.length()));
    const Eigen::Index len = static_cast<Eigen::Index>(prices.length()) - delta_t;
    ReturnMatrix out;
    out.tickers = prices.tickers;
    out.delta_t = delta_t;
    out.dates.assign(prices.dates.begin(), prices.dates.begin() + len);
    const auto& s = prices.prices;
    out.returns = (s.rightCols(len) - s.leftCols(len)).cwiseQuotient(s.leftCols(len));
    return out;
}

std::vector<Window> rolling_windows(std::size_t total, std::size_t length, std::size_t stride)
{
    if (length == 0 || stride == 0)
        throw InvalidArgument("window length and stride must be positive");
    std::vector<Window> out;
    for (std::size_t start = 0; start + length <= total; start += stride)
        out.push_back({start, length});
    return out;
}

NormalizedSeries normalize_window(const ReturnMatrix& returns, Window window)
{
    require_window(returns, window);
    const auto cols = static_cast<Eigen::Index>(window.length);
    Matrix block = returns.returns.middleCols(static_cast<Eigen::Index>(window.start), cols);
    NormalizedSeries out;
    out.window = window;
    out.m.resize(block.rows(), cols);
    for (Eigen::Index k = 0; k < block.rows(); ++k) {
        auto row = block.row(k);
        double mean = row.mean();
        Eigen::RowVectorXd centered = row.array() - mean;
        double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(cols));
        double scale = row.cwiseAbs().maxCoeff();
        if (!(sd > 1e-13 * scale) || sd == 0.0)
            throw DegenerateData("series '" + returns.tickers[static_cast<std::size_t>(k)] +
                                 "' has zero variance in window starting at " +
                                 std::to_string(window.start));
        centered /= sd;
        // Second pass removes the residual mean left by rounding.
        centered.array() -= centered.mean();
        out.m.row(k) = centered;
    }
    return out;
}

CovarianceEstimate window_covariance(const ReturnMatrix& returns, Window window)
{
    NormalizedSeries norm = normalize_window(returns, window);
    const auto cols = static_cast<Eigen::Index>(window.length);
    Matrix block = returns.returns.middleCols(static_cast<Eigen::Index>(window.start), cols);

    CovarianceEstimate est;
    est.window = window;
    est.sigma.resize(block.rows());
    for (Eigen::Index k = 0; k < block.rows(); ++k) {
        Eigen::RowVectorXd centered = block.row(k).array() - block.row(k).mean();
        est.sigma(k) = std::sqrt(centered.squaredNorm() / static_cast<double>(cols));
    }

    const Eigen::Index dim = norm.m.rows();
    est.corr.resize(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        est.corr(i, i) = 1.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            double c = norm.m.row(i).dot(norm.m.row(j)) / static_cast<double>(cols);
            c = std::clamp(c, -1.0, 1.0);
            est.corr(i, j) = c;
            est.corr(j, i) = c;
        }
    }
    est.cov = est.sigma.asDiagonal() * est.corr * est.sigma.asDiagonal();
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < i; ++j)
            est.cov(j, i) = est.cov(i, j);
    est.rank_deficient = window.length < static_cast<std::size_t>(dim);
    return est;
}

VolatilitySeries rolling_volatility(const ReturnMatrix& returns, std::size_t window,
                                    std::size_t stride)
{
    if (window < 2)
        throw InvalidArgument("volatility window must be at least 2");
    if (window > returns.length())
        throw InvalidArgument("volatility window " + std::to_string(window) +
                              " exceeds series length " + std::to_string(returns.length()));
    VolatilitySeries out;
    out.tickers = returns.tickers;
    out.windows = rolling_windows(returns.length(), window, stride == 0 ? window : stride);
    out.vol.resize(returns.returns.rows(), static_cast<Eigen::Index>(out.windows.size()));
    for (std::size_t w = 0; w < out.windows.size(); ++w) {
        const auto& win = out.windows[w];
        out.window_dates.push_back(returns.dates[win.start]);
        auto block = returns.returns.middleCols(static_cast<Eigen::Index>(win.start),
                                                static_cast<Eigen::Index>(win.length));
        for (Eigen::Index k = 0; k < block.rows(); ++k) {
            // Shifting by the first entry first keeps constant rows exactly zero.
            Eigen::RowVectorXd shifted = block.row(k).array() - block(k, 0);
            Eigen::RowVectorXd centered = shifted.array() - shifted.mean();
            out.vol(k, static_cast<Eigen::Index>(w)) =
                std::sqrt(centered.squaredNorm() / static_cast<double>(win.length));
        }
    }
    return out;
}

CovarianceEstimate global_covariance(const ReturnMatrix& returns)
{
    return window_covariance(returns, Window{0, returns.length()});
}

} // namespace rmtfin
