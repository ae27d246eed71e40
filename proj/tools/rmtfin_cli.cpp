// rmtfin command-line front end. Talks to the library only through the C API.

#include "rmtfin/rmtfin.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitUsage = 2,
    kExitParse = 3,
    kExitNumerical = 4,
    kExitDegenerate = 5,
    kExitIo = 6,
    kExitNoSolution = 7,
};

int exit_code_for(rmtfin_status status)
{
    switch (status) {
    case RMTFIN_OK: return kExitOk;
    case RMTFIN_ERR_INVALID_ARGUMENT: return kExitUsage;
    case RMTFIN_ERR_PARSE: return kExitParse;
    case RMTFIN_ERR_NUMERICAL: return kExitNumerical;
    case RMTFIN_ERR_DEGENERATE: return kExitDegenerate;
    case RMTFIN_ERR_NO_SOLUTION: return kExitNoSolution;
    case RMTFIN_ERR_IO: return kExitIo;
    case RMTFIN_ERR_INTERNAL: return kExitInternal;
    }
    return kExitInternal;
}

struct Failure {
    int code;
    std::string message;
};

void check(rmtfin_status status)
{
    if (status != RMTFIN_OK)
        throw Failure{exit_code_for(status), rmtfin_last_error()};
}

[[noreturn]] void usage_error(const std::string& message) { throw Failure{kExitUsage, message}; }

template <class T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};
using Prices = std::unique_ptr<rmtfin_prices, Deleter<rmtfin_prices, rmtfin_prices_free>>;
using Returns = std::unique_ptr<rmtfin_returns, Deleter<rmtfin_returns, rmtfin_returns_free>>;
using Volatility = std::unique_ptr<rmtfin_volatility, Deleter<rmtfin_volatility, rmtfin_volatility_free>>;
using Cov = std::unique_ptr<rmtfin_cov, Deleter<rmtfin_cov, rmtfin_cov_free>>;
using Samples = std::unique_ptr<rmtfin_samples, Deleter<rmtfin_samples, rmtfin_samples_free>>;
using Hist = std::unique_ptr<rmtfin_histogram, Deleter<rmtfin_histogram, rmtfin_histogram_free>>;
using Fit = std::unique_ptr<rmtfin_fit, Deleter<rmtfin_fit, rmtfin_fit_free>>;

template <class H, class F, class... Args>
H make(F f, Args... args)
{
    typename H::pointer raw = nullptr;
    check(f(args..., &raw));
    return H(raw);
}

// Cramer-von Mises critical values for a fully specified null.
constexpr double kCvm10 = 0.347;
constexpr double kCvm5 = 0.461;
constexpr double kCvm1 = 0.743;

struct RunConfig {
    std::string command;
    std::string input;
    std::string input_kind = "prices";
    std::vector<int> delta_t{1};
    std::size_t window = 0; // command-specific default when 0
    std::size_t stride = 0;
    int n_min = 1;
    int n_max = 60;
    std::uint64_t seed = 1;
    std::string route = "matrix";
    std::string out_dir = ".";
    std::string format = "csv";
    std::size_t bins = 0;
    // simulate
    std::size_t k = 30;
    int n_dof = 5;
    std::size_t length = 100000;
    std::vector<std::size_t> blocks;
    double c_in = 0.0;
    double c_out = 0.0;
    double volatility = 1.0;

    json to_json() const
    {
        json j = {{"command", command},      {"input", input},     {"input_kind", input_kind},
                  {"delta_t", delta_t},      {"window", window},   {"stride", stride},
                  {"n_min", n_min},          {"n_max", n_max},     {"seed", seed},
                  {"route", route},          {"out_dir", out_dir}, {"format", format},
                  {"bins", bins}};
        if (command == "simulate") {
            j["k"] = k;
            j["n_dof"] = n_dof;
            j["length"] = length;
            j["blocks"] = blocks;
            j["c_in"] = c_in;
            j["c_out"] = c_out;
            j["volatility"] = volatility;
        }
        return j;
    }
};

// Tabular artifact written as CSV, or embedded in the JSON document.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;
};

std::string format_cell(const json& v)
{
    if (v.is_string())
        return v.get<std::string>();
    if (v.is_null())
        return "";
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::isinf(d))
            return d > 0 ? "inf" : "-inf";
        std::ostringstream out;
        out << std::setprecision(17) << d;
        return out.str();
    }
    return v.dump();
}

json cell_json(const json& v)
{
    if (v.is_number_float() && !std::isfinite(v.get<double>()))
        return nullptr;
    return v;
}

class Output {
public:
    explicit Output(const RunConfig& config) : config_(config)
    {
        std::error_code ec;
        fs::create_directories(config.out_dir, ec);
        if (ec)
            throw Failure{kExitIo, "cannot create output directory '" + config.out_dir + "'"};
        meta_ = {{"config", config.to_json()},
                 {"library_version", rmtfin_version()},
                 {"seed", config.seed}};
    }

    json& meta() { return meta_; }

    fs::path path(const std::string& file) const { return fs::path(config_.out_dir) / file; }

    void add(Table table) { tables_.push_back(std::move(table)); }

    // Files produced through the C API (CSV panels) rather than tables.
    void note_file(const std::string& file) { files_.push_back(file); }

    void finish()
    {
        const std::string& stem = config_.command;
        if (config_.format == "json") {
            json doc = meta_;
            for (const auto& t : tables_) {
                json rows = json::array();
                for (const auto& row : t.rows) {
                    json obj = json::object();
                    for (std::size_t i = 0; i < t.columns.size(); ++i)
                        obj[t.columns[i]] = cell_json(row[i]);
                    rows.push_back(std::move(obj));
                }
                doc["tables"][t.name] = std::move(rows);
            }
            doc["files"] = files_;
            write_text(path(stem + ".json"), doc.dump(2) + "\n");
            return;
        }
        for (const auto& t : tables_) {
            std::ostringstream out;
            for (std::size_t i = 0; i < t.columns.size(); ++i)
                out << (i ? "," : "") << t.columns[i];
            out << '\n';
            for (const auto& row : t.rows) {
                for (std::size_t i = 0; i < row.size(); ++i)
                    out << (i ? "," : "") << format_cell(row[i]);
                out << '\n';
            }
            const std::string file = t.name + ".csv";
            write_text(path(file), out.str());
            files_.push_back(file);
        }
        json sidecar = meta_;
        sidecar["files"] = files_;
        write_text(path(stem + ".json"), sidecar.dump(2) + "\n");
    }

private:
    static void write_text(const fs::path& p, const std::string& text)
    {
        std::ofstream out(p, std::ios::binary);
        if (!out)
            throw Failure{kExitIo, "cannot write '" + p.string() + "'"};
        out << text;
    }

    const RunConfig& config_;
    json meta_;
    std::vector<Table> tables_;
    std::vector<std::string> files_;
};

void require_input(const RunConfig& config)
{
    if (config.input.empty())
        usage_error(config.command + ": --input is required");
}

int single_delta_t(const RunConfig& config)
{
    if (config.delta_t.size() != 1)
        usage_error(config.command + ": expects a single --delta-t value");
    return config.delta_t.front();
}

struct LoadedReturns {
    Returns returns;
    std::vector<std::string> dropped;
};

LoadedReturns load_returns(const RunConfig& config, int delta_t)
{
    require_input(config);
    LoadedReturns out;
    if (config.input_kind == "returns") {
        out.returns = make<Returns>(rmtfin_returns_read_csv, config.input.c_str(), delta_t);
        return out;
    }
    auto prices = make<Prices>(rmtfin_prices_read_csv, config.input.c_str());
    for (std::size_t i = 0; i < rmtfin_prices_dropped_count(prices.get()); ++i)
        out.dropped.emplace_back(rmtfin_prices_dropped(prices.get(), i));
    out.returns = make<Returns>(rmtfin_returns_compute, prices.get(), delta_t);
    return out;
}

std::vector<std::string> tickers_of(const rmtfin_returns* r)
{
    std::vector<std::string> out;
    for (std::size_t k = 0; k < rmtfin_returns_companies(r); ++k)
        out.emplace_back(rmtfin_returns_ticker(r, k));
    return out;
}

Table returns_table(const rmtfin_returns* r, const std::string& name)
{
    Table t{name, {"date"}, {}};
    for (auto& s : tickers_of(r))
        t.columns.push_back(s);
    for (std::size_t i = 0; i < rmtfin_returns_length(r); ++i) {
        std::vector<json> row{rmtfin_returns_date(r, i)};
        for (std::size_t k = 0; k < rmtfin_returns_companies(r); ++k)
            row.emplace_back(rmtfin_returns_value(r, k, i));
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_panel(Output& out, const RunConfig& config, const rmtfin_returns* r, const std::string& name)
{
    if (config.format == "json") {
        out.add(returns_table(r, name));
        return;
    }
    const std::string file = name + ".csv";
    check(rmtfin_returns_write_csv(r, out.path(file).string().c_str()));
    out.note_file(file);
}

double normal_density(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double marginal_density(double x, int n)
{
    double v = 0.0;
    check(rmtfin_marginal_pdf(x, n, &v));
    return v;
}

// ---- commands --------------------------------------------------------------

void cmd_returns(const RunConfig& config)
{
    const int dt = single_delta_t(config);
    auto loaded = load_returns(config, dt);
    Output out(config);
    out.meta()["delta_t"] = dt;
    out.meta()["rows"] = rmtfin_returns_length(loaded.returns.get());
    out.meta()["tickers"] = tickers_of(loaded.returns.get());
    out.meta()["dropped_tickers"] = loaded.dropped;
    write_panel(out, config, loaded.returns.get(), "returns");
    out.finish();
}

void cmd_volatility(const RunConfig& config)
{
    const int dt = single_delta_t(config);
    const std::size_t window = config.window ? config.window : 60;
    auto loaded = load_returns(config, dt);
    auto vol = make<Volatility>(rmtfin_volatility_compute, loaded.returns.get(), window, config.stride);

    Output out(config);
    out.meta()["delta_t"] = dt;
    out.meta()["window"] = window;
    out.meta()["stride"] = config.stride ? config.stride : window;
    out.meta()["windows"] = rmtfin_volatility_windows(vol.get());
    out.meta()["dropped_tickers"] = loaded.dropped;
    if (config.format == "json") {
        Table t{"volatility", {"date", "ticker", "volatility"}, {}};
        const auto tickers = tickers_of(loaded.returns.get());
        const std::size_t stride = config.stride ? config.stride : window;
        for (std::size_t w = 0; w < rmtfin_volatility_windows(vol.get()); ++w)
            for (std::size_t k = 0; k < tickers.size(); ++k)
                t.rows.push_back({rmtfin_returns_date(loaded.returns.get(), w * stride), tickers[k],
                                  rmtfin_volatility_value(vol.get(), k, w)});
        out.add(std::move(t));
    } else {
        check(rmtfin_volatility_write_csv(vol.get(), out.path("volatility.csv").string().c_str()));
        out.note_file("volatility.csv");
    }
    out.finish();
}

void cmd_gausstest(const RunConfig& config)
{
    const int dt = single_delta_t(config);
    const std::size_t window = config.window ? config.window : 25;
    auto loaded = load_returns(config, dt);
    auto samples =
        make<Samples>(rmtfin_aggregate_pairwise, loaded.returns.get(), window, config.stride);
    double cvm = 0.0;
    check(rmtfin_samples_cvm_normal(samples.get(), &cvm));
    auto hist = make<Hist>(rmtfin_histogram_make, samples.get(), config.bins);

    Output out(config);
    out.meta()["delta_t"] = dt;
    out.meta()["window"] = window;
    out.meta()["stride"] = config.stride ? config.stride : window;
    out.meta()["sample_count"] = rmtfin_samples_size(samples.get());
    out.meta()["skipped_pairs"] = rmtfin_samples_skipped(samples.get());
    out.meta()["cvm_statistic"] = cvm;
    out.meta()["cvm_critical_values"] = {{"0.10", kCvm10}, {"0.05", kCvm5}, {"0.01", kCvm1}};
    out.meta()["passes_at_1pct"] = cvm < kCvm1;
    out.meta()["histogram"] = {{"rule", rmtfin_histogram_rule(hist.get())},
                               {"bins", rmtfin_histogram_bins(hist.get())},
                               {"width", rmtfin_histogram_width(hist.get())}};
    out.meta()["dropped_tickers"] = loaded.dropped;

    Table t{"gausstest_histogram", {"r_tilde", "count", "density", "normal_density"}, {}};
    for (std::size_t i = 0; i < rmtfin_histogram_bins(hist.get()); ++i) {
        const double x = rmtfin_histogram_center(hist.get(), i);
        t.rows.push_back({x, rmtfin_histogram_count(hist.get(), i),
                          rmtfin_histogram_density(hist.get(), i), normal_density(x)});
    }
    out.add(std::move(t));
    out.finish();
    std::cout << "cvm " << cvm << " (1% critical value " << kCvm1 << "), samples "
              << rmtfin_samples_size(samples.get()) << ", skipped pairs "
              << rmtfin_samples_skipped(samples.get()) << '\n';
}

struct FitResult {
    int n_selected = 0;
    double statistic = 0.0;
    std::vector<std::pair<int, double>> table;
    std::size_t sample_count = 0;
    json moment; // null when there is no solution
    Samples samples;
};

FitResult run_fit(const RunConfig& config, const rmtfin_returns* returns)
{
    auto cov = make<Cov>(rmtfin_cov_global, returns);
    FitResult res;
    res.samples = make<Samples>(rmtfin_aggregate_full, returns, cov.get());
    auto fit = make<Fit>(rmtfin_fit_n, res.samples.get(), config.n_min, config.n_max);
    res.n_selected = rmtfin_fit_selected(fit.get());
    res.sample_count = rmtfin_fit_sample_count(fit.get());
    for (std::size_t i = 0; i < rmtfin_fit_entries(fit.get()); ++i) {
        int n = 0;
        double s = 0.0;
        check(rmtfin_fit_entry(fit.get(), i, &n, &s));
        res.table.emplace_back(n, s);
        if (n == res.n_selected)
            res.statistic = s;
    }
    double n_est = 0.0;
    double mean = 0.0;
    int saturated = 0;
    const rmtfin_status st = rmtfin_moment_match_n(returns, cov.get(), &n_est, &saturated, &mean);
    if (st == RMTFIN_OK) {
        res.moment = {{"n", n_est},
                      {"saturated", saturated != 0},
                      {"sample_mean_sqrt_bilinear", mean},
                      {"consistent_with_cvm", saturated == 0 && std::abs(n_est - res.n_selected) <= 2.0}};
    } else if (st == RMTFIN_ERR_NO_SOLUTION) {
        res.moment = {{"error", rmtfin_last_error()}};
    } else {
        check(st);
    }
    return res;
}

void cmd_fit(const RunConfig& config)
{
    const int dt = single_delta_t(config);
    auto loaded = load_returns(config, dt);
    FitResult res = run_fit(config, loaded.returns.get());
    auto hist = make<Hist>(rmtfin_histogram_make, res.samples.get(), config.bins);

    Output out(config);
    json report = {{"n_selected", res.n_selected},
                   {"cvm_selected", res.statistic},
                   {"sample_count", res.sample_count},
                   {"delta_t", dt},
                   {"n_range", {config.n_min, config.n_max}},
                   {"moment_n_estimate", res.moment}};
    out.meta()["fit_report"] = report;
    out.meta()["histogram"] = {{"rule", rmtfin_histogram_rule(hist.get())},
                               {"bins", rmtfin_histogram_bins(hist.get())},
                               {"width", rmtfin_histogram_width(hist.get())}};
    out.meta()["dropped_tickers"] = loaded.dropped;

    Table cvm{"fit_cvm", {"n", "cvm"}, {}};
    for (auto [n, s] : res.table)
        cvm.rows.push_back({n, s});
    out.add(std::move(cvm));

    Table h{"fit_histogram",
            {"r_tilde", "count", "density", "model_density", "log_density", "log_model_density"},
            {}};
    for (std::size_t i = 0; i < rmtfin_histogram_bins(hist.get()); ++i) {
        const double x = rmtfin_histogram_center(hist.get(), i);
        const double d = rmtfin_histogram_density(hist.get(), i);
        const double m = marginal_density(x, res.n_selected);
        h.rows.push_back({x, rmtfin_histogram_count(hist.get(), i), d, m, std::log(d), std::log(m)});
    }
    out.add(std::move(h));
    out.finish();

    std::cout << "N = " << res.n_selected << " (cvm " << res.statistic << ", " << res.sample_count
              << " samples)";
    if (res.moment.contains("n"))
        std::cout << ", moment estimate " << (res.moment["saturated"].get<bool>() ? ">= " : "")
                  << res.moment["n"].get<double>();
    std::cout << '\n';
    if (res.moment.contains("consistent_with_cvm") && !res.moment["consistent_with_cvm"].get<bool>())
        std::cerr << "warning: moment estimate differs from the fitted N by more than 2\n";
}

void cmd_simulate(const RunConfig& config)
{
    rmtfin_market_spec spec = rmtfin_market_spec_default();
    spec.k = config.k;
    spec.n_dof = config.n_dof;
    spec.block_sizes = config.blocks.empty() ? nullptr : config.blocks.data();
    spec.block_count = config.blocks.size();
    spec.c_in = config.c_in;
    spec.c_out = config.c_out;
    spec.length = config.length;
    spec.volatility = config.volatility;
    if (config.route == "matrix")
        spec.route = RMTFIN_ROUTE_MATRIX;
    else if (config.route == "scalar")
        spec.route = RMTFIN_ROUTE_SCALAR;
    else
        usage_error("simulate: --route must be matrix or scalar");
    auto returns = make<Returns>(rmtfin_simulate_market, &spec, config.seed);

    Output out(config);
    out.meta()["rng_algorithm"] = rmtfin_rng_algorithm();
    out.meta()["model"] = {{"k", config.k},         {"n_dof", config.n_dof},
                           {"blocks", config.blocks}, {"c_in", config.c_in},
                           {"c_out", config.c_out},   {"volatility", config.volatility},
                           {"length", config.length}, {"route", config.route}};
    write_panel(out, config, returns.get(), "simulated_returns");
    out.finish();
}

void cmd_ndep(const RunConfig& config)
{
    if (config.delta_t.empty())
        usage_error("ndep: --delta-t list must not be empty");
    require_input(config);
    if (config.input_kind != "prices")
        usage_error("ndep: needs a price panel (--input-kind prices)");
    auto prices = make<Prices>(rmtfin_prices_read_csv, config.input.c_str());

    Output out(config);
    Table t{"ndep", {"delta_t", "n_selected", "cvm", "moment_n", "moment_saturated"}, {}};
    for (int dt : config.delta_t) {
        auto returns = make<Returns>(rmtfin_returns_compute, prices.get(), dt);
        FitResult res = run_fit(config, returns.get());
        json moment_n = res.moment.contains("n") ? res.moment["n"] : json(nullptr);
        json sat = res.moment.contains("saturated") ? res.moment["saturated"] : json(nullptr);
        t.rows.push_back({dt, res.n_selected, res.statistic, moment_n, sat});
        std::cout << "delta_t " << dt << ": N = " << res.n_selected << '\n';
    }
    std::vector<std::string> dropped;
    for (std::size_t i = 0; i < rmtfin_prices_dropped_count(prices.get()); ++i)
        dropped.emplace_back(rmtfin_prices_dropped(prices.get(), i));
    out.meta()["dropped_tickers"] = dropped;
    out.add(std::move(t));
    out.finish();
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Wishart-compounded heavy-tailed return distributions"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", std::string(rmtfin_version()));

    RunConfig config;
    std::string delta_t_list;
    std::string blocks_list;

    auto add_common = [&](CLI::App* sub, bool data_input) {
        sub->add_option("--out-dir", config.out_dir, "Output directory")->capture_default_str();
        sub->add_option("--format", config.format, "Artifact format")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
        sub->add_option("--seed", config.seed, "Random seed")->capture_default_str();
        if (data_input) {
            sub->add_option("--input", config.input, "Input CSV panel")->required();
            sub->add_option("--input-kind", config.input_kind, "Input panel kind")
                ->check(CLI::IsMember({"prices", "returns"}))
                ->capture_default_str();
            sub->add_option("--delta-t", delta_t_list,
                            "Return interval in trading days (comma list for ndep)")
                ->default_str("1");
        }
    };

    auto* returns = app.add_subcommand("returns", "Compute returns from a price panel");
    add_common(returns, true);

    auto* volatility = app.add_subcommand("volatility", "Rolling volatility per ticker");
    add_common(volatility, true);
    volatility->add_option("--window", config.window, "Window length T (default 60)");
    volatility->add_option("--stride", config.stride, "Window stride (default T)");

    auto* gausstest = app.add_subcommand("gausstest", "Pairwise fixed-covariance Gaussian test");
    add_common(gausstest, true);
    gausstest->add_option("--window", config.window, "Window length T (default 25)");
    gausstest->add_option("--stride", config.stride, "Window stride (default T)");
    gausstest->add_option("--bins", config.bins, "Histogram bins (0 = Freedman-Diaconis)");

    auto* fit = app.add_subcommand("fit", "Fit the degrees of freedom N");
    add_common(fit, true);
    fit->add_option("--n-min", config.n_min, "Smallest candidate N")->capture_default_str();
    fit->add_option("--n-max", config.n_max, "Largest candidate N")->capture_default_str();
    fit->add_option("--bins", config.bins, "Histogram bins (0 = Freedman-Diaconis)");

    auto* ndep = app.add_subcommand("ndep", "Fitted N versus return interval");
    add_common(ndep, true);
    ndep->add_option("--n-min", config.n_min, "Smallest candidate N")->capture_default_str();
    ndep->add_option("--n-max", config.n_max, "Largest candidate N")->capture_default_str();

    auto* simulate = app.add_subcommand("simulate", "Synthetic sector-block market");
    add_common(simulate, false);
    simulate->add_option("--k", config.k, "Number of companies")->capture_default_str();
    simulate->add_option("--n-dof", config.n_dof, "Ensemble degrees of freedom N")->capture_default_str();
    simulate->add_option("--length", config.length, "Number of return vectors")->capture_default_str();
    simulate->add_option("--blocks", blocks_list, "Comma-separated sector sizes");
    simulate->add_option("--c-in", config.c_in, "Within-sector correlation")->capture_default_str();
    simulate->add_option("--c-out", config.c_out, "Cross-sector correlation")->capture_default_str();
    simulate->add_option("--volatility", config.volatility, "Common volatility")->capture_default_str();
    simulate->add_option("--route", config.route, "Sampling route")
        ->check(CLI::IsMember({"matrix", "scalar"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        config.command = app.get_subcommands().front()->get_name();
        if (!delta_t_list.empty()) {
            config.delta_t.clear();
            for (const auto& item : split_list(delta_t_list)) {
                try {
                    config.delta_t.push_back(std::stoi(item));
                } catch (const std::exception&) {
                    usage_error("invalid --delta-t entry '" + item + "'");
                }
            }
            if (config.delta_t.empty())
                usage_error("--delta-t list must not be empty");
        }
        for (const auto& item : split_list(blocks_list)) {
            try {
                config.blocks.push_back(std::stoul(item));
            } catch (const std::exception&) {
                usage_error("invalid --blocks entry '" + item + "'");
            }
        }

        if (config.command == "returns")
            cmd_returns(config);
        else if (config.command == "volatility")
            cmd_volatility(config);
        else if (config.command == "gausstest")
            cmd_gausstest(config);
        else if (config.command == "fit")
            cmd_fit(config);
        else if (config.command == "simulate")
            cmd_simulate(config);
        else if (config.command == "ndep")
            cmd_ndep(config);
    } catch (const Failure& f) {
        std::cerr << "error: " << config.command << ": " << f.message << '\n';
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << config.command << ": " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitOk;
}
