// Command-line front end: simulate, estimate, rank, benchmark, rolling.
//
// Exit codes: 0 success, 2 usage or validation error, 1 runtime failure.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tenfac/evaluation.hpp"
#include "tenfac/io.hpp"
#include "tenfac/rank.hpp"
#include "tenfac/simulation.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace tenfac;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> to_vector(const Vector& v) {
    return {v.data(), v.data() + v.size()};
}

fs::path with_suffix(const std::string& prefix, const std::string& suffix) {
    return fs::path(prefix + suffix);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out << text;
    if (!out.flush()) {
        throw IoError("failed writing '" + path.string() + "'");
    }
}

void write_series(const TensorSeries& x, const fs::path& path) {
    if (path.extension() == ".csv") {
        write_series_csv(x, path);
    } else {
        write_tsr(x, path);
    }
}

std::optional<Shape> optional_shape(const std::vector<Index>& shape) {
    if (shape.empty()) {
        return std::nullopt;
    }
    return Shape(shape.begin(), shape.end());
}

TensorSeries load_series(const std::string& path, const std::vector<Index>& shape) {
    if (shape.empty() && std::filesystem::path(path).extension() == ".csv") {
        throw UsageError("CSV input needs --shape");
    }
    return read_series(path, optional_shape(shape));
}

LoadingSet read_loadings(const std::string& prefix, std::size_t order) {
    LoadingSet set;
    for (std::size_t k = 0; k < order; ++k) {
        set.loadings.push_back(read_matrix_csv(with_suffix(prefix, ".A" + std::to_string(k + 1) + ".csv")));
    }
    return set;
}

void write_loadings(const LoadingSet& set, const std::string& prefix) {
    for (std::size_t k = 0; k < set.order(); ++k) {
        write_matrix_csv(set.loadings[k], with_suffix(prefix, ".A" + std::to_string(k + 1) + ".csv"));
    }
}

json rank_json(const RankEstimate& est, const std::string& method, Index r_max) {
    json traces = json::array();
    for (const auto& t : est.ratio_traces) {
        traces.push_back(to_vector(t));
    }
    return {{"method", method},
            {"r_max", r_max},
            {"ranks", est.ranks},
            {"ratio_traces", traces},
            {"iterations", est.iterations},
            {"converged", est.converged}};
}

unsigned thread_count(unsigned flag) {
    if (const char* env = std::getenv("TENFAC_THREADS")) {
        try {
            int v = std::stoi(env);
            if (v >= 1) {
                return static_cast<unsigned>(v);
            }
        } catch (const std::exception&) {
        }
        throw UsageError("TENFAC_THREADS must be a positive integer");
    }
    return flag;
}

PenaltyConstant parse_penalty(const std::string& name) {
    if (name == "mean") {
        return PenaltyConstant::mean_eigenvalue;
    }
    if (name == "sum") {
        return PenaltyConstant::eigenvalue_sum;
    }
    throw UsageError("unknown penalty constant '" + name + "' (expected mean or sum)");
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
    std::string preset;
    std::vector<Index> dims, ranks;
    Index T = 0;
    std::optional<double> phi, psi;
    std::uint64_t seed = 0;
    std::uint64_t rep = 0;
    bool noiseless = false;
    std::string output;
    std::string truth;
};

int run_simulate(const SimulateArgs& a) {
    DgpConfig config;
    if (!a.preset.empty()) {
        const Preset& p = preset(a.preset);
        config = p.config(p.Ts.front(), a.seed, a.rep);
    } else {
        config.ranks = Shape(a.dims.size(), 3);
    }
    if (!a.dims.empty()) {
        config.dims = Shape(a.dims.begin(), a.dims.end());
    }
    if (!a.ranks.empty()) {
        config.ranks = Shape(a.ranks.begin(), a.ranks.end());
    }
    if (config.dims.empty()) {
        throw UsageError("simulate needs --preset or --dims");
    }
    if (a.T > 0) {
        config.T = a.T;
    }
    if (a.phi) {
        config.phi = *a.phi;
    }
    if (a.psi) {
        config.psi = *a.psi;
    }
    config.seed = a.seed;
    config.replication_id = a.rep;
    config.noise_scale = a.noiseless ? 0.0 : 1.0;

    const SimulatedDataset data = generate(config);
    write_series(data.x, a.output);
    if (!a.truth.empty()) {
        write_loadings(data.true_loadings, a.truth);
        write_tsr(data.true_factors, with_suffix(a.truth, ".factors.tsr"));
        write_tsr(data.true_common, with_suffix(a.truth, ".common.tsr"));
    }
    json meta = {{"output", a.output},       {"shape", config.dims}, {"ranks", config.ranks},
                 {"T", config.T},            {"phi", config.phi},    {"psi", config.psi},
                 {"seed", config.seed},      {"replication", config.replication_id}};
    if (!a.preset.empty()) {
        meta["preset"] = a.preset;
    }
    if (!a.truth.empty()) {
        meta["truth"] = a.truth;
    }
    std::cout << meta.dump() << '\n';
    return 0;
}

// --- estimate ---------------------------------------------------------------

struct RankArgs {
    std::string method = "pe-er";
    Index r_max = 8;
    int sweeps = 10;
    std::optional<double> c;
    std::string penalty = "mean";
    bool update_from_projected = false;

    RankOptions options() const {
        RankOptions o;
        o.r_max = r_max;
        o.max_sweeps = sweeps;
        o.c = c;
        o.penalty = parse_penalty(penalty);
        o.update_from_projected = update_from_projected;
        return o;
    }

    RankEstimate run(const TensorSeries& x) const {
        if (method == "pe-er") {
            return pe_er(x, options());
        }
        if (method == "ie-er") {
            return ie_er(x, options());
        }
        throw UsageError("unknown rank method '" + method + "' (expected pe-er or ie-er)");
    }
};

struct EstimateArgs {
    std::string input;
    std::vector<Index> shape;
    std::vector<Index> ranks;
    bool auto_rank = false;
    RankArgs rank;
    std::string estimator = "pe";
    double tol = 1e-6;
    Index star_cap = 4096;
    bool center = false;
    bool scale = false;
    std::string output;
    std::string truth;
    bool report_distance = false;
};

int run_estimate(const EstimateArgs& a) {
    if (a.auto_rank == !a.ranks.empty()) {
        throw UsageError("give exactly one of --ranks or --auto-rank");
    }
    if (a.report_distance && a.truth.empty()) {
        throw UsageError("--report-distance needs --truth");
    }
    FitOptions options;
    options.estimator = EstimatorSpec::parse(a.estimator);
    options.tol = a.tol;
    options.star_cap = a.star_cap;
    options.center = a.center;
    options.scale = a.scale;

    const auto start = std::chrono::steady_clock::now();
    const TensorSeries x = load_series(a.input, a.shape);

    json report;
    Shape ranks(a.ranks.begin(), a.ranks.end());
    if (a.auto_rank) {
        auto est = a.rank.run(standardize(x, a.center, a.scale));
        ranks = est.ranks;
        report["rank_selection"] = rank_json(est, a.rank.method, a.rank.r_max);
    }
    const TfmFit result = fit(x, ranks, options);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    write_loadings(result.loadings, a.output);
    write_tsr(result.factors, with_suffix(a.output, ".factors.tsr"));

    json eig = json::array();
    for (const auto& v : result.loadings.eigenvalues) {
        eig.push_back(to_vector(v));
    }
    report["method"] = result.estimator.tag();
    report["ranks"] = ranks;
    report["shape"] = x.shape();
    report["T"] = x.length();
    report["eigenvalues"] = eig;
    report["iterations"] = result.iterations_used;
    report["center"] = a.center;
    report["scale"] = a.scale;
    report["timings"] = {{"total_seconds", seconds}};
    if (a.report_distance) {
        const LoadingSet truth = read_loadings(a.truth, x.order());
        json dist = json::array();
        for (std::size_t k = 0; k < x.order(); ++k) {
            dist.push_back(loading_distance(result.loadings.loadings[k], truth.loadings[k]));
        }
        report["distance"] = dist;
    }
    write_text(with_suffix(a.output, ".report.json"), report.dump(2) + "\n");
    std::cout << report.dump() << '\n';
    return 0;
}

// --- rank -------------------------------------------------------------------

struct RankCmdArgs {
    std::string input;
    std::vector<Index> shape;
    RankArgs rank;
    bool center = false;
    bool scale = false;
    std::string output;
};

int run_rank(const RankCmdArgs& a) {
    const TensorSeries x = standardize(load_series(a.input, a.shape), a.center, a.scale);
    const json out = rank_json(a.rank.run(x), a.rank.method, a.rank.r_max);
    if (!a.output.empty()) {
        write_text(a.output, out.dump(2) + "\n");
    }
    std::cout << out.dump() << '\n';
    return 0;
}

// --- benchmark --------------------------------------------------------------

struct BenchmarkArgs {
    std::string preset;
    std::vector<Index> Ts;
    Index reps = 100;
    std::vector<std::string> estimators{"ie", "pe"};
    std::uint64_t seed = 0;
    unsigned threads = 0;
    Index r_max = 0;
    std::string penalty = "mean";
    bool noiseless = false;
    std::string output;
    bool table = false;
    std::string figure_csv;
    std::string figure_estimator = "pe";
    int figure_mode = 1;
};

int run_bench(const BenchmarkArgs& a) {
    BenchmarkOptions options;
    options.setting = preset(a.preset);
    options.Ts = a.Ts;
    for (const auto& e : a.estimators) {
        options.estimators.push_back(EstimatorSpec::parse(e));
    }
    options.replications = a.reps;
    options.base_seed = a.seed;
    options.threads = thread_count(a.threads);
    options.r_max = a.r_max;
    options.penalty = parse_penalty(a.penalty);
    options.noiseless = a.noiseless;
    if (a.figure_mode < 1 || static_cast<std::size_t>(a.figure_mode) > options.setting.dims.size()) {
        throw UsageError("--figure-mode out of range");
    }

    const BenchmarkReport report = run_benchmark(options);
    const std::string csv = benchmark_csv(report);
    if (!a.output.empty()) {
        write_text(a.output, csv);
    }
    if (a.table) {
        std::cout << benchmark_table(report);
    } else if (a.output.empty()) {
        std::cout << csv;
    }
    if (!a.figure_csv.empty()) {
        const std::string tag = EstimatorSpec::parse(a.figure_estimator).tag();
        write_text(a.figure_csv,
                   rate_curve_csv(rate_curve(report, tag, static_cast<std::size_t>(a.figure_mode - 1))));
    }
    return 0;
}

// --- rolling ----------------------------------------------------------------

struct RollingArgs {
    std::string input;
    std::vector<Index> shape;
    std::vector<Index> ranks;
    Index window = 1;
    Index period = 12;
    std::string estimator = "pe";
    double tol = 1e-6;
    std::string output;
};

int run_rolling(const RollingArgs& a) {
    const TensorSeries x = load_series(a.input, a.shape);
    FitOptions options;
    options.estimator = EstimatorSpec::parse(a.estimator);
    options.tol = a.tol;
    const auto folds = rolling_validate(x, Shape(a.ranks.begin(), a.ranks.end()), a.window, a.period, options);
    std::string csv = "fold,train_begin,train_end,test_begin,test_end,mse\n";
    for (const auto& f : folds) {
        csv += std::to_string(f.fold + 1) + ',' + std::to_string(f.train_begin) + ',' + std::to_string(f.train_end) +
               ',' + std::to_string(f.test_begin) + ',' + std::to_string(f.test_end) + ',' + format_double(f.mse) +
               '\n';
    }
    if (!a.output.empty()) {
        write_text(a.output, csv);
    } else {
        std::cout << csv;
    }
    return 0;
}

void add_rank_options(CLI::App* cmd, RankArgs& r, bool with_method_flag_name) {
    cmd->add_option(with_method_flag_name ? "--method" : "--rank-method", r.method, "pe-er or ie-er")
        ->capture_default_str();
    cmd->add_option("--r-max", r.r_max, "Largest candidate rank")->capture_default_str();
    cmd->add_option("--sweeps", r.sweeps, "Maximum pe-er sweeps")->capture_default_str();
    cmd->add_option("--c", r.c, "Fixed penalty constant (overrides --penalty)");
    cmd->add_option("--penalty", r.penalty, "Penalty constant from each matrix: mean or sum of eigenvalues")
        ->capture_default_str();
    cmd->add_flag("--update-from-projected", r.update_from_projected,
                  "Refresh pe-er loadings from the projected covariance");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Projected-PCA estimation of tensor factor models"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Generate a simulated tensor series");
    simulate->add_option("--preset", sim.preset, "setting-a ... setting-f");
    simulate->add_option("--dims", sim.dims, "Tensor dimensions, e.g. 10,10,10")->delimiter(',');
    simulate->add_option("--ranks", sim.ranks, "Factor ranks, e.g. 3,3,3")->delimiter(',');
    simulate->add_option("--T", sim.T, "Number of time slices");
    simulate->add_option("--phi", sim.phi, "Factor AR(1) coefficient");
    simulate->add_option("--psi", sim.psi, "Noise AR(1) coefficient");
    simulate->add_option("--seed", sim.seed, "Base seed")->capture_default_str();
    simulate->add_option("--rep", sim.rep, "Replication id")->capture_default_str();
    simulate->add_flag("--noiseless", sim.noiseless, "Drop the idiosyncratic component");
    simulate->add_option("-o,--output", sim.output, "Output series (.tsr or .csv)")->required();
    simulate->add_option("--truth", sim.truth, "Prefix for true loadings, factors and common components");

    EstimateArgs est;
    auto* estimate = app.add_subcommand("estimate", "Estimate loadings and factors");
    estimate->add_option("-i,--input", est.input, "Input series (.tsr or .csv)")->required();
    estimate->add_option("--shape", est.shape, "Slice shape for CSV input")->delimiter(',');
    estimate->add_option("--ranks", est.ranks, "Factor ranks, e.g. 3,3,3")->delimiter(',');
    estimate->add_flag("--auto-rank", est.auto_rank, "Select ranks by eigenvalue ratio");
    add_rank_options(estimate, est.rank, false);
    estimate->add_option("--estimator", est.estimator, "ie, pe, pe-star or iterate:S")->capture_default_str();
    estimate->add_option("--tol", est.tol, "Early-stop tolerance for iterate:S")->capture_default_str();
    estimate->add_option("--star-cap", est.star_cap, "Largest p_{-k} allowed for pe-star")->capture_default_str();
    estimate->add_flag("--center", est.center, "Subtract the per-entry time mean");
    estimate->add_flag("--scale", est.scale, "Divide by the per-entry time standard deviation");
    estimate->add_option("-o,--output", est.output, "Output prefix")->required();
    estimate->add_option("--truth", est.truth, "Prefix of true loadings written by simulate --truth");
    estimate->add_flag("--report-distance", est.report_distance, "Add loading distances to the report");

    RankCmdArgs rk;
    auto* rank = app.add_subcommand("rank", "Select factor numbers");
    rank->add_option("-i,--input", rk.input, "Input series (.tsr or .csv)")->required();
    rank->add_option("--shape", rk.shape, "Slice shape for CSV input")->delimiter(',');
    add_rank_options(rank, rk.rank, true);
    rank->add_flag("--center", rk.center, "Subtract the per-entry time mean");
    rank->add_flag("--scale", rk.scale, "Divide by the per-entry time standard deviation");
    rank->add_option("-o,--output", rk.output, "Also write the JSON here");

    BenchmarkArgs bm;
    auto* bench = app.add_subcommand("benchmark", "Monte Carlo comparison on a preset");
    bench->add_option("--preset", bm.preset, "setting-a ... setting-f")->required();
    bench->add_option("--T", bm.Ts, "Sample sizes (default: first of the preset)")->delimiter(',');
    bench->add_option("--reps", bm.reps, "Replications")->capture_default_str();
    bench->add_option("--estimators", bm.estimators, "Comma-separated estimators")->delimiter(',');
    bench->add_option("--seed", bm.seed, "Base seed")->capture_default_str();
    bench->add_option("--threads", bm.threads, "Worker threads (0: all cores; TENFAC_THREADS overrides)");
    bench->add_option("--r-max", bm.r_max, "Also score rank selection with this r_max");
    bench->add_option("--penalty", bm.penalty, "Rank penalty constant: mean or sum")->capture_default_str();
    bench->add_flag("--noiseless", bm.noiseless, "Drop the idiosyncratic component");
    bench->add_option("-o,--output", bm.output, "CSV report path");
    bench->add_flag("--table", bm.table, "Print an aligned text table");
    bench->add_option("--figure-csv", bm.figure_csv, "Write (log_sqrt_Tp2, log_mean_D) points here");
    bench->add_option("--figure-estimator", bm.figure_estimator, "Estimator for --figure-csv")
        ->capture_default_str();
    bench->add_option("--figure-mode", bm.figure_mode, "1-based mode for --figure-csv")->capture_default_str();

    RollingArgs rl;
    auto* rolling = app.add_subcommand("rolling", "Rolling-window out-of-sample reconstruction error");
    rolling->add_option("-i,--input", rl.input, "Input series (.tsr or .csv)")->required();
    rolling->add_option("--shape", rl.shape, "Slice shape for CSV input")->delimiter(',');
    rolling->add_option("--ranks", rl.ranks, "Factor ranks")->delimiter(',')->required();
    rolling->add_option("--window", rl.window, "Training window in periods")->capture_default_str();
    rolling->add_option("--period", rl.period, "Slices per fold")->capture_default_str();
    rolling->add_option("--estimator", rl.estimator, "ie, pe, pe-star or iterate:S")->capture_default_str();
    rolling->add_option("--tol", rl.tol, "Early-stop tolerance for iterate:S")->capture_default_str();
    rolling->add_option("-o,--output", rl.output, "CSV path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*simulate) {
            return run_simulate(sim);
        }
        if (*estimate) {
            return run_estimate(est);
        }
        if (*rank) {
            return run_rank(rk);
        }
        if (*bench) {
            return run_bench(bm);
        }
        if (*rolling) {
            return run_rolling(rl);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
