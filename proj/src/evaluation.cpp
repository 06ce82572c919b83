#include "tenfac/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tenfac/io.hpp"
#include "tenfac/rank.hpp"

namespace tenfac {

namespace {

struct EstimatorOutcome {
    bool ok = false;
    std::vector<double> distance;
    double mse = 0.0;
};

struct ReplicationOutcome {
    std::vector<EstimatorOutcome> estimators;
    bool ie_hit = false;
    bool pe_hit = false;
    bool rank_ok = true;
};

ReplicationOutcome run_replication(const BenchmarkOptions& options, Index T, std::uint64_t rep) {
    DgpConfig config = options.setting.config(T, options.base_seed, rep);
    if (options.noiseless) {
        config.noise_scale = 0.0;
    }
    const SimulatedDataset data = generate(config);
    const Shape& ranks = options.setting.ranks;

    ReplicationOutcome out;
    for (const auto& spec : options.estimators) {
        EstimatorOutcome res;
        try {
            FitOptions fo;
            fo.estimator = spec;
            fo.tol = options.tol;
            TfmFit f = fit(data.x, ranks, fo);
            for (std::size_t k = 0; k < ranks.size(); ++k) {
                res.distance.push_back(loading_distance(f.loadings.loadings[k], data.true_loadings.loadings[k]));
            }
            res.mse = common_mse(estimate_common_components(f), data.true_common);
            res.ok = true;
        } catch (const std::exception&) {
            res.ok = false;
        }
        out.estimators.push_back(std::move(res));
    }
    if (options.r_max > 0) {
        RankOptions ro;
        ro.r_max = options.r_max;
        ro.max_sweeps = options.rank_sweeps;
        ro.penalty = options.penalty;
        try {
            out.ie_hit = ie_er(data.x, ro).ranks == ranks;
            out.pe_hit = pe_er(data.x, ro).ranks == ranks;
        } catch (const std::exception&) {
            out.rank_ok = false;
        }
    }
    return out;
}

std::string dims_string(const Shape& dims) {
    std::string s;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        if (k > 0) {
            s += 'x';
        }
        s += std::to_string(dims[k]);
    }
    return s;
}

} // namespace

BenchmarkReport run_benchmark(const BenchmarkOptions& options) {
    if (options.replications < 1) {
        throw std::domain_error("benchmark needs at least one replication");
    }
    if (options.estimators.empty()) {
        throw std::domain_error("benchmark needs at least one estimator");
    }
    std::vector<Index> Ts = options.Ts;
    if (Ts.empty()) {
        if (options.setting.Ts.empty()) {
            throw std::domain_error("no sample size given");
        }
        Ts.push_back(options.setting.Ts.front());
    }

    const std::size_t reps = static_cast<std::size_t>(options.replications);
    const std::size_t n_tasks = Ts.size() * reps;
    std::vector<ReplicationOutcome> outcomes(n_tasks);

    unsigned threads = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
    threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(n_tasks)));

    const auto start = std::chrono::steady_clock::now();
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t task = next++; task < n_tasks; task = next++) {
            const Index T = Ts[task / reps];
            outcomes[task] = run_replication(options, T, static_cast<std::uint64_t>(task % reps));
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    BenchmarkReport report;
    report.seconds_per_replication = elapsed / static_cast<double>(n_tasks);
    const std::size_t K = options.setting.dims.size();
    for (std::size_t ti = 0; ti < Ts.size(); ++ti) {
        for (std::size_t e = 0; e < options.estimators.size(); ++e) {
            const auto& spec = options.estimators[e];
            Index failures = 0;
            Index hits = 0, rank_runs = 0;
            for (std::size_t i = 0; i < reps; ++i) {
                const auto& o = outcomes[ti * reps + i];
                if (!o.estimators[e].ok) {
                    ++failures;
                }
                if (options.r_max > 0 && o.rank_ok) {
                    ++rank_runs;
                    hits += (spec.method == Method::initial ? o.ie_hit : o.pe_hit) ? 1 : 0;
                }
            }
            if (failures * 100 > options.replications) {
                throw std::runtime_error("estimator " + spec.tag() + " failed in " + std::to_string(failures) +
                                         " of " + std::to_string(options.replications) + " replications");
            }
            const Index ok = options.replications - failures;
            for (std::size_t k = 0; k < K; ++k) {
                double sum = 0.0, sum_mse = 0.0;
                for (std::size_t i = 0; i < reps; ++i) {
                    const auto& r = outcomes[ti * reps + i].estimators[e];
                    if (r.ok) {
                        sum += r.distance[k];
                        sum_mse += r.mse;
                    }
                }
                const double mean = sum / static_cast<double>(ok);
                double ss = 0.0;
                for (std::size_t i = 0; i < reps; ++i) {
                    const auto& r = outcomes[ti * reps + i].estimators[e];
                    if (r.ok) {
                        ss += (r.distance[k] - mean) * (r.distance[k] - mean);
                    }
                }
                BenchmarkCell cell;
                cell.setting = options.setting.name;
                cell.estimator = spec.tag();
                cell.mode = k;
                cell.T = Ts[ti];
                cell.dims = options.setting.dims;
                cell.mean_distance = mean;
                cell.se_distance = ok > 1 ? std::sqrt(ss / static_cast<double>(ok - 1)) /
                                                std::sqrt(static_cast<double>(ok))
                                          : 0.0;
                cell.mean_mse = sum_mse / static_cast<double>(ok);
                cell.rank_hit_rate = rank_runs > 0 ? static_cast<double>(hits) / static_cast<double>(rank_runs)
                                                   : std::numeric_limits<double>::quiet_NaN();
                cell.replications = options.replications;
                cell.failures = failures;
                report.cells.push_back(std::move(cell));
            }
        }
    }
    return report;
}

std::string benchmark_csv(const BenchmarkReport& report) {
    std::ostringstream os;
    os << "setting,estimator,mode,T,dims,mean_D,se_D,mean_MSE,rank_hit_rate,reps\n";
    for (const auto& c : report.cells) {
        os << c.setting << ',' << c.estimator << ',' << c.mode + 1 << ',' << c.T << ',' << dims_string(c.dims) << ','
           << format_double(c.mean_distance) << ',' << format_double(c.se_distance) << ','
           << format_double(c.mean_mse) << ',' << format_double(c.rank_hit_rate) << ',' << c.replications << '\n';
    }
    return os.str();
}

std::string benchmark_table(const BenchmarkReport& report) {
    std::ostringstream os;
    os << std::left << std::setw(11) << "setting" << std::setw(12) << "estimator" << std::right << std::setw(5)
       << "mode" << std::setw(7) << "T" << std::setw(12) << "dims" << std::setw(11) << "mean_D" << std::setw(11)
       << "se_D" << std::setw(12) << "mean_MSE" << std::setw(10) << "rank_hit" << std::setw(7) << "reps" << '\n';
    os << std::fixed;
    for (const auto& c : report.cells) {
        os << std::left << std::setw(11) << c.setting << std::setw(12) << c.estimator << std::right << std::setw(5)
           << c.mode + 1 << std::setw(7) << c.T << std::setw(12) << dims_string(c.dims) << std::setprecision(4)
           << std::setw(11) << c.mean_distance << std::setw(11) << c.se_distance << std::setprecision(6)
           << std::setw(12) << c.mean_mse << std::setprecision(3) << std::setw(10) << c.rank_hit_rate
           << std::setw(7) << c.replications << '\n';
    }
    os << std::defaultfloat << "seconds per replication: " << report.seconds_per_replication << '\n';
    return os.str();
}

std::vector<RatePoint> rate_curve(const BenchmarkReport& report, const std::string& estimator, std::size_t mode) {
    std::vector<RatePoint> points;
    for (const auto& c : report.cells) {
        if (c.estimator == estimator && c.mode == mode) {
            const double rest = static_cast<double>(shape_size_excluding(c.dims, mode));
            points.push_back({c.T, std::log(std::sqrt(static_cast<double>(c.T) * rest)), std::log(c.mean_distance)});
        }
    }
    std::sort(points.begin(), points.end(), [](const RatePoint& a, const RatePoint& b) { return a.T < b.T; });
    return points;
}

std::string rate_curve_csv(const std::vector<RatePoint>& points) {
    std::ostringstream os;
    os << "log_sqrt_Tp2,log_mean_D\n";
    for (const auto& p : points) {
        os << format_double(p.log_sqrt_tp2) << ',' << format_double(p.log_mean_distance) << '\n';
    }
    return os.str();
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::domain_error("slope needs at least two paired points");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) {
        throw std::domain_error("slope undefined for constant x");
    }
    return sxy / sxx;
}

std::vector<FoldResult> rolling_validate(const TensorSeries& x, const Shape& ranks, Index window, Index period,
                                         const FitOptions& options) {
    if (window < 1 || period < 1) {
        throw std::domain_error("window and period must be positive");
    }
    if (x.length() < (window + 1) * period) {
        throw std::domain_error("rolling validation needs T >= (window + 1) * period = " +
                                std::to_string((window + 1) * period) + ", got T = " + std::to_string(x.length()));
    }
    const Index folds = (x.length() - window * period) / period;
    const double p = static_cast<double>(shape_size(x.shape()));
    std::vector<FoldResult> out;
    for (Index f = 0; f < folds; ++f) {
        FoldResult r;
        r.fold = f;
        r.train_begin = f * period;
        r.train_end = r.train_begin + window * period;
        r.test_begin = r.train_end;
        r.test_end = r.test_begin + period;

        std::vector<DenseTensor> train(x.slices().begin() + r.train_begin, x.slices().begin() + r.train_end);
        std::vector<DenseTensor> test(x.slices().begin() + r.test_begin, x.slices().begin() + r.test_end);
        const TensorSeries test_series(std::move(test));
        const LoadingSet loadings = estimate_loadings(TensorSeries(std::move(train)), ranks, options);
        const TensorSeries recon = estimate_common_components(estimate_factors(test_series, loadings), loadings);

        double total = 0.0;
        for (Index t = 0; t < period; ++t) {
            total += (recon[t].vec() - test_series[t].vec()).squaredNorm();
        }
        r.mse = total / (static_cast<double>(period) * p);
        out.push_back(r);
    }
    return out;
}

} // namespace tenfac
