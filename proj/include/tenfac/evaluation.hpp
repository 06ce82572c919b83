#ifndef TENFAC_EVALUATION_HPP
#define TENFAC_EVALUATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "tenfac/estimation.hpp"
#include "tenfac/metrics.hpp"
#include "tenfac/rank.hpp"
#include "tenfac/simulation.hpp"

namespace tenfac {

struct BenchmarkOptions {
    Preset setting;
    /// Sample sizes to run; the preset's first T when empty.
    std::vector<Index> Ts;
    std::vector<EstimatorSpec> estimators;
    Index replications = 100;
    std::uint64_t base_seed = 0;
    /// Worker threads; 0 means std::thread::hardware_concurrency().
    unsigned threads = 0;
    /// When positive, also run rank selection with this r_max. The ie
    /// estimator is paired with ie-er, every other estimator with pe-er.
    Index r_max = 0;
    int rank_sweeps = 10;
    PenaltyConstant penalty = PenaltyConstant::mean_eigenvalue;
    double tol = 1e-6;
    bool noiseless = false;
};

/// One (estimator, mode, T) cell.
struct BenchmarkCell {
    std::string setting;
    std::string estimator;
    std::size_t mode = 0;  // 0-based
    Index T = 0;
    Shape dims;
    double mean_distance = 0.0;
    double se_distance = 0.0;
    double mean_mse = 0.0;
    /// Joint exact-recovery frequency of all ranks; NaN when rank selection is off.
    double rank_hit_rate = 0.0;
    Index replications = 0;
    Index failures = 0;
};

struct BenchmarkReport {
    std::vector<BenchmarkCell> cells;
    double seconds_per_replication = 0.0;
};

/**
 * Monte Carlo comparison of estimators on a simulated setting.
 *
 * Replication i uses the generator stream (base_seed, i) for every T, and
 * results are reduced in replication order, so the report does not depend on
 * the thread count. A replication whose estimator throws is counted as a
 * failure; more than 1% failures for any estimator aborts with
 * std::runtime_error.
 */
BenchmarkReport run_benchmark(const BenchmarkOptions& options);

/// Columns: setting,estimator,mode,T,dims,mean_D,se_D,mean_MSE,rank_hit_rate,reps.
std::string benchmark_csv(const BenchmarkReport& report);

/// Human-readable aligned table of the same cells.
std::string benchmark_table(const BenchmarkReport& report);

struct RatePoint {
    Index T = 0;
    double log_sqrt_tp2 = 0.0;
    double log_mean_distance = 0.0;
};

/// (log sqrt(T p_{-k}), log mean D) for one estimator and mode, ordered by T.
std::vector<RatePoint> rate_curve(const BenchmarkReport& report, const std::string& estimator, std::size_t mode);

/// Columns: log_sqrt_Tp2,log_mean_D.
std::string rate_curve_csv(const std::vector<RatePoint>& points);

/// Ordinary least squares slope of y on x.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

struct FoldResult {
    Index fold = 0;
    Index train_begin = 0;
    Index train_end = 0;  // exclusive
    Index test_begin = 0;
    Index test_end = 0;   // exclusive
    double mse = 0.0;
};

/**
 * Rolling out-of-sample reconstruction error.
 *
 * Fold f trains on slices [f·period, (f + window)·period) and scores the next
 * `period` slices. Each held-out slice is reconstructed as
 * ((1/p) X ×_k Â_k^T) ×_k Â_k with the training loadings, and the fold MSE
 * is (1/(period·p)) Σ ||X̂ - X||_F^2. Requires T >= (window + 1)·period.
 */
std::vector<FoldResult> rolling_validate(const TensorSeries& x, const Shape& ranks, Index window, Index period,
                                         const FitOptions& options);

} // namespace tenfac

#endif
