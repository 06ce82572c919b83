#ifndef TENFAC_RANK_HPP
#define TENFAC_RANK_HPP

#include <optional>
#include <vector>

#include "tenfac/tensor.hpp"

/**
 * @file rank.hpp
 * @brief Eigenvalue-ratio selection of the per-mode factor numbers.
 *
 * For a candidate matrix with descending eigenvalues λ_1 >= λ_2 >= ..., the
 * selected rank is argmax_{1<=j<=r_max} λ_j / (λ_{j+1} + c δ), with
 * δ = 1/sqrt(T p_{-k}) + 1/p_k. Ties go to the smallest j.
 *
 * Unless fixed by the caller, c is derived from the candidate matrix itself:
 * its mean eigenvalue trace/p_k by default, or the full eigenvalue sum. Either
 * way every ratio is invariant to rescaling the data.
 */

namespace tenfac {

struct RankEstimate {
    Shape ranks;
    /// Penalized ratios at j = 1..r_max for each mode, from the final sweep.
    std::vector<Vector> ratio_traces;
    int iterations = 0;
    bool converged = false;
};

struct RatioSelection {
    Index rank = 1;
    Vector ratios;
};

/// δ for mode k (0-based).
double penalty_delta(Index T, const Shape& shape, std::size_t k);

/// Sum of all eigenvalues, computed as the trace.
double trace_constant(const Matrix& m);

/// Argmax of the penalized ratios over j = 1..r_max; needs r_max + 1 eigenvalues.
RatioSelection select_by_ratio(const Vector& eigenvalues, double c, double delta, Index r_max);

enum class PenaltyConstant {
    /// trace(M) / p_k
    mean_eigenvalue,
    /// trace(M)
    eigenvalue_sum,
};

struct RankOptions {
    Index r_max = 8;
    /// Fixed penalty constant; derived per matrix from `penalty` when unset.
    std::optional<double> c;
    PenaltyConstant penalty = PenaltyConstant::mean_eigenvalue;
    /// Maximum sweeps for pe_er.
    int max_sweeps = 10;
    /// Refresh loadings from M̃_k instead of M̂_k between pe_er sweeps.
    bool update_from_projected = false;
};

/// Ratio criterion applied to each mode-wise covariance M̂_k.
RankEstimate ie_er(const TensorSeries& x, const RankOptions& options);

/**
 * Iterative ratio criterion on projected covariances.
 *
 * Starts from rank r_max in every mode; each sweep projects every mode through
 * the previous sweep's loadings, selects a rank from M̃_k, then refreshes the
 * mode-k loadings at that rank. Stops when no rank changes or after
 * max_sweeps sweeps.
 */
RankEstimate pe_er(const TensorSeries& x, const RankOptions& options);

} // namespace tenfac

#endif
