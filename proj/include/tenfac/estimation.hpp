#ifndef TENFAC_ESTIMATION_HPP
#define TENFAC_ESTIMATION_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tenfac/tensor.hpp"

/**
 * @file estimation.hpp
 * @brief Projected-PCA estimators for Tucker tensor factor models.
 *
 * Model: X_t = F_t ×_1 A_1 ... ×_K A_K + E_t, with A_k of size p_k x r_k
 * normalized so that A_k^T A_k / p_k = I. All mode indices in this API are
 * 0-based.
 */

namespace tenfac {

/// Raised when a requested computation would exceed a configured memory cap.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Per-mode loading matrices; `eigenvalues` holds the leading eigenvalues
/// of the matrix each loading was extracted from (empty for supplied truths).
struct LoadingSet {
    std::vector<Matrix> loadings;
    std::vector<Vector> eigenvalues;

    std::size_t order() const { return loadings.size(); }
    Shape ranks() const;
    Shape dims() const;

    bool operator==(const LoadingSet& other) const;
};

enum class Method { initial, projected, projected_star, iterative };

/// Estimator selector: "ie", "pe", "pe-star" or "iterate:S".
struct EstimatorSpec {
    Method method = Method::projected;
    int steps = 1;

    static EstimatorSpec parse(std::string_view tag);
    std::string tag() const;

    bool operator==(const EstimatorSpec&) const = default;
};

struct FitOptions {
    EstimatorSpec estimator;
    double tol = 1e-6;
    /// Upper bound on p_{-k} for the pe-star estimator.
    Index star_cap = 4096;
    bool center = false;
    bool scale = false;
};

/// Fitted model. `factors` has shape r_1 x ... x r_K and the input's length.
struct TfmFit {
    LoadingSet loadings;
    TensorSeries factors;
    EstimatorSpec estimator;
    int iterations_used = 0;
};

struct IterativeResult {
    LoadingSet loadings;
    int steps_used = 0;
    /// history[s] holds the step-s loadings, starting from the initial estimate.
    std::vector<LoadingSet> history;
};

/// M̂_k = (1/(T p)) Σ_t X_{k,t} X_{k,t}^T.
Matrix mode_covariance(const TensorSeries& x, std::size_t k);

/// M̂_{-k} = (1/(T p)) Σ_t X_{k,t}^T X_{k,t}, the p_{-k} x p_{-k} companion of mode_covariance.
Matrix mode_complement_covariance(const TensorSeries& x, std::size_t k);

/// M̃_k = (1/(T p_k)) Σ_t Y_t Y_t^T with Y_t = X_{k,t} B / p_{-k}.
Matrix projected_covariance(const TensorSeries& x, std::size_t k, const Matrix& b);

/// √p_k times the top-r eigenvectors of `m`.
Matrix scaled_eigenvectors(const Matrix& m, Index r, Vector* eigenvalues = nullptr);

/// Initial estimator: PCA of each mode-wise covariance M̂_k.
LoadingSet initial_loadings(const TensorSeries& x, const Shape& ranks);

/**
 * One-step projected estimator.
 *
 * Every mode is projected through the Kronecker product of the *same*
 * `init` loadings for the other modes; no sequential plug-in within a step.
 */
LoadingSet projected_loadings(const TensorSeries& x, const Shape& ranks, const LoadingSet& init);

/**
 * Projected estimator with B̂*_k taken from the leading eigenvectors of M̂_{-k}.
 *
 * Throws ResourceError when some p_{-k} exceeds `cap`, since M̂_{-k} is
 * materialized densely.
 */
LoadingSet projected_loadings_star(const TensorSeries& x, const Shape& ranks, Index cap = 4096);

/**
 * Repeated projection starting from the initial estimator.
 *
 * Step s re-projects all modes through the step s-1 loadings. Step 1 is
 * exactly projected_loadings. From step 2 on, iteration stops once
 * max_k D(A_k^(s), A_k^(s-1)) < tol.
 */
IterativeResult iterative_loadings(const TensorSeries& x, const Shape& ranks, int max_steps, double tol = 1e-6,
                                   bool keep_history = false);

/// F̂_t = (1/p) X_t ×_1 A_1^T ... ×_K A_K^T.
TensorSeries estimate_factors(const TensorSeries& x, const LoadingSet& loadings);

/// Ŝ_t = F̂_t ×_1 A_1 ... ×_K A_K.
TensorSeries estimate_common_components(const TensorSeries& factors, const LoadingSet& loadings);
TensorSeries estimate_common_components(const TfmFit& fit);

/// Per-entry centering and/or scaling across time. Entries with zero spread are left unscaled.
TensorSeries standardize(const TensorSeries& x, bool center, bool scale);

/// Loadings for the requested estimator, without factor extraction or preprocessing.
LoadingSet estimate_loadings(const TensorSeries& x, const Shape& ranks, const FitOptions& options,
                             int* iterations_used = nullptr);

/// Full pipeline: optional standardization, loadings, factors.
TfmFit fit(const TensorSeries& x, const Shape& ranks, const FitOptions& options = {});

} // namespace tenfac

#endif
