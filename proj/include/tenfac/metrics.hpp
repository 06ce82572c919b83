#ifndef TENFAC_METRICS_HPP
#define TENFAC_METRICS_HPP

#include "tenfac/tensor.hpp"

namespace tenfac {

/**
 * Distance between the column spaces of two loading matrices, in [0, 1].
 *
 * With Q and Q̂ the left singular vectors of `a` and `a_hat`,
 * D = sqrt(1 - tr(Q̂ Q̂^T Q Q^T) / r). Zero for identical spans, one for
 * orthogonal spans. Both arguments must have equal shape and full column
 * rank, otherwise std::domain_error.
 */
double loading_distance(const Matrix& a_hat, const Matrix& a);

/// (1/(T p)) Σ_t ||Ŝ_t - S_t||_F^2.
double common_mse(const TensorSeries& s_hat, const TensorSeries& s);

} // namespace tenfac

#endif
