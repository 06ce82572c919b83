#include "tenfac/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

namespace tenfac {

namespace {

Matrix column_basis(const Matrix& a) {
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || !(sv[sv.size() - 1] > 1e-12 * sv[0])) {
        throw std::domain_error("loading matrix is rank-deficient");
    }
    return svd.matrixU();
}

} // namespace

double loading_distance(const Matrix& a_hat, const Matrix& a) {
    if (a_hat.rows() != a.rows() || a_hat.cols() != a.cols()) {
        throw std::domain_error("loading matrices must have equal shapes");
    }
    if (a.cols() < 1 || a.cols() > a.rows()) {
        throw std::domain_error("loading matrices need 1 <= r <= p columns");
    }
    if (!a.allFinite() || !a_hat.allFinite()) {
        throw std::domain_error("loading matrix has non-finite entries");
    }
    const Matrix q_hat = column_basis(a_hat);
    const Matrix q = column_basis(a);
    // 1 - tr(Q̂ Q̂^T Q Q^T) / r equals ||(I - Q Q^T) Q̂||_F^2 / r; the residual
    // form avoids cancellation when the spans nearly coincide.
    const Matrix residual = q_hat - q * (q.transpose() * q_hat);
    const double d2 = residual.squaredNorm() / static_cast<double>(a.cols());
    return std::clamp(std::sqrt(d2), 0.0, 1.0);
}

double common_mse(const TensorSeries& s_hat, const TensorSeries& s) {
    if (s_hat.shape() != s.shape() || s_hat.length() != s.length()) {
        throw std::domain_error("series shapes or lengths differ");
    }
    double total = 0.0;
    for (Index t = 0; t < s.length(); ++t) {
        total += (s_hat[t].vec() - s[t].vec()).squaredNorm();
    }
    return total / (static_cast<double>(s.length()) * static_cast<double>(shape_size(s.shape())));
}

} // namespace tenfac
