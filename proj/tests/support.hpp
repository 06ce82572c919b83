#ifndef TENFAC_TESTS_SUPPORT_HPP
#define TENFAC_TESTS_SUPPORT_HPP

#include <cmath>
#include <random>
#include <vector>

#include "tenfac/estimation.hpp"
#include "tenfac/tensor.hpp"

namespace tenfac::testing {

inline Matrix random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) {
            m(i, j) = normal(rng);
        }
    }
    return m;
}

inline DenseTensor random_tensor(const Shape& shape, std::mt19937_64& rng) {
    DenseTensor x(shape);
    std::normal_distribution<double> normal;
    for (auto& v : x.data()) {
        v = normal(rng);
    }
    return x;
}

inline Matrix random_orthogonal(Index n, std::mt19937_64& rng) {
    Eigen::HouseholderQR<Matrix> qr(random_matrix(n, n, rng));
    return qr.householderQ() * Matrix::Identity(n, n);
}

/// p x r loading with A^T A = p I.
inline Matrix normalized_loading(Index p, Index r, std::mt19937_64& rng) {
    Eigen::HouseholderQR<Matrix> qr(random_matrix(p, r, rng));
    Matrix q = qr.householderQ() * Matrix::Identity(p, r);
    return std::sqrt(static_cast<double>(p)) * q;
}

struct ExactModel {
    TensorSeries x;
    TensorSeries factors;
    LoadingSet loadings;
};

/**
 * Noiseless model X_t = F_t ×_k A_k with normalized loadings. Factor entry
 * (i_1, ..., i_K) is scaled by `spread`^(i_1 + ... + i_K), so per-mode factor
 * variances are distinct.
 */
inline ExactModel exact_model(const Shape& dims, const Shape& ranks, Index T, std::uint64_t seed,
                              double spread = 0.8) {
    std::mt19937_64 rng(seed);
    ExactModel m;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        m.loadings.loadings.push_back(normalized_loading(dims[k], ranks[k], rng));
    }
    std::vector<DenseTensor> fs, xs;
    const Index r = shape_size(ranks);
    for (Index t = 0; t < T; ++t) {
        DenseTensor f = random_tensor(ranks, rng);
        for (Index lin = 0; lin < r; ++lin) {
            Index rem = lin, power = 0;
            for (auto rk : ranks) {
                power += rem % rk;
                rem /= rk;
            }
            f.data()[static_cast<std::size_t>(lin)] *= std::pow(spread, static_cast<double>(power));
        }
        xs.push_back(multi_mode_product(f, m.loadings.loadings));
        fs.push_back(std::move(f));
    }
    m.x = TensorSeries(std::move(xs));
    m.factors = TensorSeries(std::move(fs));
    return m;
}

inline double relative_offdiagonal(const Matrix& m) {
    Matrix off = m;
    off.diagonal().setZero();
    return off.cwiseAbs().maxCoeff() / m.diagonal().cwiseAbs().maxCoeff();
}

/// (1/T) Σ_t mat_k(F_t) mat_k(F_t)^T.
inline Matrix factor_second_moment(const TensorSeries& f, std::size_t k) {
    const Index r = f.shape()[k];
    Matrix m = Matrix::Zero(r, r);
    for (const auto& s : f.slices()) {
        Matrix u = mode_unfold(s, k);
        m += u * u.transpose();
    }
    return m / static_cast<double>(f.length());
}

} // namespace tenfac::testing

#endif
