#ifndef TENFAC_TENSOR_HPP
#define TENFAC_TENSOR_HPP

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

/**
 * @file tensor.hpp
 * @brief Dense column-major tensors and the multilinear primitives built on them.
 *
 * Storage follows the column-major ravel: the first index varies fastest, so
 * entry (i_1, ..., i_K) lives at offset i_1 + i_2 p_1 + i_3 p_1 p_2 + ...
 * (0-based). Every unfolding and Kronecker ordering in the library derives
 * from this map.
 */

namespace tenfac {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Shape = std::vector<Index>;

/// Product of all extents.
Index shape_size(std::span<const Index> shape);

/// Product of all extents except mode `k` (0-based).
Index shape_size_excluding(std::span<const Index> shape, std::size_t k);

/**
 * Column-major ravel of a 1-based multi-index.
 *
 * Returns m_1 + (m_2 - 1) I_1 + (m_3 - 1) I_1 I_2 + ..., i.e. a 1-based
 * position in 1..prod(I_j). Throws std::domain_error when any m_j falls
 * outside 1..I_j or the lengths differ.
 */
Index linear_index(std::span<const Index> multi_index, std::span<const Index> dims);

/**
 * K-mode real array with column-major storage.
 *
 * Immutable in shape after construction; the data may be mutated through
 * `data()` by code that owns the tensor.
 */
class DenseTensor {
public:
    DenseTensor() = default;

    /// Zero-filled tensor of the given shape.
    explicit DenseTensor(Shape shape);

    /// Takes ownership of `data`, which must hold prod(shape) values in column-major order.
    DenseTensor(Shape shape, std::vector<double> data);

    const Shape& shape() const { return shape_; }
    std::size_t order() const { return shape_.size(); }
    Index dim(std::size_t k) const { return shape_.at(k); }
    Index size() const { return static_cast<Index>(data_.size()); }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    /// Column-major view of the data as a vector.
    Eigen::Map<Vector> vec() { return {data_.data(), size()}; }
    Eigen::Map<const Vector> vec() const { return {data_.data(), size()}; }

    /// 0-based element access.
    double& operator()(std::span<const Index> idx);
    double operator()(std::span<const Index> idx) const;

    double frobenius_norm() const { return vec().norm(); }
    bool all_finite() const { return vec().allFinite(); }

    bool operator==(const DenseTensor& other) const = default;

private:
    Index offset(std::span<const Index> idx) const;

    Shape shape_;
    std::vector<double> data_;
};

/**
 * Time-indexed sequence of tensors sharing one shape.
 */
class TensorSeries {
public:
    TensorSeries() = default;

    /// T zero-filled slices.
    TensorSeries(Shape shape, Index length);

    /// Throws std::domain_error if slices is empty or the shapes disagree.
    explicit TensorSeries(std::vector<DenseTensor> slices);

    const Shape& shape() const { return shape_; }
    std::size_t order() const { return shape_.size(); }
    Index length() const { return static_cast<Index>(slices_.size()); }

    const DenseTensor& operator[](Index t) const { return slices_[static_cast<std::size_t>(t)]; }
    DenseTensor& operator[](Index t) { return slices_[static_cast<std::size_t>(t)]; }

    const std::vector<DenseTensor>& slices() const { return slices_; }

    bool all_finite() const;

    bool operator==(const TensorSeries& other) const = default;

private:
    Shape shape_;
    std::vector<DenseTensor> slices_;
};

/**
 * Mode-k matricization (k is 0-based).
 *
 * Returns the p_k x p_{-k} matrix whose columns are the mode-k fibers, with
 * the column index running column-major over the remaining modes in
 * ascending order.
 */
Matrix mode_unfold(const DenseTensor& x, std::size_t k);

/// Inverse of mode_unfold; throws std::domain_error if `m` does not match `shape`.
DenseTensor mode_fold(const Matrix& m, std::size_t k, const Shape& shape);

/// x ×_k a, replacing p_k by a.rows(). Requires a.cols() == p_k.
DenseTensor mode_product(const DenseTensor& x, std::size_t k, const Matrix& a);

/// x ×_1 a_1 ×_2 ... ×_K a_K.
DenseTensor multi_mode_product(const DenseTensor& x, std::span<const Matrix> mats);

/// x ×_1 a_1^T ×_2 ... ×_K a_K^T.
DenseTensor multi_mode_product_transposed(const DenseTensor& x, std::span<const Matrix> mats);

/// Standard Kronecker product.
Matrix kron(const Matrix& a, const Matrix& b);

/**
 * A_K ⊗ ... ⊗ A_{k+1} ⊗ A_{k-1} ⊗ ... ⊗ A_1 (descending order, mode k omitted).
 *
 * This ordering satisfies mat_k(F ×_1 A_1 ... ×_K A_K) = A_k mat_k(F) B_k^T
 * for the unfolding defined by mode_unfold. With a single matrix the result
 * is the 1x1 identity.
 */
Matrix kron_excluding(std::span<const Matrix> mats, std::size_t k);

} // namespace tenfac

#endif
