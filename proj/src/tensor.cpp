#include "tenfac/tensor.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace tenfac {

namespace {

void check_shape(const Shape& shape) {
    if (shape.empty()) {
        throw std::domain_error("tensor must have at least one mode");
    }
    for (auto p : shape) {
        if (p < 1) {
            throw std::domain_error("tensor extents must be positive");
        }
    }
}

void check_mode(std::size_t k, std::size_t order) {
    if (k >= order) {
        throw std::domain_error("mode " + std::to_string(k + 1) + " out of range for order-" +
                                std::to_string(order) + " tensor");
    }
}

// Extents before and after mode k.
std::pair<Index, Index> split_extents(const Shape& shape, std::size_t k) {
    Index left = 1, right = 1;
    for (std::size_t j = 0; j < k; ++j) {
        left *= shape[j];
    }
    for (std::size_t j = k + 1; j < shape.size(); ++j) {
        right *= shape[j];
    }
    return {left, right};
}

} // namespace

Index shape_size(std::span<const Index> shape) {
    Index n = 1;
    for (auto p : shape) {
        n *= p;
    }
    return n;
}

Index shape_size_excluding(std::span<const Index> shape, std::size_t k) {
    Index n = 1;
    for (std::size_t j = 0; j < shape.size(); ++j) {
        if (j != k) {
            n *= shape[j];
        }
    }
    return n;
}

Index linear_index(std::span<const Index> multi_index, std::span<const Index> dims) {
    if (multi_index.size() != dims.size()) {
        throw std::domain_error("multi-index length does not match number of dimensions");
    }
    Index pos = 1, stride = 1;
    for (std::size_t j = 0; j < dims.size(); ++j) {
        if (multi_index[j] < 1 || multi_index[j] > dims[j]) {
            throw std::domain_error("index " + std::to_string(multi_index[j]) + " outside 1.." +
                                    std::to_string(dims[j]) + " in position " + std::to_string(j + 1));
        }
        pos += (multi_index[j] - 1) * stride;
        stride *= dims[j];
    }
    return pos;
}

DenseTensor::DenseTensor(Shape shape) : shape_(std::move(shape)) {
    check_shape(shape_);
    data_.assign(static_cast<std::size_t>(shape_size(shape_)), 0.0);
}

DenseTensor::DenseTensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
    check_shape(shape_);
    if (static_cast<Index>(data_.size()) != shape_size(shape_)) {
        throw std::domain_error("tensor data length " + std::to_string(data_.size()) +
                                " does not match shape size " + std::to_string(shape_size(shape_)));
    }
}

Index DenseTensor::offset(std::span<const Index> idx) const {
    if (idx.size() != shape_.size()) {
        throw std::domain_error("index has wrong number of modes");
    }
    Index pos = 0, stride = 1;
    for (std::size_t j = 0; j < shape_.size(); ++j) {
        if (idx[j] < 0 || idx[j] >= shape_[j]) {
            throw std::domain_error("tensor index out of range");
        }
        pos += idx[j] * stride;
        stride *= shape_[j];
    }
    return pos;
}

double& DenseTensor::operator()(std::span<const Index> idx) {
    return data_[static_cast<std::size_t>(offset(idx))];
}

double DenseTensor::operator()(std::span<const Index> idx) const {
    return data_[static_cast<std::size_t>(offset(idx))];
}

TensorSeries::TensorSeries(Shape shape, Index length) : shape_(std::move(shape)) {
    if (length < 1) {
        throw std::domain_error("tensor series must have at least one slice");
    }
    slices_.assign(static_cast<std::size_t>(length), DenseTensor(shape_));
}

TensorSeries::TensorSeries(std::vector<DenseTensor> slices) : slices_(std::move(slices)) {
    if (slices_.empty()) {
        throw std::domain_error("tensor series must have at least one slice");
    }
    shape_ = slices_.front().shape();
    for (const auto& s : slices_) {
        if (s.shape() != shape_) {
            throw std::domain_error("all slices of a tensor series must share one shape");
        }
    }
}

bool TensorSeries::all_finite() const {
    for (const auto& s : slices_) {
        if (!s.all_finite()) {
            return false;
        }
    }
    return true;
}

Matrix mode_unfold(const DenseTensor& x, std::size_t k) {
    check_mode(k, x.order());
    const auto& shape = x.shape();
    const Index pk = shape[k];
    auto [left, right] = split_extents(shape, k);
    Matrix out(pk, left * right);
    const double* src = x.data().data();
    for (Index r = 0; r < right; ++r) {
        for (Index i = 0; i < pk; ++i) {
            const double* fiber = src + left * (i + pk * r);
            for (Index l = 0; l < left; ++l) {
                out(i, l + left * r) = fiber[l];
            }
        }
    }
    return out;
}

DenseTensor mode_fold(const Matrix& m, std::size_t k, const Shape& shape) {
    check_shape(shape);
    check_mode(k, shape.size());
    const Index pk = shape[k];
    auto [left, right] = split_extents(shape, k);
    if (m.rows() != pk || m.cols() != left * right) {
        throw std::domain_error("matrix of size " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                " cannot fold along mode " + std::to_string(k + 1) + " into the target shape");
    }
    DenseTensor out(shape);
    double* dst = out.data().data();
    for (Index r = 0; r < right; ++r) {
        for (Index i = 0; i < pk; ++i) {
            double* fiber = dst + left * (i + pk * r);
            for (Index l = 0; l < left; ++l) {
                fiber[l] = m(i, l + left * r);
            }
        }
    }
    return out;
}

DenseTensor mode_product(const DenseTensor& x, std::size_t k, const Matrix& a) {
    check_mode(k, x.order());
    if (a.cols() != x.dim(k)) {
        throw std::domain_error("mode-" + std::to_string(k + 1) + " product needs a matrix with " +
                                std::to_string(x.dim(k)) + " columns, got " + std::to_string(a.cols()));
    }
    Shape shape = x.shape();
    shape[k] = a.rows();
    Matrix prod = a * mode_unfold(x, k);
    return mode_fold(prod, k, shape);
}

DenseTensor multi_mode_product(const DenseTensor& x, std::span<const Matrix> mats) {
    if (mats.size() != x.order()) {
        throw std::domain_error("need one matrix per mode");
    }
    DenseTensor out = x;
    for (std::size_t k = 0; k < mats.size(); ++k) {
        out = mode_product(out, k, mats[k]);
    }
    return out;
}

DenseTensor multi_mode_product_transposed(const DenseTensor& x, std::span<const Matrix> mats) {
    if (mats.size() != x.order()) {
        throw std::domain_error("need one matrix per mode");
    }
    DenseTensor out = x;
    for (std::size_t k = 0; k < mats.size(); ++k) {
        out = mode_product(out, k, mats[k].transpose());
    }
    return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index j = 0; j < a.cols(); ++j) {
        for (Index i = 0; i < a.rows(); ++i) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Matrix kron_excluding(std::span<const Matrix> mats, std::size_t k) {
    check_mode(k, mats.size());
    Matrix out = Matrix::Identity(1, 1);
    // Build right-to-left so that A_1 ends up innermost (fastest-varying).
    for (std::size_t j = 0; j < mats.size(); ++j) {
        if (j != k) {
            out = kron(mats[j], out);
        }
    }
    return out;
}

} // namespace tenfac
