#include <doctest.h>

#include <random>
#include <stdexcept>

#include "support.hpp"
#include "tenfac/tensor.hpp"

using namespace tenfac;
using tenfac::testing::random_matrix;
using tenfac::testing::random_tensor;

namespace {

DenseTensor one_to_eight() {
    return DenseTensor({2, 2, 2}, {1, 2, 3, 4, 5, 6, 7, 8});
}

Matrix rows(std::initializer_list<std::initializer_list<double>> init) {
    Matrix m(static_cast<Index>(init.size()), static_cast<Index>(init.begin()->size()));
    Index i = 0;
    for (const auto& r : init) {
        Index j = 0;
        for (double v : r) {
            m(i, j++) = v;
        }
        ++i;
    }
    return m;
}

// Unfolding built by enumerating every multi-index through the 1-based ravel.
Matrix unfold_by_enumeration(const DenseTensor& x, std::size_t k) {
    const Shape& shape = x.shape();
    Shape rest;
    for (std::size_t j = 0; j < shape.size(); ++j) {
        if (j != k) {
            rest.push_back(shape[j]);
        }
    }
    Matrix out(shape[k], shape_size_excluding(shape, k));
    Shape idx(shape.size(), 1);
    for (Index lin = 1; lin <= x.size(); ++lin) {
        Index rem = lin - 1;
        for (std::size_t j = 0; j < shape.size(); ++j) {
            idx[j] = rem % shape[j] + 1;
            rem /= shape[j];
        }
        Shape rest_idx;
        for (std::size_t j = 0; j < shape.size(); ++j) {
            if (j != k) {
                rest_idx.push_back(idx[j]);
            }
        }
        const Index col = rest.empty() ? 1 : linear_index(rest_idx, rest);
        out(idx[k] - 1, col - 1) = x.data()[static_cast<std::size_t>(linear_index(idx, shape) - 1)];
    }
    return out;
}

Shape random_shape(std::mt19937_64& rng, std::size_t max_order = 4, Index max_dim = 5) {
    std::uniform_int_distribution<std::size_t> order(1, max_order);
    std::uniform_int_distribution<Index> dim(1, max_dim);
    Shape s(order(rng));
    for (auto& p : s) {
        p = dim(rng);
    }
    return s;
}

} // namespace

TEST_CASE("linear_index is the column-major ravel") {
    const Shape dims{2, 2, 2};
    CHECK(linear_index(Shape{1, 1, 1}, dims) == 1);
    CHECK(linear_index(Shape{2, 1, 1}, dims) == 2);
    CHECK(linear_index(Shape{1, 2, 2}, dims) == 7);
    CHECK_THROWS_AS(linear_index(Shape{3, 1, 1}, dims), std::domain_error);
    CHECK_THROWS_AS(linear_index(Shape{0, 1, 1}, dims), std::domain_error);
    CHECK_THROWS_AS(linear_index(Shape{1, 1}, dims), std::domain_error);
}

TEST_CASE("linear_index is a bijection onto 1..prod") {
    const Shape dims{3, 2, 4};
    std::vector<int> seen(24, 0);
    for (Index a = 1; a <= 3; ++a) {
        for (Index b = 1; b <= 2; ++b) {
            for (Index c = 1; c <= 4; ++c) {
                seen[static_cast<std::size_t>(linear_index(Shape{a, b, c}, dims) - 1)]++;
            }
        }
    }
    for (int s : seen) {
        CHECK(s == 1);
    }
}

TEST_CASE("tensor construction validates shape and data") {
    CHECK_THROWS_AS(DenseTensor(Shape{}), std::domain_error);
    CHECK_THROWS_AS(DenseTensor(Shape{2, 0}), std::domain_error);
    CHECK_THROWS_AS(DenseTensor(Shape{2, 2}, {1.0, 2.0}), std::domain_error);
    CHECK_THROWS_AS(TensorSeries(std::vector<DenseTensor>{}), std::domain_error);
    CHECK_THROWS_AS(TensorSeries({DenseTensor({2}), DenseTensor({3})}), std::domain_error);
    auto x = one_to_eight();
    CHECK(x(Shape{1, 0, 1}) == 6.0);
}

TEST_CASE("mode unfoldings of the 2x2x2 example") {
    const auto x = one_to_eight();
    CHECK(mode_unfold(x, 0) == rows({{1, 3, 5, 7}, {2, 4, 6, 8}}));
    CHECK(mode_unfold(x, 1) == rows({{1, 2, 5, 6}, {3, 4, 7, 8}}));
    CHECK(mode_unfold(x, 2) == rows({{1, 2, 3, 4}, {5, 6, 7, 8}}));
    CHECK_THROWS_AS(mode_unfold(x, 3), std::domain_error);
}

TEST_CASE("unfolding agrees with enumeration through linear_index") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto x = random_tensor(random_shape(rng), rng);
        for (std::size_t k = 0; k < x.order(); ++k) {
            CHECK(mode_unfold(x, k) == unfold_by_enumeration(x, k));
        }
    }
}

TEST_CASE("mode_fold inverts mode_unfold") {
    SUBCASE("example") {
        CHECK(mode_fold(rows({{1, 3, 5, 7}, {2, 4, 6, 8}}), 0, {2, 2, 2}) == one_to_eight());
    }
    SUBCASE("degenerate shape") {
        auto s = mode_fold(rows({{5}}), 0, {1, 1, 1});
        CHECK(s.size() == 1);
        CHECK(s.data()[0] == 5.0);
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(mode_fold(Matrix::Zero(2, 3), 0, {2, 2, 2}), std::domain_error);
    }
    SUBCASE("round trip on 1000 random shapes, bit exact") {
        std::mt19937_64 rng(3);
        for (int trial = 0; trial < 1000; ++trial) {
            const auto x = random_tensor(random_shape(rng), rng);
            for (std::size_t k = 0; k < x.order(); ++k) {
                const Matrix u = mode_unfold(x, k);
                const auto y = mode_fold(u, k, x.shape());
                REQUIRE(y == x);
                CHECK(mode_unfold(y, k) == u);
            }
        }
    }
}

TEST_CASE("vec of the mode-1 unfolding is the raw data") {
    std::mt19937_64 rng(5);
    const auto x = random_tensor({3, 4, 2}, rng);
    const Matrix u = mode_unfold(x, 0);
    CHECK(Eigen::Map<const Vector>(u.data(), u.size()) == x.vec());
}

TEST_CASE("Frobenius norm is shared by all unfoldings") {
    std::mt19937_64 rng(6);
    const auto x = random_tensor({3, 4, 2, 2}, rng);
    for (std::size_t k = 0; k < x.order(); ++k) {
        // Same multiset of entries; summation order differs.
        CHECK(mode_unfold(x, k).norm() == doctest::Approx(x.frobenius_norm()).epsilon(1e-15));
    }
}

TEST_CASE("mode_product") {
    const auto x = one_to_eight();
    SUBCASE("identity") {
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(mode_product(x, k, Matrix::Identity(2, 2)) == x);
        }
    }
    SUBCASE("summing along mode 1") {
        auto y = mode_product(x, 0, rows({{1, 1}}));
        CHECK(y.shape() == Shape{1, 2, 2});
        CHECK(y == DenseTensor({1, 2, 2}, {3, 7, 11, 15}));
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(mode_product(x, 0, Matrix::Identity(3, 3)), std::domain_error);
    }
    SUBCASE("distinct modes commute") {
        std::mt19937_64 rng(8);
        const auto z = random_tensor({3, 4, 5}, rng);
        const Matrix a = random_matrix(2, 3, rng), b = random_matrix(6, 4, rng);
        const auto lhs = mode_product(mode_product(z, 0, a), 1, b);
        const auto rhs = mode_product(mode_product(z, 1, b), 0, a);
        CHECK((lhs.vec() - rhs.vec()).norm() <= 1e-12 * lhs.frobenius_norm());
    }
    SUBCASE("same mode associates with the matrix product") {
        std::mt19937_64 rng(9);
        const auto z = random_tensor({3, 4, 5}, rng);
        const Matrix a = random_matrix(2, 6, rng), b = random_matrix(6, 4, rng);
        const auto lhs = mode_product(z, 1, a * b);
        const auto rhs = mode_product(mode_product(z, 1, b), 1, a);
        CHECK((lhs.vec() - rhs.vec()).norm() <= 1e-12 * lhs.frobenius_norm());
    }
}

TEST_CASE("kron") {
    CHECK(kron(Matrix::Identity(2, 2), Matrix::Identity(3, 3)) == Matrix::Identity(6, 6));
    const Matrix b = rows({{1, 2, 3}, {4, 5, 6}});
    CHECK(kron(rows({{2}}), b) == 2 * b);
    CHECK(kron(rows({{1, 2}, {3, 4}}), rows({{0, 1}, {1, 0}})) ==
          rows({{0, 1, 0, 2}, {1, 0, 2, 0}, {0, 3, 0, 4}, {3, 0, 4, 0}}));
}

TEST_CASE("kron_excluding ordering") {
    std::mt19937_64 rng(12);
    std::vector<Matrix> a2{random_matrix(4, 2, rng), random_matrix(3, 2, rng)};
    CHECK(kron_excluding(a2, 0) == a2[1]);
    CHECK(kron_excluding(a2, 1) == a2[0]);

    std::vector<Matrix> a3{random_matrix(4, 2, rng), random_matrix(3, 2, rng), random_matrix(5, 3, rng)};
    CHECK(kron_excluding(a3, 1) == kron(a3[2], a3[0]));
    CHECK(kron_excluding(a3, 0) == kron(a3[2], a3[1]));

    std::vector<Matrix> a1{random_matrix(4, 2, rng)};
    CHECK(kron_excluding(a1, 0) == Matrix::Identity(1, 1));
    CHECK_THROWS_AS(kron_excluding(a3, 3), std::domain_error);
}

TEST_CASE("matricization identity pins the Kronecker order") {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<Index> dim(1, 5);
    for (std::size_t order = 2; order <= 4; ++order) {
        for (int trial = 0; trial < 20; ++trial) {
            Shape ranks(order), dims(order);
            std::vector<Matrix> a;
            for (std::size_t k = 0; k < order; ++k) {
                ranks[k] = dim(rng);
                dims[k] = dim(rng) + 1;
                a.push_back(random_matrix(dims[k], ranks[k], rng));
            }
            const auto f = random_tensor(ranks, rng);
            const auto x = multi_mode_product(f, a);
            for (std::size_t k = 0; k < order; ++k) {
                const Matrix lhs = mode_unfold(x, k);
                const Matrix rhs = a[k] * mode_unfold(f, k) * kron_excluding(a, k).transpose();
                CHECK((lhs - rhs).norm() < 1e-10 * std::max(1.0, lhs.norm()));
            }
        }
    }
}
