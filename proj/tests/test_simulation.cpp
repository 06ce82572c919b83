#include <doctest.h>

#include <cmath>
#include <vector>

#include "tenfac/simulation.hpp"

using namespace tenfac;

namespace {

// Lag-one autocorrelation of every entry of `x`, averaged over entries.
double mean_lag1(const TensorSeries& x) {
    const Index T = x.length();
    const Index n = shape_size(x.shape());
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
        const auto at = [&](Index t) { return x[t].data()[static_cast<std::size_t>(i)]; };
        double mean = 0.0;
        for (Index t = 0; t < T; ++t) {
            mean += at(t);
        }
        mean /= static_cast<double>(T);
        double num = 0.0, den = 0.0;
        for (Index t = 0; t < T; ++t) {
            den += (at(t) - mean) * (at(t) - mean);
            if (t > 0) {
                num += (at(t) - mean) * (at(t - 1) - mean);
            }
        }
        total += num / den;
    }
    return total / static_cast<double>(n);
}

double mean_square(const TensorSeries& x, Index begin, Index end) {
    double s = 0.0;
    for (Index t = begin; t < end; ++t) {
        s += x[t].vec().squaredNorm();
    }
    return s / static_cast<double>((end - begin) * shape_size(x.shape()));
}

} // namespace

TEST_CASE("presets") {
    CHECK(presets().size() == 6);
    CHECK(preset("setting-a").dims == Shape{10, 10, 10});
    CHECK(preset("setting-b").dims == Shape{100, 10, 10});
    CHECK(preset("setting-e").dims == Shape{30, 30, 30});
    CHECK(preset("setting-f").dims == Shape{40, 10, 10});
    CHECK(preset("setting-f").Ts.front() == 16);
    CHECK(preset("setting-f").Ts.back() == 1024);
    for (const auto& p : presets()) {
        CHECK(p.ranks == Shape{3, 3, 3});
        CHECK(p.phi == 0.1);
        CHECK(p.psi == 0.1);
    }
    CHECK_THROWS_AS(preset("setting-z"), std::domain_error);
}

TEST_CASE("generation is deterministic per seed and replication") {
    const auto cfg = preset("setting-a").config(20, 5, 3);
    const auto a = generate(cfg);
    const auto b = generate(cfg);
    CHECK(a.x == b.x);
    CHECK(a.true_loadings == b.true_loadings);
    auto other = cfg;
    other.replication_id = 4;
    CHECK_FALSE(generate(other).x == a.x);
    other = cfg;
    other.seed = 6;
    CHECK_FALSE(generate(other).x == a.x);
}

TEST_CASE("dataset structure") {
    const auto d = generate(preset("setting-a").config(30, 1, 0));
    CHECK(d.x.shape() == Shape{10, 10, 10});
    CHECK(d.x.length() == 30);
    CHECK(d.true_factors.shape() == Shape{3, 3, 3});
    for (const auto& a : d.true_loadings.loadings) {
        CHECK(a.rows() == 10);
        CHECK(a.cols() == 3);
        CHECK(a.maxCoeff() < 1.0);
        CHECK(a.minCoeff() >= -1.0);
    }
    for (Index t = 0; t < 30; ++t) {
        const DenseTensor s = multi_mode_product(d.true_factors[t], d.true_loadings.loadings);
        CHECK(s == d.true_common[t]);
        DenseTensor sum = d.true_common[t];
        sum.vec() += d.noise[t].vec();
        CHECK(sum == d.x[t]);
        const Vector diff = d.x[t].vec() - d.true_common[t].vec();
        CHECK((diff - d.noise[t].vec()).norm() <= 1e-12 * d.x[t].frobenius_norm());
    }
}

TEST_CASE("noiseless configuration") {
    auto cfg = preset("setting-a").config(10, 2, 0);
    cfg.noise_scale = 0.0;
    const auto d = generate(cfg);
    CHECK(d.x == d.true_common);
}

TEST_CASE("invalid configurations") {
    auto cfg = preset("setting-a").config(10, 2, 0);
    auto bad = cfg;
    bad.phi = 1.0;
    CHECK_THROWS_AS(generate(bad), std::domain_error);
    bad = cfg;
    bad.psi = -1.5;
    CHECK_THROWS_AS(generate(bad), std::domain_error);
    bad = cfg;
    bad.ranks = {11, 3, 3};
    CHECK_THROWS_AS(generate(bad), std::domain_error);
    bad = cfg;
    bad.T = 0;
    CHECK_THROWS_AS(generate(bad), std::domain_error);
}

TEST_CASE("stationary unit variance") {
    auto cfg = preset("setting-a").config(1000, 3, 0);
    const auto d = generate(cfg);
    CHECK(mean_square(d.true_factors, 0, 1000) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(mean_square(d.noise, 0, 1000) == doctest::Approx(1.0).epsilon(0.05));
    for (Index i = 0; i < 27; ++i) {
        double s = 0.0;
        for (Index t = 0; t < 1000; ++t) {
            const double v = d.true_factors[t].data()[static_cast<std::size_t>(i)];
            s += v * v;
        }
        CHECK(s / 1000.0 > 0.8);
        CHECK(s / 1000.0 < 1.2);
    }
}

TEST_CASE("no burn-in drift") {
    const auto d = generate(preset("setting-a").config(400, 4, 0));
    for (const auto* x : {&d.true_factors, &d.noise}) {
        const double ratio = mean_square(*x, 0, 100) / mean_square(*x, 300, 400);
        CHECK(ratio > 0.8);
        CHECK(ratio < 1.25);
    }
}

TEST_CASE("autocorrelation follows the AR coefficients") {
    auto cfg = preset("setting-a").config(400, 5, 0);
    cfg.phi = 0.0;
    cfg.psi = 0.0;
    auto d = generate(cfg);
    CHECK(std::abs(mean_lag1(d.true_factors)) < 3.0 / std::sqrt(400.0));
    CHECK(std::abs(mean_lag1(d.noise)) < 3.0 / std::sqrt(400.0));
    cfg.phi = 0.6;
    cfg.psi = -0.4;
    d = generate(cfg);
    CHECK(mean_lag1(d.true_factors) == doctest::Approx(0.6).epsilon(0.1 / 0.6));
    CHECK(mean_lag1(d.noise) == doctest::Approx(-0.4).epsilon(0.1 / 0.4));
    // Variance stays at one whatever the coefficient.
    CHECK(mean_square(d.true_factors, 0, 400) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("loadings are pervasive") {
    double total = 0.0;
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        const auto d = generate(preset("setting-a").config(2, 6, rep));
        for (const auto& a : d.true_loadings.loadings) {
            total += a.squaredNorm() / 10.0;
        }
    }
    CHECK(total / 300.0 == doctest::Approx(1.0).epsilon(0.1));  // r / 3 with r = 3
}

TEST_CASE("equicorrelation") {
    const Matrix s = equicorrelation(4);
    CHECK(s.diagonal().isOnes());
    CHECK(s(0, 3) == 0.25);
    CHECK(s(2, 1) == 0.25);
    CHECK(equicorrelation(1)(0, 0) == 1.0);
}

TEST_CASE("tensor normal sampling") {
    SUBCASE("identity covariance") {
        auto rng = make_rng(7, 0);
        std::vector<Matrix> sig{Matrix::Identity(10, 10), Matrix::Identity(10, 10)};
        double s = 0.0;
        for (int i = 0; i < 1000; ++i) {
            s += tensor_normal_sample({10, 10}, sig, rng).vec().squaredNorm();
        }
        const double var = s / 1e5;
        CHECK(var > 0.9);
        CHECK(var < 1.1);
    }
    SUBCASE("order one") {
        auto rng = make_rng(8, 0);
        std::vector<Matrix> sig{Matrix::Constant(1, 1, 4.0)};
        double s = 0.0;
        for (int i = 0; i < 100000; ++i) {
            const double v = tensor_normal_sample({1}, sig, rng).data()[0];
            s += v * v;
        }
        CHECK(s / 1e5 == doctest::Approx(4.0).epsilon(0.02));
    }
    SUBCASE("equicorrelated mode") {
        auto rng = make_rng(9, 0);
        std::vector<Matrix> sig{equicorrelation(10)};
        double s12 = 0.0, s11 = 0.0, s22 = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const auto u = tensor_normal_sample({10}, sig, rng);
            s12 += u.data()[0] * u.data()[1];
            s11 += u.data()[0] * u.data()[0];
            s22 += u.data()[1] * u.data()[1];
        }
        CHECK(std::abs(s12 / std::sqrt(s11 * s22) - 0.1) <= 0.03);
    }
    SUBCASE("Kronecker covariance of the vectorization") {
        auto rng = make_rng(10, 0);
        Matrix s1(2, 2), s2(2, 2);
        s1 << 1.0, 0.5, 0.5, 1.0;
        s2 << 2.0, 0.3, 0.3, 1.0;
        std::vector<Matrix> sig{s1, s2};
        Matrix acc = Matrix::Zero(4, 4);
        const int n = 200000;
        for (int i = 0; i < n; ++i) {
            const Vector v = tensor_normal_sample({2, 2}, sig, rng).vec();
            acc += v * v.transpose();
        }
        acc /= static_cast<double>(n);
        const Matrix expected = kron(s2, s1);
        CHECK((acc - expected).cwiseAbs().maxCoeff() < 0.02 * expected.cwiseAbs().maxCoeff());
    }
    SUBCASE("errors") {
        auto rng = make_rng(11, 0);
        Matrix bad(2, 2);
        bad << 1.0, 2.0, 2.0, 1.0;
        std::vector<Matrix> sig{bad};
        CHECK_THROWS_AS(tensor_normal_sample({2}, sig, rng), std::domain_error);
        std::vector<Matrix> wrong{Matrix::Identity(3, 3)};
        CHECK_THROWS_AS(tensor_normal_sample({2}, wrong, rng), std::domain_error);
    }
}
