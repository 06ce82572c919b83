#include "tenfac/simulation.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace tenfac {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void validate(const DgpConfig& c) {
    if (!(std::abs(c.phi) < 1.0)) {
        throw std::domain_error("factor AR coefficient must satisfy |phi| < 1");
    }
    if (!(std::abs(c.psi) < 1.0)) {
        throw std::domain_error("noise AR coefficient must satisfy |psi| < 1");
    }
    if (c.dims.empty() || c.dims.size() != c.ranks.size()) {
        throw std::domain_error("need matching, non-empty dims and ranks");
    }
    for (std::size_t k = 0; k < c.dims.size(); ++k) {
        if (c.ranks[k] < 1 || c.ranks[k] > c.dims[k]) {
            throw std::domain_error("rank r_" + std::to_string(k + 1) + " must lie in 1..p_" + std::to_string(k + 1));
        }
    }
    if (c.T < 1) {
        throw std::domain_error("T must be at least 1");
    }
    if (!(c.noise_scale >= 0.0 && std::isfinite(c.noise_scale))) {
        throw std::domain_error("noise scale must be finite and non-negative");
    }
}

void fill_normal(std::span<double> out, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& v : out) {
        v = normal(rng);
    }
}

std::vector<Matrix> cholesky_factors(std::span<const Matrix> sigmas) {
    std::vector<Matrix> factors;
    factors.reserve(sigmas.size());
    for (std::size_t k = 0; k < sigmas.size(); ++k) {
        const Matrix& s = sigmas[k];
        if (s.rows() != s.cols() || !s.isApprox(s.transpose(), 1e-12)) {
            throw std::domain_error("covariance of mode " + std::to_string(k + 1) + " is not symmetric");
        }
        Eigen::LLT<Matrix> llt(s);
        if (llt.info() != Eigen::Success) {
            throw std::domain_error("covariance of mode " + std::to_string(k + 1) + " is not positive definite");
        }
        factors.emplace_back(llt.matrixL());
    }
    return factors;
}

DenseTensor sample_with_factors(const Shape& shape, std::span<const Matrix> chol, Rng& rng) {
    DenseTensor z(shape);
    fill_normal(z.data(), rng);
    return multi_mode_product(z, chol);
}

} // namespace

Rng make_rng(std::uint64_t seed, std::uint64_t replication_id) {
    return Rng(seed ^ splitmix64(replication_id));
}

Matrix equicorrelation(Index p) {
    Matrix s = Matrix::Constant(p, p, 1.0 / static_cast<double>(p));
    s.diagonal().setOnes();
    return s;
}

DenseTensor tensor_normal_sample(const Shape& shape, std::span<const Matrix> sigmas, Rng& rng) {
    if (sigmas.size() != shape.size()) {
        throw std::domain_error("need one covariance per mode");
    }
    for (std::size_t k = 0; k < shape.size(); ++k) {
        if (sigmas[k].rows() != shape[k]) {
            throw std::domain_error("covariance of mode " + std::to_string(k + 1) + " has the wrong size");
        }
    }
    auto chol = cholesky_factors(sigmas);
    return sample_with_factors(shape, chol, rng);
}

SimulatedDataset generate(const DgpConfig& config) {
    validate(config);
    Rng rng = make_rng(config.seed, config.replication_id);
    const std::size_t K = config.dims.size();

    SimulatedDataset out;
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    for (std::size_t k = 0; k < K; ++k) {
        Matrix a(config.dims[k], config.ranks[k]);
        for (Index j = 0; j < a.cols(); ++j) {
            for (Index i = 0; i < a.rows(); ++i) {
                a(i, j) = uniform(rng);
            }
        }
        out.true_loadings.loadings.push_back(std::move(a));
    }

    std::vector<Matrix> sigmas;
    for (auto p : config.dims) {
        sigmas.push_back(equicorrelation(p));
    }
    const auto chol = cholesky_factors(sigmas);

    const double factor_innov = std::sqrt(1.0 - config.phi * config.phi);
    const double noise_innov = std::sqrt(1.0 - config.psi * config.psi);

    std::vector<DenseTensor> factors, noise, common, x;
    DenseTensor eps(config.ranks);
    for (Index t = 0; t < config.T; ++t) {
        DenseTensor f(config.ranks);
        fill_normal(eps.data(), rng);
        if (t == 0) {
            f = eps;
        } else {
            f.vec() = config.phi * factors.back().vec() + factor_innov * eps.vec();
        }
        DenseTensor u = sample_with_factors(config.dims, chol, rng);
        DenseTensor e(config.dims);
        if (t == 0) {
            e = u;
        } else {
            e.vec() = config.psi * noise.back().vec() + noise_innov * u.vec();
        }
        factors.push_back(std::move(f));
        noise.push_back(std::move(e));
    }
    for (Index t = 0; t < config.T; ++t) {
        auto& e = noise[static_cast<std::size_t>(t)];
        if (config.noise_scale != 1.0) {
            e.vec() *= config.noise_scale;
        }
        DenseTensor s = multi_mode_product(factors[static_cast<std::size_t>(t)], out.true_loadings.loadings);
        DenseTensor xt(config.dims);
        xt.vec() = s.vec() + e.vec();
        common.push_back(std::move(s));
        x.push_back(std::move(xt));
    }
    out.x = TensorSeries(std::move(x));
    out.true_factors = TensorSeries(std::move(factors));
    out.true_common = TensorSeries(std::move(common));
    out.noise = TensorSeries(std::move(noise));
    return out;
}

DgpConfig Preset::config(Index T, std::uint64_t seed, std::uint64_t replication_id) const {
    DgpConfig c;
    c.dims = dims;
    c.ranks = ranks;
    c.T = T;
    c.phi = phi;
    c.psi = psi;
    c.seed = seed;
    c.replication_id = replication_id;
    return c;
}

const std::vector<Preset>& presets() {
    static const std::vector<Preset> all = {
        {"setting-a", {10, 10, 10}, {3, 3, 3}, 0.1, 0.1, {20, 50, 100, 200}},
        {"setting-b", {100, 10, 10}, {3, 3, 3}, 0.1, 0.1, {20, 50, 100, 200}},
        {"setting-c", {15, 15, 15}, {3, 3, 3}, 0.1, 0.1, {20, 50, 100, 200}},
        {"setting-d", {20, 20, 20}, {3, 3, 3}, 0.1, 0.1, {20, 50, 100, 200}},
        {"setting-e", {30, 30, 30}, {3, 3, 3}, 0.1, 0.1, {20, 50, 100, 200}},
        {"setting-f", {40, 10, 10}, {3, 3, 3}, 0.1, 0.1, {16, 32, 64, 128, 256, 512, 1024}},
    };
    return all;
}

const Preset& preset(std::string_view name) {
    for (const auto& p : presets()) {
        if (p.name == name) {
            return p;
        }
    }
    throw std::domain_error("unknown preset '" + std::string(name) + "' (expected setting-a ... setting-f)");
}

} // namespace tenfac
