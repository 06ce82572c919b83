#ifndef TENFAC_SIMULATION_HPP
#define TENFAC_SIMULATION_HPP

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tenfac/estimation.hpp"
#include "tenfac/tensor.hpp"

/**
 * @file simulation.hpp
 * @brief Seeded data-generating process for tensor factor model experiments.
 *
 * Loadings have i.i.d. Uniform(-1, 1) entries. Vec(F_t) follows an AR(1)
 * with coefficient phi and innovations sqrt(1 - phi^2) N(0, I); Vec(E_t)
 * follows an AR(1) with coefficient psi and innovations sqrt(1 - psi^2)
 * Vec(U_t), where U_t is tensor normal with per-mode covariance Σ_k having
 * ones on the diagonal and 1/p_k elsewhere. Both recursions start at their
 * stationary law (F_1 ~ N(0, I), E_1 = U_1).
 *
 * Random numbers come from std::mt19937_64 seeded with
 * seed XOR splitmix64(replication_id), with std::normal_distribution and
 * std::uniform_real_distribution from the C++ standard library; results are
 * bit-reproducible for a given standard library build.
 */

namespace tenfac {

using Rng = std::mt19937_64;

/// Independent generator for one replication.
Rng make_rng(std::uint64_t seed, std::uint64_t replication_id);

struct DgpConfig {
    Shape dims;
    Shape ranks;
    Index T = 0;
    double phi = 0.1;
    double psi = 0.1;
    std::uint64_t seed = 0;
    std::uint64_t replication_id = 0;
    /// Multiplies the idiosyncratic component; 0 gives noiseless data.
    double noise_scale = 1.0;
};

struct SimulatedDataset {
    TensorSeries x;
    LoadingSet true_loadings;
    TensorSeries true_factors;
    TensorSeries true_common;
    TensorSeries noise;
};

/// Throws std::domain_error for |phi| >= 1, |psi| >= 1, ranks above dims or T < 1.
SimulatedDataset generate(const DgpConfig& config);

/// Σ_k with ones on the diagonal and 1/p off the diagonal.
Matrix equicorrelation(Index p);

/**
 * One draw from the tensor normal law with per-mode covariances `sigmas`.
 *
 * Computed as Z ×_1 L_1 ... ×_K L_K with L_k the Cholesky factor of Σ_k and Z
 * i.i.d. standard normal, so Vec of the result has covariance
 * Σ_K ⊗ ... ⊗ Σ_1. Throws std::domain_error if some Σ_k is not positive definite.
 */
DenseTensor tensor_normal_sample(const Shape& shape, std::span<const Matrix> sigmas, Rng& rng);

/// Named experiment setting: dimensions, AR coefficients and the sample sizes it is run at.
struct Preset {
    std::string name;
    Shape dims;
    Shape ranks;
    double phi = 0.1;
    double psi = 0.1;
    std::vector<Index> Ts;

    DgpConfig config(Index T, std::uint64_t seed, std::uint64_t replication_id) const;
};

/// setting-a ... setting-f.
const std::vector<Preset>& presets();

/// Throws std::domain_error for unknown names.
const Preset& preset(std::string_view name);

} // namespace tenfac

#endif
