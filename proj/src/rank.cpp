#include "tenfac/rank.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tenfac/estimation.hpp"
#include "tenfac/spectral.hpp"

namespace tenfac {

namespace {

void check_rank_inputs(const TensorSeries& x, const RankOptions& options) {
    if (x.order() < 2) {
        throw std::domain_error("rank selection needs a tensor of order K >= 2");
    }
    if (x.length() < 2) {
        throw std::domain_error("rank selection needs at least T = 2 observations");
    }
    if (!x.all_finite()) {
        throw std::domain_error("tensor series contains non-finite values");
    }
    const auto& shape = x.shape();
    const Index bound = std::min(*std::min_element(shape.begin(), shape.end()), x.length());
    if (options.r_max < 1 || options.r_max >= bound) {
        throw std::domain_error("r_max = " + std::to_string(options.r_max) +
                                " violates 1 <= r_max < min(min_k p_k, T) = " + std::to_string(bound));
    }
    if (options.c && !(*options.c > 0.0 && std::isfinite(*options.c))) {
        throw std::domain_error("penalty constant must be positive and finite");
    }
    if (options.max_sweeps < 1) {
        throw std::domain_error("pe-er needs at least one sweep");
    }
}

RatioSelection select_for(const Matrix& m, const TensorSeries& x, std::size_t k, const RankOptions& options) {
    const Vector lambda = eigenvalues_descending(m);
    double c = 0.0;
    if (options.c) {
        c = *options.c;
    } else {
        c = trace_constant(m);
        if (options.penalty == PenaltyConstant::mean_eigenvalue) {
            c /= static_cast<double>(m.rows());
        }
    }
    return select_by_ratio(lambda, c, penalty_delta(x.length(), x.shape(), k), options.r_max);
}

} // namespace

double penalty_delta(Index T, const Shape& shape, std::size_t k) {
    if (k >= shape.size()) {
        throw std::domain_error("mode out of range");
    }
    if (T < 1) {
        throw std::domain_error("penalty needs T >= 1");
    }
    const double rest = static_cast<double>(shape_size_excluding(shape, k));
    return 1.0 / std::sqrt(static_cast<double>(T) * rest) + 1.0 / static_cast<double>(shape[k]);
}

double trace_constant(const Matrix& m) {
    return m.trace();
}

RatioSelection select_by_ratio(const Vector& eigenvalues, double c, double delta, Index r_max) {
    if (r_max < 1 || eigenvalues.size() < r_max + 1) {
        throw std::domain_error("ratio criterion needs r_max + 1 = " + std::to_string(r_max + 1) +
                                " eigenvalues, got " + std::to_string(eigenvalues.size()));
    }
    RatioSelection out;
    out.ratios.resize(r_max);
    const double penalty = c * delta;
    for (Index j = 0; j < r_max; ++j) {
        out.ratios[j] = eigenvalues[j] / (eigenvalues[j + 1] + penalty);
    }
    Index best = 0;
    for (Index j = 1; j < r_max; ++j) {
        if (out.ratios[j] > out.ratios[best]) {
            best = j;
        }
    }
    out.rank = best + 1;
    return out;
}

RankEstimate ie_er(const TensorSeries& x, const RankOptions& options) {
    check_rank_inputs(x, options);
    RankEstimate out;
    for (std::size_t k = 0; k < x.order(); ++k) {
        auto sel = select_for(mode_covariance(x, k), x, k, options);
        out.ranks.push_back(sel.rank);
        out.ratio_traces.push_back(std::move(sel.ratios));
    }
    out.iterations = 1;
    out.converged = true;
    return out;
}

RankEstimate pe_er(const TensorSeries& x, const RankOptions& options) {
    check_rank_inputs(x, options);
    const std::size_t K = x.order();

    std::vector<Matrix> initial_cov(K);
    std::vector<Matrix> loadings(K);
    for (std::size_t k = 0; k < K; ++k) {
        initial_cov[k] = mode_covariance(x, k);
        if (!(initial_cov[k].trace() > 0.0)) {
            throw std::domain_error("mode-" + std::to_string(k + 1) + " covariance is zero");
        }
        loadings[k] = scaled_eigenvectors(initial_cov[k], options.r_max);
    }

    RankEstimate out;
    Shape previous(K, options.r_max);
    out.ratio_traces.resize(K);
    for (int s = 1; s <= options.max_sweeps; ++s) {
        Shape current(K);
        std::vector<Matrix> projected(K);
        for (std::size_t k = 0; k < K; ++k) {
            projected[k] = projected_covariance(x, k, kron_excluding(loadings, k));
            auto sel = select_for(projected[k], x, k, options);
            current[k] = sel.rank;
            out.ratio_traces[k] = std::move(sel.ratios);
        }
        for (std::size_t k = 0; k < K; ++k) {
            const Matrix& source = options.update_from_projected ? projected[k] : initial_cov[k];
            loadings[k] = scaled_eigenvectors(source, current[k]);
        }
        out.iterations = s;
        out.ranks = current;
        if (current == previous) {
            out.converged = true;
            break;
        }
        previous = std::move(current);
    }
    return out;
}

} // namespace tenfac
