#include "tenfac/estimation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "tenfac/metrics.hpp"
#include "tenfac/spectral.hpp"

namespace tenfac {

namespace {

void check_series(const TensorSeries& x) {
    if (x.order() < 2) {
        throw std::domain_error("estimators need a tensor of order K >= 2");
    }
    if (x.length() < 2) {
        throw std::domain_error("estimators need at least T = 2 observations");
    }
    if (!x.all_finite()) {
        throw std::domain_error("tensor series contains non-finite values");
    }
}

void check_ranks(const TensorSeries& x, const Shape& ranks) {
    if (ranks.size() != x.order()) {
        throw std::domain_error("need one rank per mode: got " + std::to_string(ranks.size()) + " for order " +
                                std::to_string(x.order()));
    }
    const auto& shape = x.shape();
    for (std::size_t k = 0; k < ranks.size(); ++k) {
        const Index cap = std::min(shape[k], x.length() * shape_size_excluding(shape, k));
        if (ranks[k] < 1 || ranks[k] > cap) {
            throw std::domain_error("rank r_" + std::to_string(k + 1) + " = " + std::to_string(ranks[k]) +
                                    " violates 1 <= r_k <= min(p_k, T p_{-k}) = " + std::to_string(cap));
        }
    }
}

void check_nonzero(const Matrix& m, std::size_t k) {
    if (!(m.trace() > 0.0)) {
        throw std::domain_error("mode-" + std::to_string(k + 1) +
                                " covariance is zero; no factor structure to estimate");
    }
}

void check_projection_rank(const TensorSeries& x, const Shape& ranks, std::size_t k, Index r_rest) {
    if (x.length() * r_rest < ranks[k]) {
        throw std::domain_error("projected covariance of mode " + std::to_string(k + 1) +
                                " is rank-deficient: T r_{-k} = " + std::to_string(x.length() * r_rest) +
                                " < r_k = " + std::to_string(ranks[k]));
    }
}

void check_init(const TensorSeries& x, const Shape& ranks, const LoadingSet& init) {
    if (init.order() != x.order() || init.ranks() != ranks || init.dims() != x.shape()) {
        throw std::domain_error("initial loadings do not match the data shape and requested ranks");
    }
}

} // namespace

Shape LoadingSet::ranks() const {
    Shape r;
    r.reserve(loadings.size());
    for (const auto& a : loadings) {
        r.push_back(a.cols());
    }
    return r;
}

Shape LoadingSet::dims() const {
    Shape p;
    p.reserve(loadings.size());
    for (const auto& a : loadings) {
        p.push_back(a.rows());
    }
    return p;
}

bool LoadingSet::operator==(const LoadingSet& other) const {
    if (loadings.size() != other.loadings.size() || eigenvalues.size() != other.eigenvalues.size()) {
        return false;
    }
    for (std::size_t k = 0; k < loadings.size(); ++k) {
        if (loadings[k].rows() != other.loadings[k].rows() || loadings[k].cols() != other.loadings[k].cols() ||
            loadings[k] != other.loadings[k]) {
            return false;
        }
    }
    for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
        if (eigenvalues[k].size() != other.eigenvalues[k].size() || eigenvalues[k] != other.eigenvalues[k]) {
            return false;
        }
    }
    return true;
}

EstimatorSpec EstimatorSpec::parse(std::string_view tag) {
    if (tag == "ie") {
        return {Method::initial, 0};
    }
    if (tag == "pe") {
        return {Method::projected, 1};
    }
    if (tag == "pe-star") {
        return {Method::projected_star, 1};
    }
    constexpr std::string_view prefix = "iterate:";
    if (tag.starts_with(prefix)) {
        auto digits = tag.substr(prefix.size());
        int steps = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), steps);
        if (ec == std::errc() && ptr == digits.data() + digits.size() && steps >= 1) {
            return {Method::iterative, steps};
        }
        throw std::domain_error("iterate:S needs an integer S >= 1, got '" + std::string(tag) + "'");
    }
    throw std::domain_error("unknown estimator '" + std::string(tag) + "' (expected ie, pe, pe-star or iterate:S)");
}

std::string EstimatorSpec::tag() const {
    switch (method) {
    case Method::initial:
        return "ie";
    case Method::projected:
        return "pe";
    case Method::projected_star:
        return "pe-star";
    case Method::iterative:
        return "iterate:" + std::to_string(steps);
    }
    return "unknown";
}

Matrix mode_covariance(const TensorSeries& x, std::size_t k) {
    const Index pk = x.shape().at(k);
    const double p = static_cast<double>(shape_size(x.shape()));
    Matrix m = Matrix::Zero(pk, pk);
    for (const auto& slice : x.slices()) {
        m.selfadjointView<Eigen::Lower>().rankUpdate(mode_unfold(slice, k));
    }
    m = m.selfadjointView<Eigen::Lower>();
    return m / (static_cast<double>(x.length()) * p);
}

Matrix mode_complement_covariance(const TensorSeries& x, std::size_t k) {
    const Index rest = shape_size_excluding(x.shape(), k);
    const double p = static_cast<double>(shape_size(x.shape()));
    Matrix m = Matrix::Zero(rest, rest);
    for (const auto& slice : x.slices()) {
        m.selfadjointView<Eigen::Lower>().rankUpdate(mode_unfold(slice, k).transpose());
    }
    m = m.selfadjointView<Eigen::Lower>();
    return m / (static_cast<double>(x.length()) * p);
}

Matrix projected_covariance(const TensorSeries& x, std::size_t k, const Matrix& b) {
    const Index pk = x.shape().at(k);
    const Index rest = shape_size_excluding(x.shape(), k);
    if (b.rows() != rest) {
        throw std::domain_error("projection matrix has " + std::to_string(b.rows()) + " rows, expected p_{-k} = " +
                                std::to_string(rest));
    }
    Matrix m = Matrix::Zero(pk, pk);
    Matrix y(pk, b.cols());
    for (const auto& slice : x.slices()) {
        y.noalias() = mode_unfold(slice, k) * b;
        m.selfadjointView<Eigen::Lower>().rankUpdate(y);
    }
    m = m.selfadjointView<Eigen::Lower>();
    const double r = static_cast<double>(rest);
    return m / (r * r * static_cast<double>(x.length()) * static_cast<double>(pk));
}

Matrix scaled_eigenvectors(const Matrix& m, Index r, Vector* eigenvalues) {
    auto eig = top_r_eigs(m, r);
    if (eigenvalues != nullptr) {
        *eigenvalues = eig.values;
    }
    return std::sqrt(static_cast<double>(m.rows())) * eig.vectors;
}

LoadingSet initial_loadings(const TensorSeries& x, const Shape& ranks) {
    check_series(x);
    check_ranks(x, ranks);
    LoadingSet out;
    out.loadings.resize(x.order());
    out.eigenvalues.resize(x.order());
    for (std::size_t k = 0; k < x.order(); ++k) {
        Matrix m = mode_covariance(x, k);
        check_nonzero(m, k);
        out.loadings[k] = scaled_eigenvectors(m, ranks[k], &out.eigenvalues[k]);
    }
    return out;
}

LoadingSet projected_loadings(const TensorSeries& x, const Shape& ranks, const LoadingSet& init) {
    check_series(x);
    check_ranks(x, ranks);
    check_init(x, ranks, init);
    LoadingSet out;
    out.loadings.resize(x.order());
    out.eigenvalues.resize(x.order());
    for (std::size_t k = 0; k < x.order(); ++k) {
        Matrix b = kron_excluding(init.loadings, k);
        check_projection_rank(x, ranks, k, b.cols());
        Matrix m = projected_covariance(x, k, b);
        check_nonzero(m, k);
        out.loadings[k] = scaled_eigenvectors(m, ranks[k], &out.eigenvalues[k]);
    }
    return out;
}

LoadingSet projected_loadings_star(const TensorSeries& x, const Shape& ranks, Index cap) {
    check_series(x);
    check_ranks(x, ranks);
    const auto& shape = x.shape();
    for (std::size_t k = 0; k < x.order(); ++k) {
        const Index rest = shape_size_excluding(shape, k);
        if (rest > cap) {
            throw ResourceError("pe-star needs a dense " + std::to_string(rest) + "x" + std::to_string(rest) +
                                " matrix for mode " + std::to_string(k + 1) + ", above the cap of " +
                                std::to_string(cap) + "; use the pe estimator instead");
        }
        const Index r_rest = shape_size_excluding(ranks, k);
        if (r_rest > rest) {
            throw std::domain_error("r_{-k} = " + std::to_string(r_rest) + " exceeds p_{-k} = " + std::to_string(rest));
        }
    }
    LoadingSet out;
    out.loadings.resize(x.order());
    out.eigenvalues.resize(x.order());
    for (std::size_t k = 0; k < x.order(); ++k) {
        Matrix complement = mode_complement_covariance(x, k);
        check_nonzero(complement, k);
        Matrix b = scaled_eigenvectors(complement, shape_size_excluding(ranks, k));
        check_projection_rank(x, ranks, k, b.cols());
        Matrix m = projected_covariance(x, k, b);
        out.loadings[k] = scaled_eigenvectors(m, ranks[k], &out.eigenvalues[k]);
    }
    return out;
}

IterativeResult iterative_loadings(const TensorSeries& x, const Shape& ranks, int max_steps, double tol,
                                   bool keep_history) {
    if (max_steps < 1) {
        throw std::domain_error("iterative estimation needs at least one step");
    }
    IterativeResult out;
    LoadingSet current = initial_loadings(x, ranks);
    if (keep_history) {
        out.history.push_back(current);
    }
    for (int s = 1; s <= max_steps; ++s) {
        LoadingSet next = projected_loadings(x, ranks, current);
        double change = 0.0;
        for (std::size_t k = 0; k < x.order(); ++k) {
            change = std::max(change, loading_distance(next.loadings[k], current.loadings[k]));
        }
        if (keep_history) {
            out.history.push_back(next);
        }
        current = std::move(next);
        out.steps_used = s;
        if (s >= 2 && change < tol) {
            break;
        }
    }
    out.loadings = std::move(current);
    return out;
}

TensorSeries estimate_factors(const TensorSeries& x, const LoadingSet& loadings) {
    if (loadings.order() != x.order() || loadings.dims() != x.shape()) {
        throw std::domain_error("loading dimensions do not match the tensor shape");
    }
    const double p = static_cast<double>(shape_size(x.shape()));
    std::vector<DenseTensor> slices;
    slices.reserve(static_cast<std::size_t>(x.length()));
    for (const auto& slice : x.slices()) {
        DenseTensor f = multi_mode_product_transposed(slice, loadings.loadings);
        f.vec() /= p;
        slices.push_back(std::move(f));
    }
    return TensorSeries(std::move(slices));
}

TensorSeries estimate_common_components(const TensorSeries& factors, const LoadingSet& loadings) {
    if (loadings.order() != factors.order() || loadings.ranks() != factors.shape()) {
        throw std::domain_error("loading ranks do not match the factor shape");
    }
    std::vector<DenseTensor> slices;
    slices.reserve(static_cast<std::size_t>(factors.length()));
    for (const auto& f : factors.slices()) {
        slices.push_back(multi_mode_product(f, loadings.loadings));
    }
    return TensorSeries(std::move(slices));
}

TensorSeries estimate_common_components(const TfmFit& fit) {
    return estimate_common_components(fit.factors, fit.loadings);
}

TensorSeries standardize(const TensorSeries& x, bool center, bool scale) {
    if (!center && !scale) {
        return x;
    }
    const Index n = shape_size(x.shape());
    const double T = static_cast<double>(x.length());
    Vector mean = Vector::Zero(n);
    for (const auto& s : x.slices()) {
        mean += s.vec();
    }
    mean /= T;
    Vector sd = Vector::Ones(n);
    if (scale) {
        Vector ss = Vector::Zero(n);
        for (const auto& s : x.slices()) {
            ss.array() += (s.vec() - mean).array().square();
        }
        const double denom = x.length() > 1 ? T - 1.0 : 1.0;
        sd = (ss / denom).cwiseSqrt();
        for (Index i = 0; i < n; ++i) {
            if (!(sd[i] > 0.0)) {
                sd[i] = 1.0;
            }
        }
    }
    TensorSeries out = x;
    for (Index t = 0; t < out.length(); ++t) {
        auto v = out[t].vec();
        if (center) {
            v -= mean;
        }
        if (scale) {
            v.array() /= sd.array();
        }
    }
    return out;
}

LoadingSet estimate_loadings(const TensorSeries& x, const Shape& ranks, const FitOptions& options,
                             int* iterations_used) {
    LoadingSet loadings;
    int iterations = 0;
    switch (options.estimator.method) {
    case Method::initial:
        loadings = initial_loadings(x, ranks);
        break;
    case Method::projected:
        loadings = projected_loadings(x, ranks, initial_loadings(x, ranks));
        iterations = 1;
        break;
    case Method::projected_star:
        loadings = projected_loadings_star(x, ranks, options.star_cap);
        iterations = 1;
        break;
    case Method::iterative: {
        auto res = iterative_loadings(x, ranks, options.estimator.steps, options.tol);
        loadings = std::move(res.loadings);
        iterations = res.steps_used;
        break;
    }
    }
    if (iterations_used != nullptr) {
        *iterations_used = iterations;
    }
    return loadings;
}

TfmFit fit(const TensorSeries& x, const Shape& ranks, const FitOptions& options) {
    TensorSeries data = standardize(x, options.center, options.scale);
    TfmFit out;
    out.estimator = options.estimator;
    out.loadings = estimate_loadings(data, ranks, options, &out.iterations_used);
    out.factors = estimate_factors(data, out.loadings);
    return out;
}

} // namespace tenfac
