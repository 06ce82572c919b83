#include "tenfac/spectral.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace tenfac {

namespace {

Matrix symmetrized(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw std::domain_error("eigendecomposition needs a square matrix");
    }
    if (!m.allFinite()) {
        throw std::domain_error("matrix has non-finite entries");
    }
    return 0.5 * (m + m.transpose());
}

void fix_sign(Eigen::Ref<Vector> v) {
    Index best = 0;
    double best_abs = -1.0;
    for (Index i = 0; i < v.size(); ++i) {
        // Strict comparison keeps the lowest index on ties.
        if (std::abs(v[i]) > best_abs) {
            best_abs = std::abs(v[i]);
            best = i;
        }
    }
    if (v[best] < 0) {
        v = -v;
    }
}

} // namespace

EigenResult top_r_eigs(const Matrix& m, Index r) {
    if (r < 1 || r > m.rows()) {
        throw std::domain_error("requested " + std::to_string(r) + " eigenpairs from a " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + " matrix");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(m));
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("symmetric eigensolver failed to converge");
    }
    EigenResult out;
    out.values = solver.eigenvalues().reverse().head(r);
    out.vectors = solver.eigenvectors().rightCols(r).rowwise().reverse();
    for (Index j = 0; j < r; ++j) {
        fix_sign(out.vectors.col(j));
    }
    return out;
}

Vector eigenvalues_descending(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(m), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("symmetric eigensolver failed to converge");
    }
    return solver.eigenvalues().reverse();
}

} // namespace tenfac
