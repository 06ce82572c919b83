#ifndef TENFAC_SPECTRAL_HPP
#define TENFAC_SPECTRAL_HPP

#include "tenfac/tensor.hpp"

namespace tenfac {

/// Leading eigenpairs of a symmetric matrix, eigenvalues descending.
struct EigenResult {
    Vector values;
    Matrix vectors;
};

/**
 * Top-r eigenpairs of a symmetric matrix.
 *
 * The input is symmetrized as (M + M^T)/2 before decomposition. Each returned
 * eigenvector has its entry of largest magnitude positive (lowest index wins
 * ties), which makes the output deterministic for distinct eigenvalues.
 * Repeated eigenvalues only determine the spanned subspace.
 *
 * Throws std::domain_error when r is outside 1..rows or an entry is not finite.
 */
EigenResult top_r_eigs(const Matrix& m, Index r);

/// All eigenvalues, descending.
Vector eigenvalues_descending(const Matrix& m);

} // namespace tenfac

#endif
