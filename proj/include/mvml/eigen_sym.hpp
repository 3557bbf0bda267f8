/**
 * eigen_sym.hpp — dense symmetric eigensolver.
 *
 * Two deterministic classical algorithms, selected by dimension:
 *   - d <= 256: cyclic Jacobi rotations, iterated until the off-diagonal
 *     Frobenius norm drops below 1e-12 * ||A||_F;
 *   - d  > 256: Householder tridiagonalization followed by the implicit-shift
 *     QL iteration, accumulating the orthogonal transforms.
 *
 * Output convention: eigenvalues in non-increasing order with matching
 * eigenvector columns; each eigenvector is sign-normalized so that its entry
 * of largest absolute value is positive (ties broken by lowest index).  With
 * degenerate eigenvalues the invariant subspace is well-defined but the
 * within-cluster rotation is not; callers must compare subspaces or the
 * assembled metrics, never raw eigenvectors.
 */
#ifndef MVML_EIGEN_SYM_HPP
#define MVML_EIGEN_SYM_HPP

#include <utility>

#include "mvml/model.hpp"

namespace mvml {

struct SymEigResult {
    Vector values;   // descending
    Matrix vectors;  // column k pairs with values(k); orthonormal
};

/// Full eigendecomposition of a symmetric matrix (input is symmetrized).
SymEigResult sym_eig(const Matrix& a);

/// The K algebraically largest eigenpairs.
std::pair<Vector, Matrix> sym_eig_top_k(const Matrix& a, int K);

/// Spectral norm max |eig(A)| of a symmetric matrix.
double spectral_norm_sym(const Matrix& a);

}  // namespace mvml

#endif  // MVML_EIGEN_SYM_HPP
