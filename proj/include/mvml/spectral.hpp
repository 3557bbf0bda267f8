/**
 * spectral.hpp — moment estimator R-hat and the spectral learning step.
 *
 * R-hat is an unbiased estimator of B B^T built from within-sample view
 * cross-products minus an across-sample correction.  Canonical linear-time
 * form (X-bar_i = view mean of sample i, X-bar-bar = grand mean):
 *
 *   R = (n/(n-1) + 1/(m-1)) * (1/m) sum_i Xbar_i Xbar_i^T
 *       - (1/(m n (n-1))) sum_{i,j} X_ij X_ij^T
 *       - (m/(m-1)) * Xbarbar Xbarbar^T
 *
 * The quadratic-time U-statistic form (unordered pairs) is kept as a test
 * oracle and must agree with the linear form to floating-point error:
 *
 *   R = [sum_i sum_{j<j'} (X_ij X_ij'^T + X_ij' X_ij^T)] / (m n (n-1))
 *       - [sum_{i<i'} (Xbar_i Xbar_i'^T + Xbar_i' Xbar_i^T)] / (m (m-1))
 *
 * The learning step takes the K largest eigenpairs (lambda_k, u_k) of R and
 * assembles the metric estimates
 *   M*  = sum_k max(lambda_k, 0) u_k u_k^T      (anisotropic),
 *   M** = sum_k u_k u_k^T                        (isotropic projector);
 * negative sample eigenvalues are clamped so M* stays positive semidefinite.
 */
#ifndef MVML_SPECTRAL_HPP
#define MVML_SPECTRAL_HPP

#include "mvml/model.hpp"

namespace mvml {

struct SpectralEstimate {
    Matrix rhat;          // d x d, symmetric
    Vector eigenvalues;   // K largest, descending (not clamped)
    Matrix eigenvectors;  // d x K, orthonormal columns
    Matrix m_star;        // estimated M* (clamped spectrum)
    Matrix m_star_star;   // estimated M** (rank-K projector)
};

/// Linear-time form of R-hat (canonical).
Matrix compute_rhat_linear(const MultiViewDataset& data);

/// Quadratic-time unordered-pair form (oracle; equals the linear form).
Matrix compute_rhat_ustat(const MultiViewDataset& data);

/// R-hat, top-K eigenpairs, and both assembled metric estimates.
SpectralEstimate spectral_learn(const MultiViewDataset& data, int K);

}  // namespace mvml

#endif  // MVML_SPECTRAL_HPP
