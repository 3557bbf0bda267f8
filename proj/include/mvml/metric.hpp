/**
 * metric.hpp — Mahalanobis (semi-)metrics d_M(x,y)^2 = (x-y)^T M (x-y).
 *
 * Every metric keeps a factor W with M = W^T W, so a squared distance is the
 * plain squared norm of W(x-y).  That gives two things for free: evaluated
 * distances are nonnegative by construction, and batched computations reduce
 * to one projection ("whitening") of the point set followed by Euclidean
 * geometry in the projected coordinates, where pairwise distances are a
 * matrix product.  The Euclidean metric is flagged so the projection can be
 * skipped entirely.
 *
 * The factor is obtained from the eigendecomposition M = V diag(l) V^T as
 * W = diag(sqrt(l_+)) V^T, dropping directions with l <= 1e-12 * l_max; a
 * rank-K estimate therefore projects to K coordinates and downstream passes
 * scale with the rank, not the ambient dimension.
 */
#ifndef MVML_METRIC_HPP
#define MVML_METRIC_HPP

#include <string>

#include "mvml/model.hpp"

namespace mvml {

struct MahalanobisMetric {
    std::string name;      // identifier used in result tables (e.g. "euclid")
    Matrix m;              // d x d PSD matrix; identity materialized too
    Matrix w;              // r x d factor with m = w^T w (empty iff identity)
    bool identity = false; // true for the Euclidean metric (skip projection)

    int dim() const { return static_cast<int>(m.rows()); }
    int rank() const { return identity ? dim() : static_cast<int>(w.rows()); }
};

/// Euclidean metric on R^d (M = I_d).
MahalanobisMetric euclidean_metric(int d, std::string name = "euclid");

/// Metric from a PSD matrix; symmetrizes, clamps tiny negative eigenvalues,
/// throws std::invalid_argument if M is materially non-PSD or non-finite.
MahalanobisMetric metric_from_matrix(const Matrix& m, std::string name);

/// Metric from a factor W (r x d), M = W^T W.
MahalanobisMetric metric_from_factor(const Matrix& w, std::string name);

/// Squared distance between two points.
double mahalanobis_sq(const MahalanobisMetric& metric, const Vector& x,
                      const Vector& y);

/// Project points (rows) into the metric's whitened coordinates: s x rank.
Matrix whiten(const MahalanobisMetric& metric, const Matrix& points);

/// All squared distances between rows of a and rows of b (|a| x |b|),
/// clamped at zero against cancellation error.
Matrix pairwise_sq(const MahalanobisMetric& metric, const Matrix& a,
                   const Matrix& b);

/// Symmetric pairwise squared distances among rows of a; exact zero diagonal.
Matrix pairwise_sq(const MahalanobisMetric& metric, const Matrix& a);

/// Plain Euclidean pairwise squared distances between row sets (|a| x |b|),
/// for callers that have already whitened their coordinates.
Matrix euclidean_pairwise_sq(const Matrix& a, const Matrix& b);

/// Spectral-norm discrepancy between two metric matrices, ||m1 - m2||_2.
double metric_discrepancy(const Matrix& m1, const Matrix& m2);

}  // namespace mvml

#endif  // MVML_METRIC_HPP
