#include "mvml/metric.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "mvml/eigen_sym.hpp"

namespace mvml {

namespace {

// Relative cutoff below which an eigendirection is dropped from the factor.
constexpr double kRankTolerance = 1e-12;
// Eigenvalues below -kPsdTolerance * scale mean the matrix is not PSD.
constexpr double kPsdTolerance = 1e-8;

}  // namespace

MahalanobisMetric euclidean_metric(int d, std::string name) {
    if (d < 1) throw std::invalid_argument("euclidean_metric: d must be >= 1");
    MahalanobisMetric metric;
    metric.name = std::move(name);
    metric.m = Matrix::Identity(d, d);
    metric.w = Matrix();
    metric.identity = true;
    return metric;
}

MahalanobisMetric metric_from_matrix(const Matrix& m, std::string name) {
    if (m.rows() != m.cols() || m.rows() < 1) {
        throw std::invalid_argument("metric_from_matrix: matrix must be square");
    }
    if (!m.allFinite()) {
        throw std::invalid_argument("metric_from_matrix: matrix has non-finite entries");
    }
    const Matrix sym = 0.5 * (m + m.transpose());
    const SymEigResult eig = sym_eig(sym);

    const double top = eig.values.size() > 0 ? eig.values(0) : 0.0;
    const double scale = std::max(std::abs(top), 1.0);
    if (eig.values(eig.values.size() - 1) < -kPsdTolerance * scale) {
        throw std::invalid_argument(
            "metric_from_matrix: matrix is not positive semidefinite");
    }

    // Keep directions carrying mass; W = diag(sqrt(l)) V^T restricted to them.
    const double cutoff = kRankTolerance * std::max(top, 0.0);
    int rank = 0;
    while (rank < eig.values.size() && eig.values(rank) > cutoff) ++rank;

    MahalanobisMetric metric;
    metric.name = std::move(name);
    metric.m = sym;
    metric.w = Matrix(rank, sym.rows());
    for (int k = 0; k < rank; ++k) {
        metric.w.row(k) = std::sqrt(eig.values(k)) * eig.vectors.col(k).transpose();
    }
    metric.identity = false;
    return metric;
}

MahalanobisMetric metric_from_factor(const Matrix& w, std::string name) {
    if (w.cols() < 1) {
        throw std::invalid_argument("metric_from_factor: factor must have columns");
    }
    if (!w.allFinite()) {
        throw std::invalid_argument("metric_from_factor: factor has non-finite entries");
    }
    MahalanobisMetric metric;
    metric.name = std::move(name);
    Matrix m = Matrix::Zero(w.cols(), w.cols());
    m.selfadjointView<Eigen::Lower>().rankUpdate(w.adjoint(), 1.0);
    metric.m = Matrix(m.selfadjointView<Eigen::Lower>());
    metric.w = w;
    metric.identity = false;
    return metric;
}

double mahalanobis_sq(const MahalanobisMetric& metric, const Vector& x,
                      const Vector& y) {
    if (x.size() != metric.dim() || y.size() != metric.dim()) {
        throw std::invalid_argument("mahalanobis_sq: point dimension mismatch");
    }
    const Vector diff = x - y;
    if (metric.identity) return diff.squaredNorm();
    return (metric.w * diff).squaredNorm();
}

Matrix whiten(const MahalanobisMetric& metric, const Matrix& points) {
    if (points.cols() != metric.dim()) {
        throw std::invalid_argument("whiten: point dimension mismatch");
    }
    if (metric.identity) return points;
    return points * metric.w.transpose();
}

// D_ij = ||a_i||^2 + ||b_j||^2 - 2 a_i . b_j on whitened coordinates.
Matrix euclidean_pairwise_sq(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw std::invalid_argument("euclidean_pairwise_sq: dimension mismatch");
    }
    const Vector a2 = a.rowwise().squaredNorm();
    const Vector b2 = b.rowwise().squaredNorm();
    Matrix dist = -2.0 * (a * b.transpose());
    dist.colwise() += a2;
    dist.rowwise() += b2.transpose();
    return dist.cwiseMax(0.0);
}

Matrix pairwise_sq(const MahalanobisMetric& metric, const Matrix& a,
                   const Matrix& b) {
    if (a.cols() != metric.dim() || b.cols() != metric.dim()) {
        throw std::invalid_argument("pairwise_sq: point dimension mismatch");
    }
    return euclidean_pairwise_sq(whiten(metric, a), whiten(metric, b));
}

Matrix pairwise_sq(const MahalanobisMetric& metric, const Matrix& a) {
    if (a.cols() != metric.dim()) {
        throw std::invalid_argument("pairwise_sq: point dimension mismatch");
    }
    const Matrix wa = whiten(metric, a);
    Matrix dist = euclidean_pairwise_sq(wa, wa);
    // Force an exact-zero diagonal and exact symmetry (gemm leaves residue).
    for (long i = 0; i < dist.rows(); ++i) {
        dist(i, i) = 0.0;
        for (long j = 0; j < i; ++j) dist(i, j) = dist(j, i);
    }
    return dist;
}

double metric_discrepancy(const Matrix& m1, const Matrix& m2) {
    if (m1.rows() != m2.rows() || m1.cols() != m2.cols()) {
        throw std::invalid_argument("metric_discrepancy: shape mismatch");
    }
    return spectral_norm_sym(0.5 * ((m1 - m2) + (m1 - m2).transpose()));
}

}  // namespace mvml
