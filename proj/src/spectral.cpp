#include "mvml/spectral.hpp"

#include <stdexcept>

#include "mvml/eigen_sym.hpp"

namespace mvml {

namespace {

void check_shape(const MultiViewDataset& data) {
    if (data.m < 2 || data.n < 2) {
        throw std::invalid_argument("compute_rhat: need m >= 2 samples and n >= 2 views");
    }
    if (data.views.rows() != static_cast<long>(data.m) * data.n ||
        data.views.cols() != data.d) {
        throw std::invalid_argument("compute_rhat: views matrix has wrong shape");
    }
}

/// Per-sample view means, m x d.
Matrix view_means(const MultiViewDataset& data) {
    Matrix xbar(data.m, data.d);
    for (int i = 0; i < data.m; ++i) {
        xbar.row(i) = data.views.middleRows(static_cast<long>(i) * data.n, data.n)
                          .colwise()
                          .mean();
    }
    return xbar;
}

}  // namespace

Matrix compute_rhat_linear(const MultiViewDataset& data) {
    check_shape(data);
    const int m = data.m;
    const int n = data.n;
    const int d = data.d;

    const Matrix xbar = view_means(data);
    const Vector grand = xbar.colwise().mean().transpose();

    // Rank-updates keep the two Gram accumulations at syrk cost.
    Matrix s1 = Matrix::Zero(d, d);
    s1.selfadjointView<Eigen::Lower>().rankUpdate(xbar.adjoint(), 1.0 / m);
    Matrix s2 = Matrix::Zero(d, d);
    s2.selfadjointView<Eigen::Lower>().rankUpdate(
        data.views.adjoint(), 1.0 / (static_cast<double>(m) * n * (n - 1)));

    const double c1 = static_cast<double>(n) / (n - 1) + 1.0 / (m - 1);
    Matrix rhat = c1 * s1.selfadjointView<Eigen::Lower>();
    rhat -= s2.selfadjointView<Eigen::Lower>();
    rhat -= (static_cast<double>(m) / (m - 1)) * (grand * grand.transpose());
    // Symmetrize to wash out the asymmetry left by floating-point updates.
    rhat = 0.5 * (rhat + rhat.transpose()).eval();
    return rhat;
}

Matrix compute_rhat_ustat(const MultiViewDataset& data) {
    check_shape(data);
    const int m = data.m;
    const int n = data.n;
    const int d = data.d;

    // Within-sample term: unordered view pairs (j < j'), both orders summed.
    Matrix within = Matrix::Zero(d, d);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            const auto xj = data.views.row(static_cast<long>(i) * n + j);
            for (int jp = j + 1; jp < n; ++jp) {
                const auto xjp = data.views.row(static_cast<long>(i) * n + jp);
                within += xj.transpose() * xjp + xjp.transpose() * xj;
            }
        }
    }
    within /= static_cast<double>(m) * n * (n - 1);

    // Across-sample term: unordered sample pairs of view means.
    const Matrix xbar = view_means(data);
    Matrix across = Matrix::Zero(d, d);
    for (int i = 0; i < m; ++i) {
        for (int ip = i + 1; ip < m; ++ip) {
            across += xbar.row(i).transpose() * xbar.row(ip) +
                      xbar.row(ip).transpose() * xbar.row(i);
        }
    }
    across /= static_cast<double>(m) * (m - 1);

    return within - across;
}

SpectralEstimate spectral_learn(const MultiViewDataset& data, int K) {
    if (K < 1 || K > data.d) {
        throw std::invalid_argument("spectral_learn: K must lie in [1, d]");
    }
    SpectralEstimate est;
    est.rhat = compute_rhat_linear(data);

    auto [values, vectors] = sym_eig_top_k(est.rhat, K);
    est.eigenvalues = values;
    est.eigenvectors = vectors;

    const Vector clamped = values.cwiseMax(0.0);
    est.m_star = vectors * clamped.asDiagonal() * vectors.transpose();
    est.m_star = 0.5 * (est.m_star + est.m_star.transpose()).eval();
    est.m_star_star = vectors * vectors.transpose();
    est.m_star_star = 0.5 * (est.m_star_star + est.m_star_star.transpose()).eval();
    return est;
}

}  // namespace mvml
