/**
 * model.cpp — latent factor model construction and sampling.
 */
#include "mvml/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mvml {

namespace {

/// Fill a matrix with i.i.d. standard normals, row-major order.
void fill_gaussian(Matrix& a, Rng& rng) {
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = rng.normal();
}

void validate_model(const FactorModelSpec& model) {
    if (model.K < 1 || model.d < model.K)
        throw std::invalid_argument("model: need 1 <= K <= d");
    if (model.U.rows() != model.d || model.U.cols() != model.K)
        throw std::invalid_argument("model: U must be d x K");
    if (model.lambdas.size() != model.K)
        throw std::invalid_argument("model: lambdas must have length K");
    for (int k = 0; k < model.K; ++k) {
        if (!(model.lambdas(k) > 0.0))
            throw std::invalid_argument("model: lambdas must be strictly positive");
        if (k > 0 && model.lambdas(k) > model.lambdas(k - 1))
            throw std::invalid_argument("model: lambdas must be non-increasing");
    }
    if (model.sigma2 < 0.0)
        throw std::invalid_argument("model: sigma2 must be non-negative");
    if (model.alpha_mix.size() != model.K)
        throw std::invalid_argument("model: alpha_mix must have length K");
    // ||alpha|| = 1 is admissible: the component covariance I - alpha alpha^T
    // degenerates to a projector but Var(Z) = I still holds.
    if (model.alpha_mix.squaredNorm() > 1.0 + 1e-12)
        throw std::invalid_argument("model: ||alpha_mix|| must be <= 1");
    const double ortho = (model.U.transpose() * model.U - Matrix::Identity(model.K, model.K))
                             .cwiseAbs()
                             .maxCoeff();
    if (ortho > 1e-10)
        throw std::invalid_argument("model: U columns not orthonormal (defect " +
                                    std::to_string(ortho) + ")");
}

}  // namespace

Matrix sample_factor_basis(int d, int K, Rng& rng) {
    if (K < 1 || K > d) throw std::invalid_argument("sample_factor_basis: need 1 <= K <= d");
    // QR orthonormalization of a Gaussian d x K block, with the R-diagonal
    // sign correction, is distributed uniformly on the Stiefel manifold —
    // the same law as the first K left singular vectors of a Gaussian matrix.
    Matrix g(d, K);
    fill_gaussian(g, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(d, K);
    const Matrix r = qr.matrixQR().topLeftCorner(K, K).triangularView<Eigen::Upper>();
    for (int k = 0; k < K; ++k)
        if (r(k, k) < 0.0) q.col(k) = -q.col(k);
    return q;
}

FactorModelSpec build_model(int d, int K, double lambda_scale, double sigma2,
                            const Vector& alpha_mix, Rng& rng) {
    if (!(lambda_scale > 0.0))
        throw std::invalid_argument("build_model: lambda_scale must be positive");
    FactorModelSpec model;
    model.d = d;
    model.K = K;
    model.U = sample_factor_basis(d, K, rng);
    model.lambdas = Vector(K);
    for (int k = 0; k < K; ++k) model.lambdas(k) = lambda_scale * double(K - k) / double(K);
    model.sigma2 = sigma2;
    model.alpha_mix = alpha_mix.size() == 0 ? Vector::Zero(K) : alpha_mix;
    validate_model(model);
    return model;
}

FactorModelSpec make_model(Matrix U, Vector lambdas, double sigma2, Vector alpha_mix) {
    FactorModelSpec model;
    model.d = static_cast<int>(U.rows());
    model.K = static_cast<int>(U.cols());
    model.U = std::move(U);
    model.lambdas = std::move(lambdas);
    model.sigma2 = sigma2;
    model.alpha_mix = alpha_mix.size() == 0 ? Vector::Zero(model.K) : std::move(alpha_mix);
    validate_model(model);
    return model;
}

std::pair<Matrix, IntVector> sample_population(const FactorModelSpec& model, int count, Rng& rng) {
    const int K = model.K;
    const Vector& alpha = model.alpha_mix;
    const double a2 = alpha.squaredNorm();
    // (I - alpha alpha^T)^{1/2} = I - (1 - sqrt(1 - ||alpha||^2)) abar abar^T
    // with abar = alpha / ||alpha||; applied as a rank-1 update to g ~ N(0, I).
    const double shrink = a2 > 0.0 ? 1.0 - std::sqrt(1.0 - a2) : 0.0;
    Vector abar = a2 > 0.0 ? Vector(alpha / std::sqrt(a2)) : Vector::Zero(K);

    Matrix z(count, K);
    IntVector y(count);
    Vector g(K);
    for (int i = 0; i < count; ++i) {
        const int label = rng.uniform01() < 0.5 ? +1 : -1;
        y(i) = label;
        for (int k = 0; k < K; ++k) g(k) = rng.normal();
        if (shrink > 0.0) g -= (shrink * abar.dot(g)) * abar;
        z.row(i) = (double(label) * alpha + g).transpose();
    }
    return {std::move(z), std::move(y)};
}

MultiViewDataset sample_multiview(const FactorModelSpec& model, int m, int n, Rng& rng) {
    if (m < 2 || n < 2)
        throw std::invalid_argument("sample_multiview: need m >= 2 and n >= 2");
    auto [z, y] = sample_population(model, m, rng);
    (void)y;
    const double sigma = std::sqrt(model.sigma2);

    MultiViewDataset data;
    data.m = m;
    data.n = n;
    data.d = model.d;
    data.views.resize(static_cast<Eigen::Index>(m) * n, model.d);
    fill_gaussian(data.views, rng);
    if (sigma != 1.0) data.views *= sigma;
    // Add the shared signal B Z_i to each of the n views of sample i.
    const Matrix signal = z * model.loading().transpose();  // m x d
    for (int i = 0; i < m; ++i)
        data.views.middleRows(static_cast<Eigen::Index>(i) * n, n).rowwise() += signal.row(i);
    return data;
}

LabeledDataset sample_labeled(const FactorModelSpec& model, int s, Rng& rng) {
    if (s < 1) throw std::invalid_argument("sample_labeled: need s >= 1");
    auto [z, y] = sample_population(model, s, rng);
    const double sigma = std::sqrt(model.sigma2);

    LabeledDataset data;
    data.labels = std::move(y);
    data.points.resize(s, model.d);
    fill_gaussian(data.points, rng);
    if (sigma != 1.0) data.points *= sigma;
    data.points += z * model.loading().transpose();
    return data;
}

std::pair<Matrix, Matrix> target_metrics(const FactorModelSpec& model) {
    Matrix m_star = model.U * model.lambdas.asDiagonal() * model.U.transpose();
    Matrix m_star_star = model.U * model.U.transpose();
    return {std::move(m_star), std::move(m_star_star)};
}

BayesRule bayes_rule(const FactorModelSpec& model) {
    const Matrix b = model.loading();
    const Vector balpha = b * model.alpha_mix;
    // C = B (I - alpha alpha^T) B^T + sigma2 I = B B^T - (B alpha)(B alpha)^T + sigma2 I
    Matrix c = b * b.transpose() - balpha * balpha.transpose();
    c.diagonal().array() += model.sigma2;
    Eigen::LLT<Matrix> llt(c);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error(
            "bayes_rule: degenerate model, C = B(I-aa^T)B^T + sigma2 I is singular");
    BayesRule rule;
    rule.w = llt.solve(balpha);
    return rule;
}

int bayes_classify(const FactorModelSpec& model, const Eigen::Ref<const Vector>& x) {
    return bayes_rule(model).classify(x);
}

double bayes_error(const FactorModelSpec& model, int n_mc, Rng& rng) {
    if (n_mc < 1) throw std::invalid_argument("bayes_error: need n_mc >= 1");
    const BayesRule rule = bayes_rule(model);
    const LabeledDataset data = sample_labeled(model, n_mc, rng);
    // Vectorized sign test: misclassified iff y * (x . w) < 0, ties count as +1.
    int wrong = 0;
    const Vector scores = data.points * rule.w;
    for (int i = 0; i < n_mc; ++i) {
        const int pred = scores(i) >= 0.0 ? +1 : -1;
        wrong += pred != data.labels(i);
    }
    return double(wrong) / double(n_mc);
}

}  // namespace mvml
