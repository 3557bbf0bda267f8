/**
 * model.hpp — latent factor model for multi-view data.
 *
 * Observation model (one sample i, view j):
 *     X_{i,j} = B Z_i + eps_{i,j},   B = U Lambda^{1/2},  U^T U = I_K,
 * with eps_{i,j} ~ N(0, sigma2 I_d) i.i.d. across samples and views.
 *
 * The latent variable follows a two-component Gaussian mixture
 *     Z ~ 0.5 N(alpha, I - alpha alpha^T) + 0.5 N(-alpha, I - alpha alpha^T),
 * so that Var(Z) = I_K regardless of alpha; the branch label Y = +/-1 drives
 * the downstream classification/testing/clustering tasks.  alpha = 0 encodes
 * the null population (labels carry no signal).
 *
 * Target metrics: M* = B B^T (anisotropic) and M** = U U^T (isotropic).
 */
#ifndef MVML_MODEL_HPP
#define MVML_MODEL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <utility>

#include "mvml/rng.hpp"

namespace mvml {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;

/// Ground-truth generator parameters; owns all population-level quantities.
struct FactorModelSpec {
    int d = 0;             // ambient dimension
    int K = 0;             // number of factors (K <= d)
    Matrix U;              // d x K, orthonormal columns
    Vector lambdas;        // K eigenvalues of M*, lambda_1 >= ... >= lambda_K > 0
    double sigma2 = 1.0;   // isotropic noise variance
    Vector alpha_mix;      // mixture center, ||alpha|| < 1 (zero => null population)

    /// Factor loading matrix B = U diag(sqrt(lambda)).
    Matrix loading() const { return U * lambdas.cwiseSqrt().asDiagonal(); }
    /// Condition number of the factor spectrum.
    double condition_number() const { return lambdas(0) / lambdas(K - 1); }
};

/// m samples x n views x d dims, stored as an (m*n) x d row-major block;
/// view j of sample i lives in row i*n + j.
struct MultiViewDataset {
    int m = 0;
    int n = 0;
    int d = 0;
    Matrix views;  // (m*n) x d

    Eigen::Ref<const Eigen::RowVectorXd> view(int i, int j) const {
        return views.row(i * n + j);
    }
};

/// s single-view observations with labels in {-1, +1}.
struct LabeledDataset {
    Matrix points;    // s x d
    IntVector labels; // s, values in {-1, +1}
    int size() const { return static_cast<int>(points.rows()); }
    int dim() const { return static_cast<int>(points.cols()); }
};

/// Orthonormal d x K basis distributed as the first K left singular vectors
/// of an i.i.d. standard Gaussian matrix (uniform on the Stiefel manifold).
Matrix sample_factor_basis(int d, int K, Rng& rng);

/// Model with the spectrum lambda_k = lambda_scale * (K - k + 1) / K.
FactorModelSpec build_model(int d, int K, double lambda_scale, double sigma2,
                            const Vector& alpha_mix, Rng& rng);

/// Model from explicit parts (validates invariants).
FactorModelSpec make_model(Matrix U, Vector lambdas, double sigma2, Vector alpha_mix);

/// Draw latent variables and branch labels: Z_i | Y_i ~ N(Y_i alpha, I - alpha alpha^T).
std::pair<Matrix, IntVector> sample_population(const FactorModelSpec& model, int count, Rng& rng);

/// Unlabeled multi-view draw: X_{i,j} = B Z_i + eps_{i,j}.
MultiViewDataset sample_multiview(const FactorModelSpec& model, int m, int n, Rng& rng);

/// Labeled single-view draw for downstream tasks.
LabeledDataset sample_labeled(const FactorModelSpec& model, int s, Rng& rng);

/// (M* = B B^T, M** = U U^T).
std::pair<Matrix, Matrix> target_metrics(const FactorModelSpec& model);

/// Bayes rule for the two-branch mixture: sign(x^T C^{-1} B alpha) with
/// C = B (I - alpha alpha^T) B^T + sigma2 I (ties -> +1).  Precomputed as the
/// weight vector w = C^{-1} B alpha.
struct BayesRule {
    Vector w;
    int classify(const Eigen::Ref<const Vector>& x) const {
        return x.dot(w) >= 0.0 ? +1 : -1;
    }
};

BayesRule bayes_rule(const FactorModelSpec& model);
int bayes_classify(const FactorModelSpec& model, const Eigen::Ref<const Vector>& x);

/// Monte Carlo misclassification rate of the Bayes rule on fresh draws.
double bayes_error(const FactorModelSpec& model, int n_mc, Rng& rng);

}  // namespace mvml

#endif  // MVML_MODEL_HPP
