/**
 * eigen_sym.cpp — cyclic Jacobi and tridiagonal QL eigensolvers.
 *
 * The Jacobi path follows Golub & Van Loan §8.5 (cyclic-by-row ordering with
 * the stable rotation formulas); the large-dimension path is the classical
 * tred2/tql2 pair (Householder reduction, then QL with implicit Wilkinson
 * shifts), written from the textbook recurrences.
 */
#include "mvml/eigen_sym.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace mvml {

namespace {

constexpr int kJacobiMaxDim = 256;
constexpr int kJacobiMaxSweeps = 100;
constexpr int kQlMaxIterations = 60;

double off_diagonal_norm(const Matrix& a) {
    double sum = 0.0;
    const int n = static_cast<int>(a.rows());
    for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) sum += a(p, q) * a(p, q);
    return std::sqrt(2.0 * sum);
}

/// Cyclic Jacobi: rotate away (p,q) entries row by row until convergence.
void jacobi_eig(Matrix& a, Matrix& v) {
    const int n = static_cast<int>(a.rows());
    v = Matrix::Identity(n, n);
    const double norm = a.norm();
    if (norm == 0.0) return;
    const double stop = 1e-12 * norm;

    for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
        if (off_diagonal_norm(a) < stop) return;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                // Stable rotation: t = sign(theta)/(|theta| + sqrt(theta^2+1)).
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                const double app = a(p, p);
                const double aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (int k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = akp - s * (akq + tau * akp);
                    a(k, q) = akq + s * (akp - tau * akq);
                    a(p, k) = a(k, p);
                    a(q, k) = a(k, q);
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = vkp - s * (vkq + tau * vkp);
                    v(k, q) = vkq + s * (vkp - tau * vkq);
                }
            }
        }
    }
    if (off_diagonal_norm(a) >= stop)
        throw std::runtime_error("sym_eig: Jacobi iteration failed to converge");
}

/// Householder reduction of a to tridiagonal form (diag/subdiag), with the
/// accumulated orthogonal transform left in a itself.
void householder_tridiag(Matrix& a, Vector& diag, Vector& sub) {
    const int n = static_cast<int>(a.rows());
    diag.resize(n);
    sub.resize(n);

    for (int i = n - 1; i >= 1; --i) {
        const int l = i - 1;
        double h = 0.0;
        if (l > 0) {
            double scale = 0.0;
            for (int k = 0; k <= l; ++k) scale += std::abs(a(i, k));
            if (scale == 0.0) {
                sub(i) = a(i, l);
            } else {
                for (int k = 0; k <= l; ++k) {
                    a(i, k) /= scale;
                    h += a(i, k) * a(i, k);
                }
                double f = a(i, l);
                double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
                sub(i) = scale * g;
                h -= f * g;
                a(i, l) = f - g;
                f = 0.0;
                for (int j = 0; j <= l; ++j) {
                    a(j, i) = a(i, j) / h;  // store u/H for transform accumulation
                    g = 0.0;
                    for (int k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
                    for (int k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
                    sub(j) = g / h;
                    f += sub(j) * a(i, j);
                }
                const double hh = f / (h + h);
                for (int j = 0; j <= l; ++j) {
                    f = a(i, j);
                    g = sub(j) - hh * f;
                    sub(j) = g;
                    for (int k = 0; k <= j; ++k) a(j, k) -= f * sub(k) + g * a(i, k);
                }
            }
        } else {
            sub(i) = a(i, l);
        }
        diag(i) = h;
    }

    diag(0) = 0.0;
    sub(0) = 0.0;
    // Accumulate the product of the Householder reflectors.
    for (int i = 0; i < n; ++i) {
        const int l = i - 1;
        if (diag(i) != 0.0) {
            for (int j = 0; j <= l; ++j) {
                double g = 0.0;
                for (int k = 0; k <= l; ++k) g += a(i, k) * a(k, j);
                for (int k = 0; k <= l; ++k) a(k, j) -= g * a(k, i);
            }
        }
        diag(i) = a(i, i);
        a(i, i) = 1.0;
        for (int j = 0; j <= l; ++j) {
            a(j, i) = 0.0;
            a(i, j) = 0.0;
        }
    }
}

/// Implicit-shift QL on a tridiagonal matrix; z accumulates eigenvectors.
void tridiag_ql(Vector& diag, Vector& sub, Matrix& z) {
    const int n = static_cast<int>(diag.size());
    for (int i = 1; i < n; ++i) sub(i - 1) = sub(i);
    sub(n - 1) = 0.0;

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(diag(m)) + std::abs(diag(m + 1));
                if (std::abs(sub(m)) <= 1e-300 || std::abs(sub(m)) <= 2.3e-16 * dd) break;
            }
            if (m != l) {
                if (++iter > kQlMaxIterations)
                    throw std::runtime_error("sym_eig: QL iteration failed to converge");
                // Wilkinson shift.
                double g = (diag(l + 1) - diag(l)) / (2.0 * sub(l));
                double r = std::hypot(g, 1.0);
                g = diag(m) - diag(l) + sub(l) / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
                double s = 1.0;
                double c = 1.0;
                double p = 0.0;
                bool underflow = false;
                for (int i = m - 1; i >= l; --i) {
                    double f = s * sub(i);
                    const double b = c * sub(i);
                    r = std::hypot(f, g);
                    sub(i + 1) = r;
                    if (r == 0.0) {
                        // Rotation annihilated early; restart this eigenvalue.
                        diag(i + 1) -= p;
                        sub(m) = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = diag(i + 1) - p;
                    r = (diag(i) - g) * s + 2.0 * c * b;
                    p = s * r;
                    diag(i + 1) = g + p;
                    g = c * r - b;
                    for (int k = 0; k < n; ++k) {
                        f = z(k, i + 1);
                        z(k, i + 1) = s * z(k, i) + c * f;
                        z(k, i) = c * z(k, i) - s * f;
                    }
                }
                if (underflow) continue;
                diag(l) -= p;
                sub(l) = g;
                sub(m) = 0.0;
            }
        } while (m != l);
    }
}

/// Largest-|entry|-positive sign normalization (ties -> lowest index).
void normalize_signs(Matrix& vectors) {
    for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
        int arg = 0;
        double best = std::abs(vectors(0, j));
        for (Eigen::Index i = 1; i < vectors.rows(); ++i) {
            const double mag = std::abs(vectors(i, j));
            if (mag > best) {
                best = mag;
                arg = static_cast<int>(i);
            }
        }
        if (vectors(arg, j) < 0.0) vectors.col(j) = -vectors.col(j);
    }
}

}  // namespace

SymEigResult sym_eig(const Matrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("sym_eig: matrix must be square");
    if (!a.allFinite()) throw std::invalid_argument("sym_eig: matrix has non-finite entries");
    const int n = static_cast<int>(a.rows());

    Matrix work = 0.5 * (a + a.transpose());  // enforce exact symmetry
    Vector values(n);
    Matrix vectors;

    if (n <= kJacobiMaxDim) {
        jacobi_eig(work, vectors);
        values = work.diagonal();
    } else {
        Vector sub;
        householder_tridiag(work, values, sub);
        tridiag_ql(values, sub, work);
        vectors = std::move(work);
    }

    // Sort eigenpairs by descending eigenvalue (stable for determinism).
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return values(i) > values(j); });

    SymEigResult result;
    result.values.resize(n);
    result.vectors.resize(n, n);
    for (int k = 0; k < n; ++k) {
        result.values(k) = values(order[k]);
        result.vectors.col(k) = vectors.col(order[k]);
    }
    normalize_signs(result.vectors);
    return result;
}

std::pair<Vector, Matrix> sym_eig_top_k(const Matrix& a, int K) {
    if (K < 1 || K > a.rows())
        throw std::invalid_argument("sym_eig_top_k: need 1 <= K <= d");
    SymEigResult full = sym_eig(a);
    return {full.values.head(K), full.vectors.leftCols(K)};
}

double spectral_norm_sym(const Matrix& a) {
    const SymEigResult full = sym_eig(a);
    const int n = static_cast<int>(full.values.size());
    return std::max(std::abs(full.values(0)), std::abs(full.values(n - 1)));
}

}  // namespace mvml
