#include "mvml/kmeans.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace mvml {

namespace {

/// Index of the row of `w` farthest from `center` (ties -> lowest index).
int farthest_row(const Matrix& w, const Eigen::RowVectorXd& center) {
    int best = 0;
    double best_dist = -1.0;
    for (long i = 0; i < w.rows(); ++i) {
        const double dist = (w.row(i) - center).squaredNorm();
        if (dist > best_dist) {
            best_dist = dist;
            best = static_cast<int>(i);
        }
    }
    return best;
}

}  // namespace

ClusteringResult kmeans_fit(const Matrix& points, const MahalanobisMetric& metric,
                            std::pair<Vector, Vector> init, int max_iter,
                            double tol) {
    const long s = points.rows();
    if (s < 2) throw std::invalid_argument("kmeans_fit: need at least 2 points");
    if (init.first.size() != points.cols() || init.second.size() != points.cols()) {
        throw std::invalid_argument("kmeans_fit: centroid dimension mismatch");
    }
    if (max_iter < 1) throw std::invalid_argument("kmeans_fit: max_iter >= 1");

    // All distances live in whitened coordinates; centroids are kept in the
    // original space (the mean commutes with the linear projection).
    const Matrix w = whiten(metric, points);
    Vector cp = std::move(init.first);
    Vector cm = std::move(init.second);
    Eigen::RowVectorXd wp = whiten(metric, cp.transpose()).row(0);
    Eigen::RowVectorXd wm = whiten(metric, cm.transpose()).row(0);

    ClusteringResult result;
    result.labels.resize(s);

    auto assign = [&]() {
        double objective = 0.0;
        for (long i = 0; i < s; ++i) {
            const double dp = (w.row(i) - wp).squaredNorm();
            const double dm = (w.row(i) - wm).squaredNorm();
            result.labels(i) = dp <= dm ? +1 : -1;  // tie -> +1
            objective += std::min(dp, dm);
        }
        return objective;
    };

    double objective = assign();
    result.objective_trace.push_back(objective);

    for (int iter = 1; iter <= max_iter; ++iter) {
        // Centroid update: arithmetic means; re-seed an emptied cluster at
        // the point farthest from the surviving centroid.
        Vector sum_p = Vector::Zero(points.cols());
        Vector sum_m = Vector::Zero(points.cols());
        long n_p = 0;
        for (long i = 0; i < s; ++i) {
            if (result.labels(i) == 1) {
                sum_p += points.row(i).transpose();
                ++n_p;
            } else {
                sum_m += points.row(i).transpose();
            }
        }
        const long n_m = s - n_p;
        if (n_p > 0) cp = sum_p / static_cast<double>(n_p);
        if (n_m > 0) cm = sum_m / static_cast<double>(n_m);
        if (n_m > 0) wm = whiten(metric, cm.transpose()).row(0);
        if (n_p > 0) wp = whiten(metric, cp.transpose()).row(0);
        if (n_p == 0) {
            const int far = farthest_row(w, wm);
            cp = points.row(far).transpose();
            wp = w.row(far);
        }
        if (n_m == 0) {
            const int far = farthest_row(w, wp);
            cm = points.row(far).transpose();
            wm = w.row(far);
        }

        const IntVector previous = result.labels;
        const double updated = assign();
        result.objective_trace.push_back(updated);
        result.iterations = iter;

        const bool unchanged = (result.labels.array() == previous.array()).all();
        const bool converged = (objective - updated) <= tol * std::max(objective, 0.0);
        objective = updated;
        if (unchanged || converged) break;
    }

    result.centroid_plus = cp;
    result.centroid_minus = cm;
    return result;
}

std::pair<Vector, Vector> init_random(const Matrix& points, Rng& rng) {
    const long s = points.rows();
    if (s < 2) throw std::invalid_argument("init_random: need at least 2 points");
    const long i = static_cast<long>(rng.below(static_cast<uint64_t>(s)));
    long j = static_cast<long>(rng.below(static_cast<uint64_t>(s - 1)));
    if (j >= i) ++j;
    return {points.row(i).transpose(), points.row(j).transpose()};
}

std::pair<Vector, Vector> init_oracle(const FactorModelSpec& model) {
    const Vector mu = model.loading() * model.alpha_mix;
    if (mu.norm() == 0.0) {
        throw std::invalid_argument("init_oracle: class means coincide (alpha = 0)");
    }
    return {mu, -mu};
}

double miscluster_rate(const IntVector& predicted, const IntVector& truth) {
    if (predicted.size() != truth.size()) {
        throw std::invalid_argument("miscluster_rate: length mismatch");
    }
    const long s = predicted.size();
    if (s == 0) throw std::invalid_argument("miscluster_rate: empty labels");
    long disagree = 0;
    for (long i = 0; i < s; ++i) {
        if (std::abs(predicted(i)) != 1 || std::abs(truth(i)) != 1) {
            throw std::invalid_argument("miscluster_rate: labels must be +/-1");
        }
        disagree += predicted(i) != truth(i);
    }
    return static_cast<double>(std::min(disagree, s - disagree)) / static_cast<double>(s);
}

}  // namespace mvml
