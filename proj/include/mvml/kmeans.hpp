/**
 * kmeans.hpp — Lloyd-style 2-means clustering under a pluggable Mahalanobis
 * metric.
 *
 * Iteration: (1) each centroid becomes the arithmetic mean of its assigned
 * points (the mean minimizes the summed squared Mahalanobis distance for any
 * PSD M, including rank-deficient ones), then (2) points are reassigned to
 * the nearer centroid, equidistant ties going to +1.  The objective
 * sum_i min(D(x_i, c+), D(x_i, c-)) is therefore non-increasing and the
 * procedure terminates.  An emptied cluster is re-seeded at the point
 * farthest from the surviving centroid (ties -> lowest index) so the fit
 * never aborts; mis-clustering is measured up to the global label flip.
 */
#ifndef MVML_KMEANS_HPP
#define MVML_KMEANS_HPP

#include <utility>
#include <vector>

#include "mvml/metric.hpp"
#include "mvml/model.hpp"
#include "mvml/rng.hpp"

namespace mvml {

struct ClusteringResult {
    IntVector labels;                    // +/-1 assignment per point
    Vector centroid_plus;                // final +1 centroid
    Vector centroid_minus;               // final -1 centroid
    int iterations = 0;                  // update cycles performed
    std::vector<double> objective_trace; // objective after init and each cycle
};

/// Lloyd iteration from the given pair of initial centroids.
ClusteringResult kmeans_fit(const Matrix& points, const MahalanobisMetric& metric,
                            std::pair<Vector, Vector> init, int max_iter = 100,
                            double tol = 1e-10);

/// Two distinct data points chosen uniformly at random.
std::pair<Vector, Vector> init_random(const Matrix& points, Rng& rng);

/// The true class means (B alpha, -B alpha); throws if alpha = 0.
std::pair<Vector, Vector> init_oracle(const FactorModelSpec& model);

/// min over the global flip of the disagreement fraction; always <= 1/2.
double miscluster_rate(const IntVector& predicted, const IntVector& truth);

}  // namespace mvml

#endif  // MVML_KMEANS_HPP
