/**
 * knn.hpp — brute-force k-nearest-neighbor classification under a pluggable
 * Mahalanobis metric.
 *
 * Conventions (fixed, unit-tested):
 *   - neighbors ordered by ascending distance, exact distance ties broken by
 *     lower training index;
 *   - binary vote: predict +1 iff at least k/2 of the k nearest neighbors
 *     carry label +1 (so an exact vote tie goes to +1);
 *   - k selected by cross-validation when not pinned: v-fold CV over a grid,
 *     error ties resolved toward the smallest k.
 *
 * All query paths whiten once and batch the distance computations as matrix
 * products, so cost scales with the metric rank rather than the ambient
 * dimension for low-rank metrics.
 */
#ifndef MVML_KNN_HPP
#define MVML_KNN_HPP

#include <vector>

#include "mvml/metric.hpp"
#include "mvml/model.hpp"
#include "mvml/rng.hpp"

namespace mvml {

struct KnnConfig {
    int k = 5;  // neighbor count, 1 <= k <= training size
};

/// For each query row: indices of the k nearest training rows, ascending by
/// distance (ties by lower index). Building block shared by the classifier
/// and by multiclass wrappers.
std::vector<std::vector<int>> knn_neighbors(const MahalanobisMetric& metric,
                                            const Matrix& train,
                                            const Matrix& queries, int k);

/// Predict the label of a single query point.
int knn_classify(const LabeledDataset& train, const MahalanobisMetric& metric,
                 const KnnConfig& config, const Vector& x);

/// Predict labels for all rows of `queries`.
IntVector knn_classify_batch(const LabeledDataset& train,
                             const MahalanobisMetric& metric,
                             const KnnConfig& config, const Matrix& queries);

/// Fraction of test points whose prediction disagrees with the test label.
double misclassification_rate(const LabeledDataset& train,
                              const LabeledDataset& test,
                              const MahalanobisMetric& metric,
                              const KnnConfig& config);

/// Misclassification of the k-NN rule on n_mc fresh model draws minus the
/// Bayes error on the same draws; may be slightly negative (not clamped).
double excess_risk(const LabeledDataset& train, const MahalanobisMetric& metric,
                   const KnnConfig& config, const FactorModelSpec& model,
                   int n_mc, Rng& rng);

/// v-fold cross-validated choice of k over a grid; ties -> smallest k.
/// Grid entries exceeding the smallest fold-train size are skipped; throws
/// std::invalid_argument if every entry is skipped.
int select_k_cv(const LabeledDataset& train, const MahalanobisMetric& metric,
                const std::vector<int>& k_grid, int folds, Rng& rng);

}  // namespace mvml

#endif  // MVML_KNN_HPP
