#include "mvml/knn.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace mvml {

namespace {

/// Neighbor prefixes on already-whitened coordinates. Returns, per query
/// row, the k nearest training-row indices ascending by (distance, index).
std::vector<std::vector<int>> neighbors_whitened(const Matrix& wtrain,
                                                 const Matrix& wqueries, int k) {
    const int s = static_cast<int>(wtrain.rows());
    const int q = static_cast<int>(wqueries.rows());
    if (s < 1) throw std::invalid_argument("knn: empty training set");
    if (k < 1 || k > s) throw std::invalid_argument("knn: need 1 <= k <= train size");

    std::vector<std::vector<int>> result(q);
    // Process query blocks so the distance buffer stays cache-friendly.
    constexpr int kBlock = 256;
    std::vector<int> order(s);
    for (int start = 0; start < q; start += kBlock) {
        const int count = std::min(kBlock, q - start);
        const Matrix dist =
            euclidean_pairwise_sq(wqueries.middleRows(start, count), wtrain);
        for (int b = 0; b < count; ++b) {
            const auto row = dist.row(b);
            std::iota(order.begin(), order.end(), 0);
            auto closer = [&row](int i, int j) {
                return row(i) < row(j) || (row(i) == row(j) && i < j);
            };
            std::nth_element(order.begin(), order.begin() + (k - 1), order.end(),
                             closer);
            std::sort(order.begin(), order.begin() + k, closer);
            result[start + b].assign(order.begin(), order.begin() + k);
        }
    }
    return result;
}

}  // namespace

std::vector<std::vector<int>> knn_neighbors(const MahalanobisMetric& metric,
                                            const Matrix& train,
                                            const Matrix& queries, int k) {
    return neighbors_whitened(whiten(metric, train), whiten(metric, queries), k);
}

namespace {

/// +1 iff at least k/2 of the k nearest carry label +1.
int vote(const std::vector<int>& prefix, const IntVector& labels, int k) {
    int plus = 0;
    for (int j = 0; j < k; ++j) plus += labels(prefix[j]) == 1;
    return 2 * plus >= k ? +1 : -1;
}

IntVector classify_whitened(const Matrix& wtrain, const IntVector& labels,
                            const Matrix& wqueries, int k) {
    const auto prefixes = neighbors_whitened(wtrain, wqueries, k);
    IntVector pred(wqueries.rows());
    for (size_t i = 0; i < prefixes.size(); ++i)
        pred(static_cast<long>(i)) = vote(prefixes[i], labels, k);
    return pred;
}

}  // namespace

int knn_classify(const LabeledDataset& train, const MahalanobisMetric& metric,
                 const KnnConfig& config, const Vector& x) {
    Matrix query(1, x.size());
    query.row(0) = x.transpose();
    return knn_classify_batch(train, metric, config, query)(0);
}

IntVector knn_classify_batch(const LabeledDataset& train,
                             const MahalanobisMetric& metric,
                             const KnnConfig& config, const Matrix& queries) {
    if (train.size() < 1) throw std::invalid_argument("knn: empty training set");
    return classify_whitened(whiten(metric, train.points), train.labels,
                             whiten(metric, queries), config.k);
}

double misclassification_rate(const LabeledDataset& train,
                              const LabeledDataset& test,
                              const MahalanobisMetric& metric,
                              const KnnConfig& config) {
    if (test.size() < 1) throw std::invalid_argument("knn: empty test set");
    if (train.dim() != test.dim())
        throw std::invalid_argument("knn: train/test dimension mismatch");
    const IntVector pred = knn_classify_batch(train, metric, config, test.points);
    int wrong = 0;
    for (int i = 0; i < test.size(); ++i) wrong += pred(i) != test.labels(i);
    return static_cast<double>(wrong) / test.size();
}

double excess_risk(const LabeledDataset& train, const MahalanobisMetric& metric,
                   const KnnConfig& config, const FactorModelSpec& model,
                   int n_mc, Rng& rng) {
    if (n_mc < 1) throw std::invalid_argument("excess_risk: need n_mc >= 1");
    const LabeledDataset test = sample_labeled(model, n_mc, rng);
    const double knn_err = misclassification_rate(train, test, metric, config);

    // Evaluate the Bayes rule on the same draws so the difference is not
    // dominated by shared test-set noise.
    const BayesRule rule = bayes_rule(model);
    const Vector scores = test.points * rule.w;
    int wrong = 0;
    for (int i = 0; i < n_mc; ++i) {
        const int pred = scores(i) >= 0.0 ? +1 : -1;
        wrong += pred != test.labels(i);
    }
    return knn_err - static_cast<double>(wrong) / n_mc;
}

int select_k_cv(const LabeledDataset& train, const MahalanobisMetric& metric,
                const std::vector<int>& k_grid, int folds, Rng& rng) {
    const int s = train.size();
    if (folds < 2) throw std::invalid_argument("select_k_cv: need folds >= 2");
    if (k_grid.empty()) throw std::invalid_argument("select_k_cv: empty grid");
    if (s < folds) throw std::invalid_argument("select_k_cv: fewer points than folds");

    // Seeded fold assignment: shuffle indices, cut into contiguous blocks.
    std::vector<int> perm(s);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    std::vector<int> fold_start(folds + 1);
    for (int f = 0; f <= folds; ++f)
        fold_start[f] = static_cast<int>(static_cast<long>(f) * s / folds);

    const int max_fold = [&] {
        int mx = 0;
        for (int f = 0; f < folds; ++f)
            mx = std::max(mx, fold_start[f + 1] - fold_start[f]);
        return mx;
    }();
    const int min_train = s - max_fold;

    std::vector<int> grid(k_grid);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    while (!grid.empty() && grid.back() > min_train) grid.pop_back();
    if (grid.empty())
        throw std::invalid_argument("select_k_cv: every grid entry exceeds fold-train size");
    const int k_max = grid.back();

    const Matrix wpoints = whiten(metric, train.points);
    std::vector<long> errors(grid.size(), 0);
    Matrix wtrain(s, wpoints.cols());
    Matrix wval(max_fold, wpoints.cols());
    for (int f = 0; f < folds; ++f) {
        const int v0 = fold_start[f];
        const int v1 = fold_start[f + 1];
        const int n_val = v1 - v0;
        const int n_tr = s - n_val;
        IntVector tr_labels(n_tr), val_labels(n_val);
        int t = 0;
        for (int i = 0; i < s; ++i) {
            if (i >= v0 && i < v1) continue;
            wtrain.row(t) = wpoints.row(perm[i]);
            tr_labels(t++) = train.labels(perm[i]);
        }
        for (int i = 0; i < n_val; ++i) {
            wval.row(i) = wpoints.row(perm[v0 + i]);
            val_labels(i) = train.labels(perm[v0 + i]);
        }
        // One neighbor pass at the largest k serves every grid entry.
        const auto prefixes =
            neighbors_whitened(wtrain.topRows(n_tr), wval.topRows(n_val), k_max);
        for (int i = 0; i < n_val; ++i) {
            for (size_t g = 0; g < grid.size(); ++g) {
                errors[g] += vote(prefixes[i], tr_labels, grid[g]) != val_labels(i);
            }
        }
    }

    size_t best = 0;
    for (size_t g = 1; g < grid.size(); ++g)
        if (errors[g] < errors[best]) best = g;  // ties keep the smaller k
    return grid[best];
}

}  // namespace mvml
