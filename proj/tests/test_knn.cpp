/**
 * test_knn.cpp — neighbor ordering, the vote and tie conventions, scale and
 * permutation invariance, cross-validated k selection, excess risk.
 */
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mvml/knn.hpp"
#include "mvml/rng.hpp"

using namespace mvml;

namespace {

LabeledDataset dataset_1d(std::initializer_list<std::pair<double, int>> rows) {
    LabeledDataset data;
    data.points.resize(static_cast<Eigen::Index>(rows.size()), 1);
    data.labels.resize(static_cast<Eigen::Index>(rows.size()));
    int i = 0;
    for (const auto& [x, y] : rows) {
        data.points(i, 0) = x;
        data.labels(i) = y;
        ++i;
    }
    return data;
}

LabeledDataset random_labeled(int s, int d, Rng& rng) {
    LabeledDataset data;
    data.points.resize(s, d);
    data.labels.resize(s);
    for (int i = 0; i < s; ++i) {
        for (int j = 0; j < d; ++j) data.points(i, j) = rng.normal();
        data.labels(i) = rng.below(2) == 0 ? -1 : 1;
    }
    return data;
}

}  // namespace

TEST_SUITE("knn") {

TEST_CASE("nearest neighbor basics") {
    const MahalanobisMetric euclid = euclidean_metric(1);
    const LabeledDataset train = dataset_1d({{0.0, 1}, {10.0, -1}});
    Vector q(1);

    q(0) = 1.0;
    CHECK(knn_classify(train, euclid, KnnConfig{1}, q) == 1);
    q(0) = 9.0;
    CHECK(knn_classify(train, euclid, KnnConfig{1}, q) == -1);
    // Query on a training point returns that point's label.
    q(0) = 10.0;
    CHECK(knn_classify(train, euclid, KnnConfig{1}, q) == -1);
}

TEST_CASE("vote tie goes to +1") {
    const MahalanobisMetric euclid = euclidean_metric(1);
    const LabeledDataset train = dataset_1d({{-1.0, -1}, {1.0, 1}});
    Vector q(1);
    q(0) = 0.3;
    CHECK(knn_classify(train, euclid, KnnConfig{2}, q) == 1);
}

TEST_CASE("distance tie broken by lower training index") {
    const MahalanobisMetric euclid = euclidean_metric(1);
    // Both points are exactly 1 away from the origin query.
    const LabeledDataset train = dataset_1d({{-1.0, -1}, {1.0, 1}});
    Vector q(1);
    q(0) = 0.0;
    CHECK(knn_classify(train, euclid, KnnConfig{1}, q) == -1);

    const LabeledDataset flipped = dataset_1d({{1.0, 1}, {-1.0, -1}});
    CHECK(knn_classify(flipped, euclid, KnnConfig{1}, q) == 1);
}

TEST_CASE("neighbor lists are sorted by distance") {
    Rng rng(50, "order");
    const LabeledDataset train = random_labeled(40, 3, rng);
    Matrix queries(5, 3);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 3; ++j) queries(i, j) = rng.normal();
    const MahalanobisMetric euclid = euclidean_metric(3);
    const auto lists = knn_neighbors(euclid, train.points, queries, 7);
    REQUIRE(lists.size() == 5);
    for (int q = 0; q < 5; ++q) {
        REQUIRE(lists[q].size() == 7);
        for (size_t a = 0; a + 1 < lists[q].size(); ++a) {
            const double da = (train.points.row(lists[q][a]) - queries.row(q))
                                  .squaredNorm();
            const double db = (train.points.row(lists[q][a + 1]) - queries.row(q))
                                  .squaredNorm();
            CHECK(da <= db + 1e-12);
        }
    }
}

TEST_CASE("misclassification is zero on the training set with k=1") {
    Rng rng(51, "self");
    const LabeledDataset train = random_labeled(30, 2, rng);
    const MahalanobisMetric euclid = euclidean_metric(2);
    CHECK(misclassification_rate(train, train, euclid, KnnConfig{1}) == 0.0);
}

TEST_CASE("validation errors") {
    const MahalanobisMetric euclid = euclidean_metric(1);
    const LabeledDataset train = dataset_1d({{0.0, 1}, {1.0, -1}});
    Vector q(1);
    q(0) = 0.5;
    CHECK_THROWS_AS(knn_classify(train, euclid, KnnConfig{3}, q),
                    std::invalid_argument);
    CHECK_THROWS_AS(knn_classify(train, euclid, KnnConfig{0}, q),
                    std::invalid_argument);
}

TEST_CASE("predictions are invariant to metric scaling") {
    Rng rng(52, "scale");
    const LabeledDataset train = random_labeled(50, 3, rng);
    Matrix w(2, 3);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) w(i, j) = rng.normal();
    const MahalanobisMetric m = metric_from_factor(w, "m");
    const MahalanobisMetric m3 = metric_from_matrix(3.0 * m.m, "3m");
    Matrix queries(20, 3);
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 3; ++j) queries(i, j) = rng.normal();
    const IntVector p1 = knn_classify_batch(train, m, KnnConfig{5}, queries);
    const IntVector p2 = knn_classify_batch(train, m3, KnnConfig{5}, queries);
    CHECK((p1 - p2).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("predictions are invariant to training permutation") {
    Rng rng(53, "perm");
    const LabeledDataset train = random_labeled(40, 2, rng);
    LabeledDataset shuffled;
    std::vector<int> order(40);
    for (int i = 0; i < 40; ++i) order[i] = i;
    rng.shuffle(order);
    shuffled.points.resize(40, 2);
    shuffled.labels.resize(40);
    for (int i = 0; i < 40; ++i) {
        shuffled.points.row(i) = train.points.row(order[i]);
        shuffled.labels(i) = train.labels(order[i]);
    }
    Matrix queries(15, 2);
    for (int i = 0; i < 15; ++i)
        for (int j = 0; j < 2; ++j) queries(i, j) = rng.normal();
    const MahalanobisMetric euclid = euclidean_metric(2);
    // Continuous data: pairwise distances are distinct a.s., so order cannot
    // leak through tie-breaking.
    const IntVector p1 = knn_classify_batch(train, euclid, KnnConfig{5}, queries);
    const IntVector p2 =
        knn_classify_batch(shuffled, euclid, KnnConfig{5}, queries);
    CHECK((p1 - p2).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("cross-validated k selection") {
    Rng rng(54, "cv");
    const MahalanobisMetric euclid = euclidean_metric(2);
    const LabeledDataset train = random_labeled(60, 2, rng);

    SUBCASE("singleton grid returns its entry") {
        Rng cv(1, "cv");
        CHECK(select_k_cv(train, euclid, {1}, 5, cv) == 1);
    }
    SUBCASE("deterministic under a fixed seed") {
        Rng cv1(2, "cv");
        Rng cv2(2, "cv");
        const int k1 = select_k_cv(train, euclid, {1, 3, 5, 9}, 5, cv1);
        const int k2 = select_k_cv(train, euclid, {1, 3, 5, 9}, 5, cv2);
        CHECK(k1 == k2);
    }
    SUBCASE("oversized grid entries are skipped") {
        Rng cv(3, "cv");
        const int k = select_k_cv(train, euclid, {5, 1000}, 5, cv);
        CHECK(k == 5);
    }
    SUBCASE("all entries oversized is an error") {
        Rng cv(4, "cv");
        CHECK_THROWS_AS(select_k_cv(train, euclid, {1000}, 5, cv),
                        std::invalid_argument);
    }
    SUBCASE("folds < 2 is an error") {
        Rng cv(5, "cv");
        CHECK_THROWS_AS(select_k_cv(train, euclid, {1}, 1, cv),
                        std::invalid_argument);
    }
}

TEST_CASE("excess risk is near zero without signal") {
    Rng rng(55, "excess");
    const FactorModelSpec model = build_model(4, 2, 1.0, 1.0, Vector::Zero(2), rng);
    const LabeledDataset train = sample_labeled(model, 200, rng);
    const MahalanobisMetric euclid = euclidean_metric(4);
    const double excess =
        excess_risk(train, euclid, KnnConfig{9}, model, 4000, rng);
    // Both the k-NN rule and the Bayes rule are at chance; the difference is
    // pure Monte Carlo noise.
    CHECK(std::abs(excess) < 0.05);
}

}  // TEST_SUITE
