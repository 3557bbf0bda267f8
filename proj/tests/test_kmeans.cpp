/**
 * test_kmeans.cpp — Lloyd iteration under a pluggable metric: separable and
 * degenerate cases, monotone objective, scaling invariance, empty-cluster
 * repair, miscluster rate.
 */
#include <doctest.h>

#include <cmath>

#include "mvml/kmeans.hpp"
#include "mvml/rng.hpp"

using namespace mvml;

namespace {

Matrix points_1d(std::initializer_list<double> xs) {
    Matrix pts(static_cast<Eigen::Index>(xs.size()), 1);
    int i = 0;
    for (double x : xs) pts(i++, 0) = x;
    return pts;
}

Vector vec1(double x) {
    Vector v(1);
    v(0) = x;
    return v;
}

}  // namespace

TEST_SUITE("kmeans") {

TEST_CASE("well-separated 1-D clusters converge fast") {
    const Matrix pts = points_1d({0.0, 0.1, 10.0, 10.1});
    const MahalanobisMetric euclid = euclidean_metric(1);
    const ClusteringResult fit =
        kmeans_fit(pts, euclid, {vec1(0.0), vec1(10.0)});
    CHECK(fit.iterations <= 2);
    CHECK(fit.labels(0) == fit.labels(1));
    CHECK(fit.labels(2) == fit.labels(3));
    CHECK(fit.labels(0) != fit.labels(2));
    CHECK(std::abs(fit.centroid_plus(0) - fit.centroid_minus(0)) >
          5.0);  // centroids land on the two groups
}

TEST_CASE("identical points terminate immediately with zero objective") {
    const Matrix pts = points_1d({3.0, 3.0, 3.0});
    const MahalanobisMetric euclid = euclidean_metric(1);
    const ClusteringResult fit = kmeans_fit(pts, euclid, {vec1(0.0), vec1(1.0)});
    CHECK(fit.objective_trace.back() == doctest::Approx(0.0).epsilon(1e-12));
    for (int i = 0; i < 3; ++i) CHECK(std::abs(fit.labels(i)) == 1);
}

TEST_CASE("objective trace is non-increasing on random instances") {
    Rng rng(70, "mono");
    for (int trial = 0; trial < 40; ++trial) {
        const int s = 5 + static_cast<int>(rng.below(40));
        const int d = 1 + static_cast<int>(rng.below(4));
        Matrix pts(s, d);
        for (int i = 0; i < s; ++i)
            for (int j = 0; j < d; ++j) pts(i, j) = rng.normal();
        const MahalanobisMetric euclid = euclidean_metric(d);
        const auto init = init_random(pts, rng);
        const ClusteringResult fit = kmeans_fit(pts, euclid, init);
        for (size_t t = 0; t + 1 < fit.objective_trace.size(); ++t) {
            CHECK(fit.objective_trace[t + 1] <= fit.objective_trace[t] + 1e-9);
        }
        CHECK(fit.iterations <= 100);
    }
}

TEST_CASE("scaling the metric leaves the assignment sequence unchanged") {
    Rng rng(71, "scale");
    Matrix pts(30, 2);
    for (int i = 0; i < 30; ++i)
        for (int j = 0; j < 2; ++j) pts(i, j) = rng.normal();
    Matrix w(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) w(i, j) = rng.normal();
    const MahalanobisMetric m = metric_from_factor(w, "m");
    const MahalanobisMetric m9 = metric_from_matrix(9.0 * m.m, "9m");
    const auto init = init_random(pts, rng);
    const ClusteringResult f1 = kmeans_fit(pts, m, init);
    const ClusteringResult f2 = kmeans_fit(pts, m9, init);
    CHECK((f1.labels - f2.labels).cwiseAbs().maxCoeff() == 0);
    CHECK(f1.iterations == f2.iterations);
}

TEST_CASE("empty cluster is re-seeded, not fatal") {
    // Both initial centroids sit far to one side, so one cluster starts
    // empty; the repair rule keeps the fit going.
    const Matrix pts = points_1d({0.0, 1.0, 2.0, 8.0, 9.0});
    const MahalanobisMetric euclid = euclidean_metric(1);
    const ClusteringResult fit =
        kmeans_fit(pts, euclid, {vec1(100.0), vec1(101.0)});
    int plus = 0, minus = 0;
    for (int i = 0; i < 5; ++i) {
        (fit.labels(i) == 1 ? plus : minus) += 1;
    }
    CHECK(plus >= 1);
    CHECK(minus >= 1);
    for (size_t t = 0; t + 1 < fit.objective_trace.size(); ++t) {
        CHECK(fit.objective_trace[t + 1] <= fit.objective_trace[t] + 1e-9);
    }
}

TEST_CASE("random init draws two distinct data points") {
    Rng rng(72, "init");
    const Matrix pts = points_1d({1.0, 2.0});
    for (int trial = 0; trial < 10; ++trial) {
        const auto [a, b] = init_random(pts, rng);
        const bool forward = a(0) == 1.0 && b(0) == 2.0;
        const bool backward = a(0) == 2.0 && b(0) == 1.0;
        CHECK((forward || backward));
    }
    const Matrix single = points_1d({1.0});
    CHECK_THROWS_AS(init_random(single, rng), std::invalid_argument);
}

TEST_CASE("oracle init needs a signal") {
    Rng rng(73, "oracle");
    Vector alpha = Vector::Zero(2);
    const FactorModelSpec null_model = build_model(4, 2, 1.0, 1.0, alpha, rng);
    CHECK_THROWS_AS(init_oracle(null_model), std::invalid_argument);

    alpha(0) = 0.5;
    const FactorModelSpec model = build_model(4, 2, 1.0, 1.0, alpha, rng);
    const auto [plus, minus] = init_oracle(model);
    const Vector expected = model.loading() * alpha;
    CHECK((plus - expected).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((minus + expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("miscluster rate") {
    IntVector truth(4), pred(4);
    truth << 1, 1, -1, -1;
    pred << 1, 1, -1, -1;
    CHECK(miscluster_rate(pred, truth) == 0.0);
    pred = -pred;
    CHECK(miscluster_rate(pred, truth) == 0.0);  // flip-invariant
    pred << 1, -1, -1, -1;
    CHECK(miscluster_rate(pred, truth) == doctest::Approx(0.25));

    Rng rng(74, "coin");
    IntVector big_truth(10000), big_pred(10000);
    for (int i = 0; i < 10000; ++i) {
        big_truth(i) = i % 2 == 0 ? 1 : -1;
        big_pred(i) = rng.below(2) == 0 ? 1 : -1;
    }
    const double rate = miscluster_rate(big_pred, big_truth);
    CHECK(rate <= 0.5);
    CHECK(rate > 0.45);

    IntVector short_pred(3);
    short_pred << 1, 1, 1;
    CHECK_THROWS_AS(miscluster_rate(short_pred, truth), std::invalid_argument);
}

}  // TEST_SUITE
