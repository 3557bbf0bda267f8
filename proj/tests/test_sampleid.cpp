/**
 * test_sampleid.cpp — threshold quantile convention, strict decision
 * boundary, scale equivariance, and size calibration.
 */
#include <doctest.h>

#include <cmath>

#include "mvml/metric.hpp"
#include "mvml/model.hpp"
#include "mvml/rng.hpp"
#include "mvml/sampleid.hpp"

using namespace mvml;

namespace {

/// m samples, n=2 views, 1-D: view1 = 0 and view2 = sqrt(dist), so the
/// within-sample squared Euclidean distances are exactly `dists`.
MultiViewDataset pairs_with_distances(const std::vector<double>& dists) {
    MultiViewDataset data;
    data.m = static_cast<int>(dists.size());
    data.n = 2;
    data.d = 1;
    data.views = Matrix::Zero(2 * data.m, 1);
    for (int i = 0; i < data.m; ++i) {
        data.views(2 * i + 1, 0) = std::sqrt(dists[i]);
    }
    return data;
}

}  // namespace

TEST_SUITE("sampleid") {

TEST_CASE("quantile rule: m=20, alpha=0.05 takes the 19th order statistic") {
    std::vector<double> dists;
    for (int i = 20; i >= 1; --i) dists.push_back(i);  // unsorted on purpose
    const MultiViewDataset data = pairs_with_distances(dists);
    const IdThreshold t = estimate_threshold(data, euclidean_metric(1), 0.05);
    CHECK(t.value == doctest::Approx(19.0).epsilon(1e-9));
    CHECK(t.n_calibration == 20);
    CHECK(t.alpha == 0.05);
}

TEST_CASE("quantile rule at other levels") {
    const MultiViewDataset data =
        pairs_with_distances({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    // ceil(0.5 * 10) = 5th ascending.
    CHECK(estimate_threshold(data, euclidean_metric(1), 0.5).value ==
          doctest::Approx(5.0).epsilon(1e-9));
    // ceil(0.9 * 10) = 9th.
    CHECK(estimate_threshold(data, euclidean_metric(1), 0.1).value ==
          doctest::Approx(9.0).epsilon(1e-9));
}

TEST_CASE("noiseless views give a zero threshold") {
    Rng rng(80, "noiseless");
    const FactorModelSpec model = build_model(5, 2, 1.0, 0.0, Vector::Zero(2), rng);
    const MultiViewDataset data = sample_multiview(model, 50, 2, rng);
    const IdThreshold t = estimate_threshold(data, euclidean_metric(5), 0.05);
    CHECK(t.value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("decision boundary is strict") {
    const MahalanobisMetric euclid = euclidean_metric(1);
    IdThreshold t;
    t.value = 4.0;
    Vector x1 = Vector::Zero(1), x2 = Vector::Zero(1);
    x2(0) = 2.0;  // squared distance exactly 4
    CHECK(identify(x1, x2, euclid, t) == IdDecision::same_sample);
    x2(0) = 2.001;
    CHECK(identify(x1, x2, euclid, t) == IdDecision::different_sample);
    CHECK(identify(x1, x1, euclid, t) == IdDecision::same_sample);
}

TEST_CASE("threshold scales with the metric; decisions do not") {
    Rng rng(81, "scale");
    const FactorModelSpec model = build_model(4, 2, 1.0, 1.0, Vector::Zero(2), rng);
    const MultiViewDataset data = sample_multiview(model, 200, 2, rng);
    Matrix w(2, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 4; ++j) w(i, j) = rng.normal();
    const MahalanobisMetric m = metric_from_factor(w, "m");
    const MahalanobisMetric m6 = metric_from_matrix(6.0 * m.m, "6m");
    const IdThreshold t1 = estimate_threshold(data, m, 0.05);
    const IdThreshold t6 = estimate_threshold(data, m6, 0.05);
    CHECK(t6.value == doctest::Approx(6.0 * t1.value).epsilon(1e-9));

    for (int trial = 0; trial < 30; ++trial) {
        Vector x1(4), x2(4);
        for (int i = 0; i < 4; ++i) {
            x1(i) = rng.normal();
            x2(i) = rng.normal();
        }
        CHECK(identify(x1, x2, m, t1) == identify(x1, x2, m6, t6));
    }
}

TEST_CASE("validation") {
    const MultiViewDataset data = pairs_with_distances({1, 2, 3});
    CHECK_THROWS_AS(estimate_threshold(data, euclidean_metric(1), 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(estimate_threshold(data, euclidean_metric(1), 1.0),
                    std::invalid_argument);
    MultiViewDataset single = data;
    single.n = 1;
    single.views = data.views.topRows(3).eval();
    single.m = 3;
    CHECK_THROWS_AS(estimate_threshold(single, euclidean_metric(1), 0.05),
                    std::invalid_argument);
}

TEST_CASE("size is close to alpha with a large calibration set") {
    Rng rng(82, "size");
    const FactorModelSpec model = build_model(6, 2, 2.0, 1.0, Vector::Zero(2), rng);
    const MultiViewDataset calib = sample_multiview(model, 10000, 2, rng);
    const MahalanobisMetric euclid = euclidean_metric(6);
    const IdThreshold t = estimate_threshold(calib, euclid, 0.05);
    const double size =
        id_power(model, euclid, t, Vector::Zero(2), 2000, rng);
    CHECK(std::abs(size - 0.05) < 0.02);
}

TEST_CASE("power increases with the latent separation") {
    Rng rng(83, "power");
    const int K = 2;
    const FactorModelSpec model = build_model(6, K, 4.0, 1.0, Vector::Zero(K), rng);
    const MultiViewDataset calib = sample_multiview(model, 5000, 2, rng);
    const MahalanobisMetric euclid = euclidean_metric(6);
    const IdThreshold t = estimate_threshold(calib, euclid, 0.05);
    Vector small = Vector::Zero(K), large = Vector::Zero(K);
    small(1) = 1.0;
    large(1) = 4.0;
    const double p_small = id_power(model, euclid, t, small, 800, rng);
    const double p_large = id_power(model, euclid, t, large, 800, rng);
    CHECK(p_large > p_small);
    CHECK(p_large > 0.5);
}

}  // TEST_SUITE
