/**
 * test_twosample.cpp — the energy statistic's hand example and symmetries,
 * permutation p-value grid, matrix-reuse bit-identity, asymptotic variant.
 */
#include <doctest.h>

#include <cmath>

#include "mvml/metric.hpp"
#include "mvml/model.hpp"
#include "mvml/rng.hpp"
#include "mvml/twosample.hpp"

using namespace mvml;

namespace {

LabeledDataset groups_1d(std::initializer_list<double> plus,
                         std::initializer_list<double> minus) {
    LabeledDataset data;
    const int s = static_cast<int>(plus.size() + minus.size());
    data.points.resize(s, 1);
    data.labels.resize(s);
    int i = 0;
    for (double x : plus) {
        data.points(i, 0) = x;
        data.labels(i) = 1;
        ++i;
    }
    for (double x : minus) {
        data.points(i, 0) = x;
        data.labels(i) = -1;
        ++i;
    }
    return data;
}

LabeledDataset random_shifted(int s, int d, double shift, Rng& rng) {
    LabeledDataset data;
    data.points.resize(s, d);
    data.labels.resize(s);
    for (int i = 0; i < s; ++i) {
        data.labels(i) = i % 2 == 0 ? 1 : -1;
        for (int j = 0; j < d; ++j) {
            data.points(i, j) = rng.normal() + (data.labels(i) == 1 ? shift : 0.0);
        }
    }
    return data;
}

}  // namespace

TEST_SUITE("twosample") {

TEST_CASE("hand-evaluated energy statistic equals 46") {
    // Groups {0,2} and {5,7} under 1-D squared Euclidean distance:
    // cross pairs 25+49+9+25=108 -> 2*108/4 = 54; within pairs 4 and 4,
    // each averaged over ordered pairs -> 2*4/2 = 4. E = 54 - 4 - 4 = 46.
    const LabeledDataset data = groups_1d({0.0, 2.0}, {5.0, 7.0});
    CHECK(energy_statistic(data, euclidean_metric(1)) ==
          doctest::Approx(46.0).epsilon(1e-12));
}

TEST_CASE("coincident groups give zero") {
    const LabeledDataset data = groups_1d({1.0, 1.0}, {1.0, 1.0});
    CHECK(energy_statistic(data, euclidean_metric(1)) ==
          doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("statistic is symmetric under relabeling with equal sizes") {
    const LabeledDataset data = groups_1d({0.0, 2.0, 1.0}, {5.0, 7.0, 6.0});
    LabeledDataset swapped = data;
    swapped.labels = -swapped.labels;
    const MahalanobisMetric euclid = euclidean_metric(1);
    CHECK(energy_statistic(data, euclid) ==
          doctest::Approx(energy_statistic(swapped, euclid)).epsilon(1e-12));
}

TEST_CASE("undersized groups are rejected") {
    const LabeledDataset data = groups_1d({0.0}, {5.0, 7.0});
    CHECK_THROWS_AS(energy_statistic(data, euclidean_metric(1)),
                    std::invalid_argument);
}

TEST_CASE("matrix reuse is bit-identical") {
    Rng rng(60, "reuse");
    const LabeledDataset data = random_shifted(30, 3, 0.5, rng);
    const MahalanobisMetric euclid = euclidean_metric(3);
    const double direct = energy_statistic(data, euclid);
    const Matrix dist = pairwise_sq(euclid, data.points);
    const double via_matrix = energy_statistic_from_matrix(dist, data.labels);
    CHECK(direct == via_matrix);  // exactly equal, same accumulation path
}

TEST_CASE("permutation p-values live on the exact grid") {
    Rng rng(61, "grid");
    const int n_perm = 19;
    for (int trial = 0; trial < 10; ++trial) {
        const LabeledDataset data = random_shifted(16, 2, 0.3, rng);
        Rng perm(100 + trial, "perm");
        const TestResult result =
            permutation_test(data, euclidean_metric(2), n_perm, 0.05, perm);
        const double j = result.p_value * (1 + n_perm) - 1.0;
        CHECK(std::abs(j - std::round(j)) < 1e-9);
        CHECK(result.p_value > 0.0);
        CHECK(result.p_value <= 1.0);
        CHECK(result.reject == (result.p_value <= result.alpha));
    }
}

TEST_CASE("extreme separation attains the smallest p-value") {
    Rng rng(62, "extreme");
    const LabeledDataset data = random_shifted(40, 2, 50.0, rng);
    Rng perm(7, "perm");
    const TestResult result =
        permutation_test(data, euclidean_metric(2), 19, 0.05, perm);
    // No relabeling can reproduce a gap this size: p = 1/20.
    CHECK(result.p_value == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(result.reject);
}

TEST_CASE("statistic scales linearly with the metric; p-value does not move") {
    Rng rng(63, "scaling");
    const LabeledDataset data = random_shifted(24, 3, 0.8, rng);
    Matrix w(2, 3);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) w(i, j) = rng.normal();
    const MahalanobisMetric m = metric_from_factor(w, "m");
    const MahalanobisMetric m7 = metric_from_matrix(7.0 * m.m, "7m");

    const double e1 = energy_statistic(data, m);
    const double e7 = energy_statistic(data, m7);
    CHECK(e7 == doctest::Approx(7.0 * e1).epsilon(1e-9));

    Rng p1(5, "perm"), p2(5, "perm");
    const TestResult r1 = permutation_test(data, m, 99, 0.05, p1);
    const TestResult r2 = permutation_test(data, m7, 99, 0.05, p2);
    CHECK(r1.p_value == r2.p_value);  // rank statistics are scale-free
}

TEST_CASE("asymptotic test basics") {
    Rng rng(64, "asym");
    const LabeledDataset data = random_shifted(60, 3, 1.0, rng);
    const TestResult result = asymptotic_test(data, euclidean_metric(3), 0.05);
    CHECK(result.p_value > 0.0);
    CHECK(result.p_value <= 1.0);
    CHECK(result.method == TestMethod::asymptotic);
    CHECK(result.reject == (result.p_value <= 0.05));

    // Constant groups have no variance to normalize by.
    const LabeledDataset flat = groups_1d({1.0, 1.0, 1.0}, {4.0, 4.0, 4.0});
    CHECK_THROWS_AS(asymptotic_test(flat, euclidean_metric(1), 0.05),
                    std::runtime_error);
}

TEST_CASE("asymptotic and permutation decisions usually agree") {
    Rng rng(65, "concord");
    int agree = 0;
    const int trials = 60;
    for (int t = 0; t < trials; ++t) {
        const LabeledDataset data = random_shifted(120, 3, 0.45, rng);
        Rng perm(t, "perm");
        const MahalanobisMetric euclid = euclidean_metric(3);
        const TestResult rp = permutation_test(data, euclid, 199, 0.05, perm);
        const TestResult ra = asymptotic_test(data, euclid, 0.05);
        agree += rp.reject == ra.reject;
    }
    CHECK(agree >= trials * 17 / 20);  // >= 85%
}

}  // TEST_SUITE
